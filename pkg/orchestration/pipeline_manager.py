"""
Pipeline Manager for orchestrating the numerical workflows behind each command.
"""
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import ValidationError

from analyzers import get_sweep_analyzer, get_verdict_analyzer
from config.settings import settings
from models.reports import OutputFormat, RunConfig, VerificationSummary
from models.sequences import MomentSequence, SchurParams
from models.sources import ResolvedInput, SourceSpec
from services import (
    get_export_service,
    get_ingest_service,
    get_lmatrix_service,
    get_sequence_service,
    get_transform_service,
    spectral_norm,
)
from utils.exceptions import (
    DegenerateMeasureError,
    InvariantViolationError,
    ProvenanceError,
    SchurScopeError,
    SingularFactorError,
)
from utils.helpers import complex_to_pairs, matrix_to_pairs, random_schur_entries

# Campaign shapes for the randomized verification.
SUITE_MAX_SUPPORT = 16
SUITE_MAX_MODULUS = 0.95
CROSS_CHECK_SIZE = 6
CROSS_CHECK_TRIALS = 50
CROSS_CHECK_MAX_SUPPORT = 8
ROUND_TRIP_ORDER = 32
ROUND_TRIP_MAX_SUPPORT = 6
ROUND_TRIP_MAX_MODULUS = 0.9


def failure_exit_code(error: Exception) -> int:
    """Exit code for a failed workflow: 4 for numerical degeneracy, 3 for bad input, 5 otherwise."""
    if isinstance(error, (DegenerateMeasureError, SingularFactorError, InvariantViolationError)):
        return 4
    if isinstance(error, (SchurScopeError, ValidationError)):
        return 3
    return 5


class PipelineManager:
    """Manager for the gamma, theta, lmatrix, verify, diagnose and riesz workflows."""

    def __init__(self):
        """Initialize the pipeline manager."""
        self.ingest = get_ingest_service()
        self.sequences = get_sequence_service()
        self.transforms = get_transform_service()
        self.lmatrix = get_lmatrix_service()
        self.exporter = get_export_service()
        self.sweeps = get_sweep_analyzer()
        self.verdicts = get_verdict_analyzer()

        logger.info("Pipeline Manager initialized with all services")

    @staticmethod
    def _new_results(workflow: str) -> Dict[str, Any]:
        return {
            "workflow": workflow,
            "status": "in_progress",
            "steps": {},
            "errors": [],
            "output": None,
            "files": [],
            "exit_code": None
        }

    @staticmethod
    def _fail(results: Dict[str, Any], error: Exception) -> Dict[str, Any]:
        logger.error(f"Error in {results['workflow']} workflow: {error}")
        results["status"] = "failed"
        results["errors"].append(f"{type(error).__name__}: {error}")
        results["exit_code"] = failure_exit_code(error)
        return results

    @staticmethod
    def _out_path(config: RunConfig, name: str) -> Optional[str]:
        return os.path.join(config.out, name) if config.out else None

    @staticmethod
    def _stamp(
        output: Dict[str, Any],
        config: RunConfig,
        digest: Optional[str] = None
    ) -> Dict[str, Any]:
        """Embed the run config, tool version and input digest in an output."""
        output["config"] = config.model_dump(mode="json")
        output["tool_version"] = settings.app_version
        if digest is not None:
            output["input_digest"] = digest
        return output

    def _parameters(
        self,
        source: ResolvedInput,
        config: RunConfig
    ) -> Tuple[SchurParams, Optional[float]]:
        """
        Schur parameters of any source.

        Moments go through Phi and theta to the Schur algorithm and are
        cross-checked against the Levinson recursion.
        """
        if source.gamma is not None:
            return source.gamma, None
        if source.theta is not None:
            return self.transforms.schur_algorithm(source.theta), None

        moments = source.moments
        phi = self.transforms.herglotz_from_moments(moments)
        theta = self.transforms.schur_from_caratheodory(phi)
        gamma = self.transforms.schur_algorithm(theta)
        window = min(settings.quadruple_check_order, moments.order - 1)
        discrepancy = self.transforms.quadruple_discrepancy(moments, window)
        if discrepancy > config.tolerances.tol_quadruple:
            raise ProvenanceError(
                f"Levinson and Schur-path parameters disagree by {discrepancy:.3e} "
                f"(tolerance {config.tolerances.tol_quadruple:.1e})"
            )
        return gamma, discrepancy

    def _moments(self, source: ResolvedInput, config: RunConfig) -> MomentSequence:
        """Moments of any source; parameters are pushed through theta and Phi."""
        if source.moments is not None:
            return source.moments
        gamma, _ = self._parameters(source, config)
        theta = self.transforms.inverse_schur(gamma, config.order - 1)
        phi = self.transforms.caratheodory_from_schur(theta)
        return self.transforms.moments_from_caratheodory(phi)

    def execute_gamma_workflow(
        self,
        spec: SourceSpec,
        config: RunConfig
    ) -> Dict[str, Any]:
        """
        Compute Schur parameters from any source.

        Workflow steps:
        1. Resolve the source
        2. Schur parameters (with the Levinson cross-check for moments)
        3. Write the parameter file

        Args:
            spec: Source flags
            config: Run configuration

        Returns:
            Workflow results; ``output`` holds the parameter JSON
        """
        results = self._new_results("gamma")
        try:
            logger.info("Step 1/3: Resolving input")
            source = self.ingest.resolve(spec, config)
            results["steps"]["ingest"] = {"status": "completed", "kind": source.kind.value}

            logger.info("Step 2/3: Schur parameters")
            gamma, discrepancy = self._parameters(source, config)
            results["steps"]["parameters"] = {"status": "completed", "count": gamma.size}

            logger.info("Step 3/3: Writing output")
            output = self._stamp(gamma.to_json_dict(), config, source.digest)
            if discrepancy is not None:
                output["levinson_discrepancy"] = discrepancy
            path = self._out_path(config, "gamma.json")
            if path:
                results["files"].append(self.exporter.write_json(output, path))

            results["output"] = output
            results["status"] = "completed"
            results["exit_code"] = 0
            return results
        except Exception as e:
            return self._fail(results, e)

    def execute_theta_workflow(
        self,
        spec: SourceSpec,
        config: RunConfig
    ) -> Dict[str, Any]:
        """
        Rebuild theta, Phi and the moments from Schur parameters.

        Workflow steps:
        1. Resolve the source
        2. Schur parameters
        3. Inverse Schur algorithm and Herglotz transforms
        """
        results = self._new_results("theta")
        try:
            logger.info("Step 1/3: Resolving input")
            source = self.ingest.resolve(spec, config)
            results["steps"]["ingest"] = {"status": "completed", "kind": source.kind.value}

            logger.info("Step 2/3: Schur parameters")
            gamma, _ = self._parameters(source, config)
            results["steps"]["parameters"] = {"status": "completed", "count": gamma.size}

            logger.info("Step 3/3: theta, Phi and moments")
            theta = self.transforms.inverse_schur(gamma, config.order - 1)
            phi = self.transforms.caratheodory_from_schur(theta)
            moments = self.transforms.moments_from_caratheodory(phi)
            output = {
                "gamma": gamma.to_json_dict(),
                "theta": complex_to_pairs(theta.coeffs),
                "phi": complex_to_pairs(phi.coeffs),
                "moments": complex_to_pairs(moments.moments)
            }
            self._stamp(output, config, source.digest)
            path = self._out_path(config, "theta.json")
            if path:
                results["files"].append(self.exporter.write_json(output, path))

            results["output"] = output
            results["status"] = "completed"
            results["exit_code"] = 0
            return results
        except Exception as e:
            return self._fail(results, e)

    def execute_lmatrix_workflow(
        self,
        spec: SourceSpec,
        config: RunConfig,
        n: int,
        which: str = "L"
    ) -> Dict[str, Any]:
        """
        Dump L_n(gamma) or M_n(gamma).

        Workflow steps:
        1. Resolve the source
        2. Build the matrix (and the direct-route cross-check when affordable)
        3. Write the matrix
        """
        results = self._new_results("lmatrix")
        try:
            logger.info("Step 1/3: Resolving input")
            source = self.ingest.resolve(spec, config)
            gamma, _ = self._parameters(source, config)
            results["steps"]["ingest"] = {"status": "completed", "kind": source.kind.value}

            logger.info(f"Step 2/3: Building {which}_{n}")
            output: Dict[str, Any] = {"n": n, "which": which}
            if which.upper() == "M":
                matrix = self.lmatrix.m_matrix(gamma, n)
            else:
                matrix = self.lmatrix.l_matrix_product(gamma, n)
                if n - 1 <= settings.brute_force_cap:
                    direct = self.lmatrix.l_matrix_direct(gamma, n)
                    output["direct_discrepancy"] = spectral_norm(direct - matrix)
            self._stamp(output, config, source.digest)
            results["steps"]["matrix"] = {"status": "completed"}

            logger.info("Step 3/3: Writing output")
            as_csv = config.output_format == OutputFormat.CSV
            stem = f"{which.upper()}_{n}"
            path = self._out_path(config, f"{stem}.{'csv' if as_csv else 'json'}")
            if path and as_csv:
                results["files"].append(self.exporter.write_matrix(matrix, path, True))
                results["files"].append(
                    self.exporter.write_json(output, self._out_path(config, f"{stem}.meta.json"))
                )
            elif path:
                results["files"].append(self.exporter.write_matrix(matrix, path, False, output))
            output["matrix"] = matrix_to_pairs(matrix)

            results["output"] = output
            results["status"] = "completed"
            results["exit_code"] = 0
            return results
        except Exception as e:
            return self._fail(results, e)

    def _parallel(self, task: Callable[[Any], Any], items: Sequence[Any], workers: int) -> List[Any]:
        if workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(task, items))
        return [task(item) for item in items]

    def _draw(self, rng: np.random.Generator, count: int, max_support: int, max_modulus: float):
        draws = []
        for _ in range(count):
            support = int(rng.integers(1, max_support + 1))
            draws.append(SchurParams(gamma=random_schur_entries(rng, support, max_modulus)))
        return draws

    def run_verification(self, config: RunConfig, trials: int, n: int) -> VerificationSummary:
        """
        Randomized identity campaign.

        Covers the identity suite, the direct-vs-product agreement of L_n,
        Schur round trips and Carathéodory round trips. All draws are made
        up front from ``config.seed`` so results do not depend on workers.
        """
        rng = np.random.default_rng(config.seed)
        suite_draws = self._draw(rng, trials, SUITE_MAX_SUPPORT, SUITE_MAX_MODULUS)
        cross_draws = self._draw(
            rng, min(trials, CROSS_CHECK_TRIALS), CROSS_CHECK_MAX_SUPPORT, SUITE_MAX_MODULUS
        )
        trip_draws = self._draw(rng, trials, ROUND_TRIP_MAX_SUPPORT, ROUND_TRIP_MAX_MODULUS)
        cross_n = min(n, CROSS_CHECK_SIZE)

        suites = self._parallel(lambda g: self.lmatrix.identity_suite(g, n), suite_draws, config.workers)

        def cross(gamma: SchurParams) -> float:
            direct = self.lmatrix.l_matrix_direct(gamma, cross_n)
            return spectral_norm(direct - self.lmatrix.l_matrix_product(gamma, cross_n))

        def round_trips(gamma: SchurParams) -> Tuple[float, float]:
            theta = self.transforms.inverse_schur(gamma, ROUND_TRIP_ORDER)
            back = self.transforms.schur_algorithm(theta, max_order=gamma.size - 1)
            schur_gap = float(np.max(np.abs(back.gamma - gamma.gamma)))
            phi = self.transforms.caratheodory_from_schur(theta)
            theta_back = self.transforms.schur_from_caratheodory(phi)
            carath_gap = float(np.max(np.abs(theta_back.coeffs - theta.coeffs)))
            return schur_gap, carath_gap

        crosses = self._parallel(cross, cross_draws, config.workers)
        trips = self._parallel(round_trips, trip_draws, config.workers)

        maxima: Dict[str, float] = {}
        for suite in suites:
            for name, value in suite.as_dict().items():
                maxima[name] = max(maxima.get(name, 0.0), value)
        maxima["direct_vs_product"] = max(crosses, default=0.0)
        maxima["schur_round_trip"] = max((t[0] for t in trips), default=0.0)
        maxima["caratheodory_round_trip"] = max((t[1] for t in trips), default=0.0)

        tolerance = config.tolerances.tol_identity
        failures = sorted(name for name, value in maxima.items() if value > tolerance)
        for name in failures:
            logger.warning(f"{name} residual {maxima[name]:.3e} exceeds {tolerance:.1e}")

        return VerificationSummary(
            trials=trials,
            n=n,
            seed=config.seed,
            tolerance=tolerance,
            max_residuals=maxima,
            failures=failures
        )

    def execute_verify_workflow(
        self,
        config: RunConfig,
        trials: int,
        n: int
    ) -> Dict[str, Any]:
        """
        Run the randomized identity campaign.

        Workflow steps:
        1. Identity campaign
        2. Write the summary
        """
        results = self._new_results("verify")
        try:
            logger.info(f"Step 1/2: Identity campaign ({trials} trials, n={n}, seed={config.seed})")
            summary = self.run_verification(config, trials, n)
            results["steps"]["campaign"] = {"status": "completed", "passes": summary.passes}

            logger.info("Step 2/2: Writing output")
            output = self._stamp(summary.model_dump(mode="json"), config)
            output["passes"] = summary.passes
            path = self._out_path(config, "verify.json")
            if path:
                results["files"].append(self.exporter.write_json(output, path))

            results["output"] = output
            results["status"] = "completed"
            results["exit_code"] = 0 if summary.passes else 1
            return results
        except Exception as e:
            return self._fail(results, e)

    def execute_diagnose_workflow(
        self,
        spec: SourceSpec,
        config: RunConfig
    ) -> Dict[str, Any]:
        """
        Full Helson-Szegő diagnosis.

        Workflow steps:
        1. Resolve the source
        2. Decision ladder and evidence sweeps
        3. Write the report (and sweep CSVs)

        Returns:
            Workflow results; ``exit_code`` follows the verdict
        """
        results = self._new_results("diagnose")
        try:
            logger.info("Step 1/3: Resolving input")
            source = self.ingest.resolve(spec, config)
            results["steps"]["ingest"] = {"status": "completed", "kind": source.kind.value}

            logger.info("Step 2/3: Decision ladder")
            gamma = source.gamma
            if gamma is None and source.theta is not None:
                gamma = self.transforms.schur_algorithm(source.theta)
            report = self.verdicts.hsz_verdict(
                gamma=gamma,
                moments=source.moments,
                config=config,
                input_kind=source.kind.value,
                input_description=source.description,
                input_digest=source.digest
            )
            results["steps"]["verdict"] = {"status": "completed", "verdict": report.verdict.value}

            logger.info("Step 3/3: Writing report")
            if config.out:
                results["files"].append(
                    self.exporter.write_json(report, os.path.join(config.out, "report.json"))
                )
                if config.output_format == OutputFormat.CSV:
                    sweeps = {
                        "sigma_sweep": report.sigma_sweep,
                        "riesz_sweep": report.riesz_sweep,
                        "conjugation_sweep": report.conjugation_sweep,
                        "oblique_sweep": report.oblique_sweep,
                    }
                    for name, points in sweeps.items():
                        if points:
                            results["files"].append(self.exporter.write_sweep_csv(
                                points, os.path.join(config.out, f"{name}.csv")
                            ))

            results["output"] = report.model_dump(mode="json")
            results["report"] = report
            results["status"] = "completed"
            results["exit_code"] = report.verdict.exit_code
            return results
        except Exception as e:
            return self._fail(results, e)

    def execute_riesz_workflow(
        self,
        spec: SourceSpec,
        config: RunConfig
    ) -> Dict[str, Any]:
        """
        Moment-side sweeps: Riesz, conjugation and oblique projection norms.

        Workflow steps:
        1. Resolve the source and its moments
        2. Sweeps
        3. Write the sweeps
        """
        results = self._new_results("riesz")
        try:
            logger.info("Step 1/3: Resolving input")
            source = self.ingest.resolve(spec, config)
            moments = self._moments(source, config)
            results["steps"]["ingest"] = {"status": "completed", "kind": source.kind.value}

            logger.info("Step 2/3: Moment-side sweeps")
            sweeps = {
                "riesz_sweep": self.sweeps.riesz_sweep(moments, config.sweep_sizes, config.workers),
                "conjugation_sweep": self.sweeps.conjugation_sweep(moments, config.sweep_sizes, config.workers),
                "oblique_sweep": self.sweeps.oblique_sweep(moments, config.sweep_sizes, config.workers),
            }
            results["steps"]["sweeps"] = {"status": "completed"}

            logger.info("Step 3/3: Writing output")
            output: Dict[str, Any] = {
                name: [p.model_dump() for p in points] for name, points in sweeps.items()
            }
            self._stamp(output, config, source.digest)
            if config.out:
                if config.output_format == OutputFormat.CSV:
                    for name, points in sweeps.items():
                        results["files"].append(self.exporter.write_sweep_csv(
                            points, os.path.join(config.out, f"{name}.csv")
                        ))
                    results["files"].append(self.exporter.write_json(
                        output, os.path.join(config.out, "riesz.meta.json")
                    ))
                else:
                    results["files"].append(
                        self.exporter.write_json(output, os.path.join(config.out, "riesz.json"))
                    )

            results["output"] = output
            results["status"] = "completed"
            results["exit_code"] = 0
            return results
        except Exception as e:
            return self._fail(results, e)


# Singleton instance
_pipeline_manager = None


def get_pipeline_manager() -> PipelineManager:
    """Get or create pipeline manager instance."""
    global _pipeline_manager
    if _pipeline_manager is None:
        _pipeline_manager = PipelineManager()
    return _pipeline_manager
