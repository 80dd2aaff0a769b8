"""
Verdict Analyzer.

Decides whether a measure is a Helson-Szegő measure from a strong Szegő
certificate, necessary-condition checks and sweep trends.
"""
from typing import List, Optional

import numpy as np
from loguru import logger

from analyzers.sweep_analyzer import get_sweep_analyzer
from config.settings import settings
from models.reports import (
    DiagnosticReport, Provenance, RunConfig, StrongSzegoCertificate, SweepPoint, Verdict
)
from models.sequences import MomentSequence, SchurParams
from services.sequence_service import get_sequence_service
from services.transform_service import GAMMA_CONVENTION, get_transform_service
from utils.exceptions import (
    DegenerateMeasureError, InconsistentInputError, InvariantViolationError, ProvenanceError
)
from utils.helpers import digest_payload, loglog_slope

EVIDENCE_NOTICE = (
    "Sweep-based verdicts are numerical evidence from finite sections, not a proof."
)

# Largest series order used for the Szegő identity cross-check.
MAX_THETA_ORDER = 256


class VerdictAnalyzer:
    """Runs the decision ladder and assembles the diagnostic report."""

    def __init__(self):
        """Initialize the verdict analyzer."""
        self.sequences = get_sequence_service()
        self.transforms = get_transform_service()
        self.sweeps = get_sweep_analyzer()
        logger.info("Verdict Analyzer initialized")

    def strong_szego_certificate(self, gamma: SchurParams) -> StrongSzegoCertificate:
        """
        Certificate C = prod_{k>=1} prod_{j>=k} D_{gamma_j} >= c_min.

        C^2 is the Szegő product of the sequence. A truncated input only
        qualifies when its last quarter carries less than tail_share_max of
        sum k |gamma_k|^2.

        Args:
            gamma: Truncated Schur parameters

        Returns:
            StrongSzegoCertificate
        """
        stats = self.sequences.class_stats(gamma)
        c_bound = float(np.sqrt(stats.szego_product))
        tail_share = self.sequences.strong_szego_tail_share(gamma)
        tail_ok = tail_share < settings.tail_share_max

        reason = ""
        if gamma.terminal_unimodular:
            reason = "terminal unimodular parameter"
        elif c_bound < settings.c_min:
            reason = f"C = {c_bound:.3e} below c_min = {settings.c_min:.1e}"
        elif not tail_ok:
            reason = (
                f"last quarter carries {tail_share:.1%} of sum k|gamma_k|^2; "
                f"truncation may hide a divergent tail"
            )

        return StrongSzegoCertificate(
            passes=not reason,
            strong_szego_sum=stats.strong_szego_sum,
            szego_product=stats.szego_product,
            c_bound=c_bound,
            tail_share=tail_share,
            tail_check_passed=tail_ok,
            reason=reason
        )

    def _derive_gamma(
        self,
        gamma: Optional[SchurParams],
        moments: Optional[MomentSequence],
        notes: List[str]
    ):
        """Parameters to analyze and the Levinson/Schur discrepancy."""
        if moments is None:
            return gamma, None

        window = min(settings.quadruple_check_order, moments.order - 1)
        try:
            derived = self.transforms.levinson_verblunsky(moments)
        except DegenerateMeasureError as e:
            derived = self.transforms.schur_path_parameters(moments)
            if not derived.terminal_unimodular:
                raise
            logger.warning(
                f"Levinson recursion stopped at order {e.order_reached}; "
                f"continuing with the terminal Schur-path parameters"
            )
            notes.append(
                f"Toeplitz sections are singular from order {e.order_reached}; "
                f"parameters taken from the Schur algorithm"
            )
        if gamma is not None:
            upto = min(window + 1, gamma.size, derived.size)
            gap = float(np.max(np.abs(gamma.gamma[:upto] - derived.gamma[:upto]), initial=0.0))
            if gap > settings.tol_quadruple:
                raise ProvenanceError(
                    f"Parameters and moments describe different measures "
                    f"(max gap {gap:.3e} over the first {upto} entries)"
                )
            return gamma, gap

        gap = self.transforms.quadruple_discrepancy(moments, window)
        if gap > settings.tol_quadruple:
            logger.warning(f"Levinson and Schur-path parameters differ by {gap:.3e}")
            notes.append(f"Levinson and Schur-path parameters differ by {gap:.3e}")
        return derived, gap

    @staticmethod
    def _values(points: List[SweepPoint]) -> List[float]:
        return [p.value for p in points]

    def _slope(self, points: List[SweepPoint]) -> Optional[float]:
        if len(points) < 2:
            return None
        return loglog_slope([p.n for p in points], self._values(points))

    @staticmethod
    def _plateaued(points: List[SweepPoint]) -> bool:
        if len(points) < 2:
            return False
        last, previous = points[-1].value, points[-2].value
        return abs(last - previous) <= settings.plateau_tolerance * abs(previous)

    def hsz_verdict(
        self,
        gamma: Optional[SchurParams] = None,
        moments: Optional[MomentSequence] = None,
        config: Optional[RunConfig] = None,
        input_kind: str = "gamma",
        input_description: str = "",
        input_digest: Optional[str] = None
    ) -> DiagnosticReport:
        """
        Decide the Helson-Szegő property of a measure.

        Ladder: necessary-condition violations first, then the strong Szegő
        certificate, then the sigma_min trend backed by the Riesz sweep.

        Args:
            gamma: Schur parameters (optional when moments are given)
            moments: Moments (optional when gamma is given)
            config: Run configuration
            input_kind: Source kind recorded in provenance
            input_description: Human-readable source
            input_digest: Digest of the source (computed when absent)

        Returns:
            DiagnosticReport
        """
        if gamma is None and moments is None:
            raise InconsistentInputError("Diagnosis needs parameters or moments")
        config = config or RunConfig()
        notes: List[str] = []

        gamma, discrepancy = self._derive_gamma(gamma, moments, notes)
        if input_digest is None:
            payload = {"gamma": gamma.to_json_dict()}
            if moments is not None:
                payload["moments"] = moments.to_json_dict()
            input_digest = digest_payload(payload)

        provenance = Provenance(
            input_kind=input_kind,
            input_description=input_description,
            input_digest=input_digest,
            truncation_order=gamma.size,
            tolerances=config.tolerances,
            config=config.model_dump(mode="json"),
            seed=config.seed,
            gamma_convention=GAMMA_CONVENTION,
            quadruple_discrepancy=discrepancy
        )
        stats = self.sequences.class_stats(gamma)

        # Step 1: necessary conditions
        if gamma.terminal_unimodular:
            notes.append(
                "Terminal unimodular parameter: the measure is finitely supported "
                "and has no absolutely continuous part"
            )
            logger.info("Verdict: necessary condition violated (terminal parameter)")
            return DiagnosticReport(
                verdict=Verdict.NOT_HS_NECESSARY_VIOLATION,
                class_stats=stats,
                notes=notes,
                provenance=provenance
            )

        l2_share = self.sequences.l2_tail_share(gamma)
        if l2_share > settings.l2_tail_share_max:
            notes.append(
                f"sum |gamma_k|^2 is not settling: the last quarter carries {l2_share:.1%}"
            )
            logger.info("Verdict: necessary condition violated (l2 tail)")
            return DiagnosticReport(
                verdict=Verdict.NOT_HS_NECESSARY_VIOLATION,
                class_stats=stats,
                notes=notes,
                provenance=provenance
            )

        # Step 2: evidence
        certificate = self.strong_szego_certificate(gamma)
        sizes = config.sweep_sizes
        sigma = self.sweeps.sigma_min_sweep(gamma, sizes, config.workers)
        sigma_values = self._values(sigma)
        sigma_inf = float(min(sigma_values))
        sigma_slope = self._slope(sigma)
        epsilon = self.sweeps.epsilon_evidence(gamma, sizes[-1])

        riesz: List[SweepPoint] = []
        conj: List[SweepPoint] = []
        oblique: List[SweepPoint] = []
        if moments is not None:
            riesz = self.sweeps.riesz_sweep(moments, sizes, config.workers)
            conj = self.sweeps.conjugation_sweep(moments, sizes, config.workers)
            oblique = self.sweeps.oblique_sweep(moments, sizes, config.workers)
        riesz_slope = self._slope(riesz)

        theta_order = min(max(4 * gamma.size, 32), MAX_THETA_ORDER)
        theta = self.transforms.inverse_schur(gamma, theta_order)
        szego = self.transforms.szego_identity_residual(
            gamma, theta, quad_points=config.quad_points
        )

        # Step 3: decision
        if certificate.passes:
            verdict = Verdict.CERTIFIED_HS
            if sigma_inf < certificate.c_bound - 1e-8:
                logger.error(
                    f"sigma_min {sigma_inf:.6f} fell below the certified bound "
                    f"{certificate.c_bound:.6f}"
                )
                raise InvariantViolationError(
                    f"sigma_min sweep reached {sigma_inf:.6e}, below the certified "
                    f"lower bound C = {certificate.c_bound:.6e}"
                )
        else:
            notes.append(f"Strong Szegő certificate not available: {certificate.reason}")
            decaying = sigma_slope is not None and sigma_slope < -settings.slope_cutoff
            flat = sigma_inf >= settings.epsilon_min and (
                sigma_slope is None or sigma_slope >= -settings.slope_cutoff
            )
            riesz_plateau = self._plateaued(riesz)
            riesz_growing = (
                riesz_slope is not None
                and riesz_slope > settings.slope_cutoff
                and not riesz_plateau
            )

            if flat and not riesz_growing:
                verdict = Verdict.LIKELY_HS
            elif decaying and not riesz_plateau:
                verdict = Verdict.LIKELY_NOT_HS
            else:
                verdict = Verdict.INCONCLUSIVE
                if decaying and riesz_plateau:
                    notes.append("sigma_min decays while the Riesz sweep plateaus")
                elif flat and riesz_growing:
                    notes.append("sigma_min stays flat while the Riesz sweep grows")
            notes.append(EVIDENCE_NOTICE)

        logger.info(f"Verdict: {verdict.value}")
        return DiagnosticReport(
            verdict=verdict,
            sigma_sweep=sigma,
            sigma_inf=sigma_inf,
            sigma_slope=sigma_slope,
            riesz_sweep=riesz,
            riesz_slope=riesz_slope,
            conjugation_sweep=conj,
            oblique_sweep=oblique,
            strong_szego=certificate,
            szego_identity_residual=szego.residual,
            szego_identity_singular=szego.singular,
            epsilon_evidence=epsilon,
            class_stats=stats,
            notes=notes,
            provenance=provenance
        )


# Singleton instance
_verdict_analyzer = None


def get_verdict_analyzer() -> VerdictAnalyzer:
    """Get or create verdict analyzer instance."""
    global _verdict_analyzer
    if _verdict_analyzer is None:
        _verdict_analyzer = VerdictAnalyzer()
    return _verdict_analyzer
