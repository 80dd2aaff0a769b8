"""
Sweep Analyzer.

Collects finite-section evidence over a ladder of sizes: the smallest
singular value of L_n on the parameter side and the Riesz, conjugation
and oblique projection norms on the moment side.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

import scipy.linalg
from loguru import logger

from config.settings import settings
from models.reports import SweepPoint
from models.sequences import MomentSequence, SchurParams
from services.lmatrix_service import get_lmatrix_service, smallest_singular_value
from services.oracle_service import get_moment_oracle_service
from utils.exceptions import InvariantViolationError

# Relative slack allowed when checking that the Riesz sweep never decreases.
MONOTONE_SLACK = 1e-8


class SweepAnalyzer:
    """Evaluates section-size sweeps, serially or on a thread pool."""

    def __init__(self):
        """Initialize the sweep analyzer."""
        self.lmatrix = get_lmatrix_service()
        self.oracles = get_moment_oracle_service()
        logger.info("Sweep Analyzer initialized")

    def _map(
        self,
        evaluate: Callable[[int], float],
        sizes: Sequence[int],
        workers: Optional[int]
    ) -> List[SweepPoint]:
        count = settings.workers if workers is None else workers
        if count > 1 and len(sizes) > 1:
            with ThreadPoolExecutor(max_workers=count) as pool:
                values = list(pool.map(evaluate, sizes))
        else:
            values = [evaluate(n) for n in sizes]
        return [SweepPoint(n=n, value=v) for n, v in zip(sizes, values)]

    def sigma_min_sweep(
        self,
        gamma: SchurParams,
        sizes: Sequence[int],
        workers: Optional[int] = None
    ) -> List[SweepPoint]:
        """
        sigma_min(L_n(gamma)*) for each n in ``sizes``.

        Args:
            gamma: Truncated Schur parameters
            sizes: Ascending section sizes
            workers: Thread count (defaults to settings.workers)

        Returns:
            Sweep points in the order of ``sizes``
        """
        logger.info(f"sigma_min sweep over n = {list(sizes)}")

        def evaluate(n: int) -> float:
            return smallest_singular_value(self.lmatrix.l_matrix_product(gamma, n))

        return self._map(evaluate, sizes, workers)

    def usable_sizes(self, moments: MomentSequence, sizes: Sequence[int]) -> List[int]:
        """Sizes n with 2n within the available moments; the rest are skipped."""
        usable = [n for n in sizes if 2 * n <= moments.order]
        skipped = [n for n in sizes if 2 * n > moments.order]
        if skipped:
            logger.warning(
                f"Skipping n = {skipped}: moments only reach m_{moments.order}"
            )
        return usable

    def riesz_sweep(
        self,
        moments: MomentSequence,
        sizes: Sequence[int],
        workers: Optional[int] = None
    ) -> List[SweepPoint]:
        """
        Riesz projection norms on growing sections.

        The sections are nested, so the norms cannot decrease; a decrease
        beyond round-off raises InvariantViolationError.
        """
        usable = self.usable_sizes(moments, sizes)
        logger.info(f"Riesz sweep over n = {usable}")
        points = self._map(
            lambda n: self.oracles.riesz_finite_section_norm(moments, n), usable, workers
        )
        for previous, current in zip(points, points[1:]):
            if current.value < previous.value * (1.0 - MONOTONE_SLACK):
                raise InvariantViolationError(
                    f"Riesz sweep decreased from {previous.value!r} (n={previous.n}) "
                    f"to {current.value!r} (n={current.n})"
                )
        return points

    def conjugation_sweep(
        self,
        moments: MomentSequence,
        sizes: Sequence[int],
        workers: Optional[int] = None
    ) -> List[SweepPoint]:
        """Harmonic conjugation norms on growing sections."""
        usable = self.usable_sizes(moments, sizes)
        return self._map(lambda n: self.oracles.conjugation_ratio(moments, n), usable, workers)

    def oblique_sweep(
        self,
        moments: MomentSequence,
        sizes: Sequence[int],
        workers: Optional[int] = None
    ) -> List[SweepPoint]:
        """Oblique projection norms on growing sections."""
        usable = self.usable_sizes(moments, sizes)
        return self._map(
            lambda n: self.oracles.oblique_projection_norm(moments, n), usable, workers
        )

    def epsilon_evidence(
        self,
        gamma: SchurParams,
        n: int,
        terms: Optional[int] = None
    ) -> float:
        """
        lambda_max of the partial defect series at size n.

        The defect operator satisfies lambda_max(I - L L*) = 1 - sigma_min(L)^2;
        a mismatch beyond tol_identity raises InvariantViolationError.

        Args:
            gamma: Truncated Schur parameters
            n: Section size
            terms: Series terms (defaults to support + 1)

        Returns:
            lambda_max of the partial sum, read as 1 - epsilon
        """
        count = gamma.support + 1 if terms is None else terms
        series = self.lmatrix.defect_series(gamma, n, count)
        sigma = smallest_singular_value(self.lmatrix.l_matrix_product(gamma, n))
        gap = abs(series.lambda_max - (1.0 - sigma ** 2))
        if gap > settings.tol_identity:
            raise InvariantViolationError(
                f"lambda_max(I - L L*) differs from 1 - sigma_min^2 by {gap:.3e} at n={n}"
            )
        partial_max = float(scipy.linalg.eigvalsh(series.partial_sum)[-1])
        logger.debug(f"epsilon evidence at n={n}: lambda_max = {partial_max:.6f}")
        return partial_max


# Singleton instance
_sweep_analyzer = None


def get_sweep_analyzer() -> SweepAnalyzer:
    """Get or create sweep analyzer instance."""
    global _sweep_analyzer
    if _sweep_analyzer is None:
        _sweep_analyzer = SweepAnalyzer()
    return _sweep_analyzer
