"""
Elementary operations on Schur parameter sequences.
"""
import numpy as np
from loguru import logger

from config.settings import settings
from models.reports import ClassStats, TailProduct
from models.sequences import SchurParams
from utils.exceptions import InvalidParameterError


class SequenceService:
    """Defects, tail products, coshifts and class statistics."""

    def __init__(self):
        """Initialize the sequence service."""
        logger.info("Sequence service initialized")

    def defect(self, g: complex) -> float:
        """
        Defect D_g = sqrt(1 - |g|^2).

        Args:
            g: Complex number with |g| <= 1

        Returns:
            D_g in [0, 1]
        """
        modulus = abs(g)
        if modulus > 1.0 + settings.tol_unimodular:
            raise InvalidParameterError(f"Defect undefined for |g| = {modulus!r} > 1")
        return float(np.sqrt(max(0.0, 1.0 - modulus * modulus)))

    def defects(self, gamma: SchurParams, start: int, stop: int) -> np.ndarray:
        """Defects of gamma_start..gamma_{stop-1} (zero-extended entries give 1)."""
        window = gamma.window(start, stop)
        return np.sqrt(np.clip(1.0 - np.abs(window) ** 2, 0.0, None))

    def _log_defects(self, gamma: SchurParams) -> np.ndarray:
        # log D_j = 0.5 * log1p(-|gamma_j|^2); -inf on the terminal entry
        with np.errstate(divide="ignore"):
            return 0.5 * np.log1p(-np.minimum(np.abs(gamma.gamma) ** 2, 1.0))

    def tail_product(self, gamma: SchurParams, k: int) -> TailProduct:
        """
        Tail product prod_{j>=k} D_{gamma_j}.

        Args:
            gamma: Schur parameters
            k: First index of the tail

        Returns:
            TailProduct, degenerate (value 0) when a terminal entry is in the tail
        """
        if k < 0:
            raise InvalidParameterError(f"Tail index must be non-negative, got {k}")

        terminal = gamma.terminal_index
        if terminal is not None and terminal >= k:
            return TailProduct(value=0.0, degenerate=True)
        if k >= gamma.size:
            return TailProduct(value=1.0)

        count = gamma.size - k
        if count > settings.log_space_threshold:
            value = float(np.exp(np.sum(self._log_defects(gamma)[k:])))
        else:
            value = float(np.prod(self.defects(gamma, k, gamma.size)))
        return TailProduct(value=min(value, 1.0))

    def tail_products(self, gamma: SchurParams, count: int) -> np.ndarray:
        """
        Vector of tail products Pi_0..Pi_{count-1}.

        Computed from suffix sums of log-defects; zero up to a terminal index.
        """
        out = np.ones(count, dtype=float)
        if gamma.size == 0 or count == 0:
            return out
        logs = self._log_defects(gamma)
        suffix = np.cumsum(logs[::-1])[::-1]
        upto = min(count, gamma.size)
        out[:upto] = np.exp(suffix[:upto])
        terminal = gamma.terminal_index
        if terminal is not None:
            out[:min(terminal + 1, count)] = 0.0
        return out

    def coshift(self, gamma: SchurParams, m: int) -> SchurParams:
        """
        Coshift W^m gamma = (gamma_m, gamma_{m+1}, ...).

        Args:
            gamma: Schur parameters
            m: Shift amount

        Returns:
            Shifted sequence; the terminal flag survives while the terminal entry does
        """
        if m < 0:
            raise InvalidParameterError(f"Coshift amount must be non-negative, got {m}")
        tail = np.array(gamma.gamma[m:])
        horizon = None
        if gamma.trust_horizon is not None and gamma.trust_horizon >= m:
            horizon = gamma.trust_horizon - m
        return SchurParams(
            gamma=tail,
            terminal_unimodular=gamma.terminal_unimodular and tail.size > 0,
            trust_horizon=horizon
        )

    def class_stats(self, gamma: SchurParams) -> ClassStats:
        """
        l2 membership, strong Szegő sum and Szegő product of a sequence.

        The Szegő product prod_{k>=1} prod_{j>=k} (1 - |gamma_j|^2) equals
        prod_j (1 - |gamma_j|^2)^j and is zero for a terminal sequence.
        """
        squares = np.abs(gamma.gamma) ** 2
        index = np.arange(gamma.size, dtype=float)
        l2_norm_sq = float(np.sum(squares))
        strong_sum = float(np.sum(index * squares))

        if gamma.terminal_unimodular:
            product = 0.0
        else:
            product = float(np.exp(np.sum(index * np.log1p(-squares))))

        return ClassStats(
            in_l2=not gamma.terminal_unimodular,
            l2_norm_sq=l2_norm_sq,
            strong_szego_sum=strong_sum,
            szego_product=min(product, 1.0)
        )

    def _tail_share(self, weights: np.ndarray) -> float:
        size = weights.size
        if size < settings.min_tail_entries:
            return 0.0
        total = float(np.sum(weights))
        if total <= 0.0:
            return 0.0
        start = size - max(1, size // 4)
        return float(np.sum(weights[start:]) / total)

    def l2_tail_share(self, gamma: SchurParams) -> float:
        """Share of sum |gamma_k|^2 carried by the last quarter of the stored entries."""
        return self._tail_share(np.abs(gamma.gamma) ** 2)

    def strong_szego_tail_share(self, gamma: SchurParams) -> float:
        """Share of sum k |gamma_k|^2 carried by the last quarter of the stored entries."""
        index = np.arange(gamma.size, dtype=float)
        return self._tail_share(index * np.abs(gamma.gamma) ** 2)


# Singleton instance
_sequence_service = None


def get_sequence_service() -> SequenceService:
    """Get or create sequence service instance."""
    global _sequence_service
    if _sequence_service is None:
        _sequence_service = SequenceService()
    return _sequence_service
