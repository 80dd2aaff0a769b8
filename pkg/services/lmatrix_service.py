"""
Finite sections of the lower-triangular operator L(gamma) built from
Schur parameters, its factors M_n and the rank-one defect identities.
"""
import numpy as np
import scipy.linalg
from loguru import logger

from config.settings import settings
from models.reports import DefectSeries, IdentityResiduals
from models.sequences import DenseComplexMatrix, SchurParams
from services.sequence_service import get_sequence_service
from utils.exceptions import BruteForceCapError, InvalidParameterError, SingularFactorError
from utils.helpers import compositions


def spectral_norm(matrix: np.ndarray) -> float:
    """Largest singular value (0 for an empty matrix)."""
    if matrix.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(matrix)[0])


def smallest_singular_value(matrix: np.ndarray) -> float:
    """Smallest singular value of a square matrix."""
    return float(scipy.linalg.svdvals(matrix)[-1])


class LMatrixService:
    """Builds L_n(gamma) two ways and checks the identities between its pieces."""

    def __init__(self):
        """Initialize the L-matrix service."""
        self.sequences = get_sequence_service()
        logger.info("L-matrix service initialized")

    @staticmethod
    def _check_size(n: int) -> None:
        if n < 1:
            raise InvalidParameterError(f"Section size must be at least 1, got {n}")

    def l_scalar(self, gamma: SchurParams, n: int) -> complex:
        """
        Composition sum L_n(gamma).

        Sums (-1)^r gamma_{j_1} conj(gamma_{j_1+s_1}) ... gamma_{j_r} conj(gamma_{j_r+s_r})
        over compositions (s_1..s_r) of n and indices j_1 >= n - s_1,
        j_{i+1} >= j_i - s_{i+1}. The nested sums are folded from the
        innermost level outwards with suffix sums, one pass per composition.

        Args:
            gamma: Truncated Schur parameters
            n: Order, at most settings.brute_force_cap

        Returns:
            L_n(gamma)
        """
        if n < 0:
            raise InvalidParameterError(f"Order must be non-negative, got {n}")
        if n == 0:
            return 1.0 + 0.0j
        if n > settings.brute_force_cap:
            raise BruteForceCapError(
                f"L_{n} exceeds the combinatorial cap {settings.brute_force_cap}; "
                f"use the product form"
            )

        size = gamma.size
        if size == 0:
            return 0.0j
        g = gamma.gamma
        index = np.arange(size)

        total = 0.0j
        for parts in compositions(n):
            suffix = None
            for level in range(len(parts) - 1, -1, -1):
                step = parts[level]
                values = g * np.conj(gamma.window(step, step + size))
                if suffix is not None:
                    lower = np.maximum(index - parts[level + 1], 0)
                    values = values * suffix[lower]
                suffix = np.concatenate((np.cumsum(values[::-1])[::-1], [0.0]))
            start = min(n - parts[0], size)
            total += (-1) ** len(parts) * suffix[start]
        return complex(total)

    def _factor(self, entries: np.ndarray) -> DenseComplexMatrix:
        """M_n from the window gamma_1..gamma_n (all regular)."""
        defects = np.sqrt(np.clip(1.0 - np.abs(entries) ** 2, 0.0, None))
        size = entries.size
        # cumulative[i] = log of D_1 ... D_i
        cumulative = np.concatenate(([0.0], np.cumsum(np.log(defects))))
        rows, cols = np.indices((size, size))
        lower = rows > cols
        gaps = np.where(lower, cumulative[rows] - cumulative[np.minimum(cols + 1, size)], 0.0)
        scale = np.where(lower, np.exp(np.minimum(gaps, 0.0)), 0.0)
        factor = -np.outer(np.conj(entries), entries) * scale
        factor[np.diag_indices(size)] = defects
        return factor

    def m_matrix(self, gamma: SchurParams, n: int) -> DenseComplexMatrix:
        """
        Factor M_n(gamma).

        Diagonal D_{gamma_k}; entry (k, i), i < k, equals
        -gamma_i (prod_{j=i+1}^{k-1} D_{gamma_j}) conj(gamma_k). gamma_0 is
        not used.

        Args:
            gamma: Schur parameters with gamma_1..gamma_n regular
            n: Section size

        Returns:
            n x n lower-triangular matrix
        """
        self._check_size(n)
        terminal = gamma.terminal_index
        if terminal is not None and 1 <= terminal <= n:
            raise SingularFactorError(
                f"Unimodular gamma_{terminal} lies inside the factor window 1..{n}"
            )
        return self._factor(gamma.window(1, n + 1))

    def eta_vector(self, gamma: SchurParams, n: int) -> DenseComplexMatrix:
        """Column eta_n with entries conj(gamma_k) prod_{j=1}^{k-1} D_{gamma_j}."""
        self._check_size(n)
        entries = gamma.window(1, n + 1)
        defects = self.sequences.defects(gamma, 1, n + 1)
        leading = np.concatenate(([1.0], np.cumprod(defects[:-1])))
        return (np.conj(entries) * leading).reshape(n, 1)

    def eta_tilde_vector(self, gamma: SchurParams, n: int) -> DenseComplexMatrix:
        """
        Column eta~ = M_n* eta_n / sqrt(1 - ||eta_n||^2).

        It satisfies I - M_n* M_n = eta~ eta~* and has the same norm as eta_n.
        """
        factor = self.m_matrix(gamma, n)
        eta = self.eta_vector(gamma, n)
        # 1 - ||eta_n||^2 = prod_{j<=n} D_{gamma_j}^2
        scale = float(np.prod(self.sequences.defects(gamma, 1, n + 1)))
        return factor.conj().T @ eta / scale

    def l_matrix_product(self, gamma: SchurParams, n: int) -> DenseComplexMatrix:
        """
        L_n(gamma) = M_n(gamma) M_n(W gamma) ... M_n(W^{K-1} gamma).

        K is the index of the last nonzero entry; later factors are the
        identity. The product is accumulated left to right.

        Args:
            gamma: Truncated Schur parameters
            n: Section size

        Returns:
            n x n lower-triangular contraction
        """
        self._check_size(n)
        last = gamma.support - 1
        terminal = gamma.terminal_index
        if terminal is not None and terminal >= 1:
            raise SingularFactorError(
                f"Unimodular gamma_{terminal} enters the factor M_n(W^{terminal - 1} gamma)"
            )

        product = np.eye(n, dtype=np.complex128)
        for k in range(max(last, 0)):
            product = product @ self._factor(gamma.window(k + 1, k + n + 1))
        return product

    def l_matrix_direct(self, gamma: SchurParams, n: int) -> DenseComplexMatrix:
        """
        L_n(gamma) entry by entry: row r, column c (1-based, c <= r) is
        Pi_r(gamma) L_{r-c}(W^c gamma).

        Only available while n - 1 stays within the combinatorial cap.
        """
        self._check_size(n)
        if n - 1 > settings.brute_force_cap:
            raise BruteForceCapError(
                f"Direct L_{n} needs L_{n - 1}, beyond the cap {settings.brute_force_cap}; "
                f"use l_matrix_product"
            )
        tails = self.sequences.tail_products(gamma, n + 1)
        out = np.zeros((n, n), dtype=np.complex128)
        for c in range(1, n + 1):
            shifted = self.sequences.coshift(gamma, c)
            for r in range(c, n + 1):
                out[r - 1, c - 1] = tails[r] * self.l_scalar(shifted, r - c)
        return out

    def adjoint_product(self, gamma: SchurParams, n: int, m: int) -> DenseComplexMatrix:
        """
        Reversed-order product M_n*(W^m gamma) ... M_n*(W gamma) M_n*(gamma).

        Each new factor multiplies from the left. Once m reaches the last
        nonzero index this equals L_n(gamma)*.
        """
        self._check_size(n)
        if m < 0:
            raise InvalidParameterError(f"m must be non-negative, got {m}")
        product = np.eye(n, dtype=np.complex128)
        for k in range(m + 1):
            shifted = self.sequences.coshift(gamma, k)
            product = self.m_matrix(shifted, n).conj().T @ product
        return product

    def defect_series(self, gamma: SchurParams, n: int, terms: int) -> DefectSeries:
        """
        Expand A = I - L_n L_n* as sum_j xi_j xi_j*.

        xi_j = M_n(gamma) ... M_n(W^{j-1} gamma) eta_n(W^j gamma). For a
        truncated gamma every term past the support vanishes, so the
        residual reaches round-off once terms exceed the support.

        Args:
            gamma: Truncated Schur parameters
            n: Section size
            terms: Number of terms to sum (>= 1)

        Returns:
            DefectSeries with the residual after every term
        """
        self._check_size(n)
        if terms < 1:
            raise InvalidParameterError(f"terms must be at least 1, got {terms}")

        identity = np.eye(n, dtype=np.complex128)
        lmat = self.l_matrix_product(gamma, n)
        defect = identity - lmat @ lmat.conj().T

        prefix = identity.copy()
        partial = np.zeros((n, n), dtype=np.complex128)
        vectors = []
        history = []
        for j in range(terms):
            shifted = self.sequences.coshift(gamma, j)
            xi = prefix @ self.eta_vector(shifted, n)
            vectors.append(xi)
            partial = partial + xi @ xi.conj().T
            history.append(spectral_norm(defect - partial))
            prefix = prefix @ self.m_matrix(shifted, n)

        lambda_max = float(scipy.linalg.eigvalsh(defect)[-1])
        logger.debug(f"Defect series n={n} terms={terms} residual={history[-1]:.3e}")
        return DefectSeries(
            defect_matrix=defect,
            partial_sum=partial,
            terms=vectors,
            residual=history[-1],
            residual_history=history,
            lambda_max=lambda_max
        )

    def identity_suite(self, gamma: SchurParams, n: int) -> IdentityResiduals:
        """
        Residuals of the exact identities at (gamma, n).

        Args:
            gamma: Truncated Schur parameters
            n: Section size

        Returns:
            IdentityResiduals; the suite passes when every entry is <= tol_identity
        """
        self._check_size(n)
        identity = np.eye(n, dtype=np.complex128)
        factor = self.m_matrix(gamma, n)
        eta = self.eta_vector(gamma, n)
        lmat = self.l_matrix_product(gamma, n)
        lmat_shifted = self.l_matrix_product(self.sequences.coshift(gamma, 1), n)

        defect_m = identity - factor @ factor.conj().T
        singular = scipy.linalg.svdvals(defect_m)
        squares = 1.0 - np.abs(gamma.window(1, n + 1)) ** 2
        eta_norm_sq = float(np.vdot(eta, eta).real)
        defects = self.sequences.defects(gamma, 1, n + 1)

        eta_tilde = self.eta_tilde_vector(gamma, n)
        adjoint = self.adjoint_product(gamma, n, max(gamma.support - 1, 0))

        return IdentityResiduals(
            r_fact=spectral_norm(lmat - factor @ lmat_shifted),
            r_rank1=spectral_norm(defect_m - eta @ eta.conj().T),
            r_rank=float(singular[1]) if n > 1 else 0.0,
            r_contr=max(0.0, spectral_norm(lmat) - 1.0),
            r_eig=abs(1.0 - eta_norm_sq - float(np.prod(squares))),
            r_bound=max(0.0, float(np.prod(defects)) - smallest_singular_value(factor)),
            r_rank1_adjoint=spectral_norm(
                identity - factor.conj().T @ factor - eta_tilde @ eta_tilde.conj().T
            ),
            r_eta_tilde=abs(float(np.linalg.norm(eta_tilde)) - float(np.linalg.norm(eta))),
            r_adjoint=spectral_norm(adjoint - lmat.conj().T),
            r_lower=float(np.max(np.abs(np.triu(lmat, 1)), initial=0.0)),
        )


# Singleton instance
_lmatrix_service = None


def get_lmatrix_service() -> LMatrixService:
    """Get or create L-matrix service instance."""
    global _lmatrix_service
    if _lmatrix_service is None:
        _lmatrix_service = LMatrixService()
    return _lmatrix_service
