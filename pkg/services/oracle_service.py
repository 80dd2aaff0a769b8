"""
Moment-side oracles: finite sections of the Riesz projection, the
conjugation operator and the oblique projection in L2(mu), and
orthonormal polynomials by Gram-Schmidt.
"""
from typing import List

import numpy as np
import scipy.linalg
import scipy.linalg.lapack
from loguru import logger

from models.sequences import DenseComplexMatrix, MomentSequence
from utils.exceptions import DegenerateMeasureError, InvalidParameterError


class MomentOracleService:
    """Generalized Hermitian eigenproblems on the Gram matrix of t^{-n}..t^{n}."""

    def __init__(self):
        """Initialize the moment oracle service."""
        logger.info("Moment oracle service initialized")

    def gram_matrix(self, moments: MomentSequence, n: int) -> DenseComplexMatrix:
        """
        Gram matrix G[j, k] = m_{k-j} of the basis t^{-n}..t^{n}.

        Args:
            moments: Moments up to at least m_{2n}
            n: Section size

        Returns:
            (2n+1) x (2n+1) Hermitian Toeplitz matrix
        """
        if n < 1:
            raise InvalidParameterError(f"Section size must be at least 1, got {n}")
        if moments.order < 2 * n:
            raise InvalidParameterError(
                f"Section size {n} needs moments up to m_{2 * n}, have m_{moments.order}"
            )
        return moments.toeplitz(2 * n + 1)

    def _largest_ratio(self, numerator: np.ndarray, gram: np.ndarray, n: int) -> float:
        """sqrt of the largest eigenvalue of numerator x = lambda gram x."""
        try:
            eigenvalues = scipy.linalg.eigh(numerator, gram, eigvals_only=True)
        except np.linalg.LinAlgError as e:
            logger.error(f"Gram matrix at n={n} is not positive definite: {e}")
            raise DegenerateMeasureError(
                f"Gram matrix of size {gram.shape[0]} is singular", order_reached=n
            ) from e
        return float(np.sqrt(max(eigenvalues[-1], 0.0)))

    def riesz_finite_section_norm(self, moments: MomentSequence, n: int) -> float:
        """
        Norm of P_+ on span{t^{-n}..t^{n}} in L2(mu).

        P_+ keeps the coefficients of t^0..t^n. The norm is
        sqrt(lambda_max) of S* G S a = lambda G a with S the coordinate
        projection.

        Args:
            moments: Normalized moments up to m_{2n}
            n: Section size

        Returns:
            ||P_+|| on the section (>= 1)
        """
        gram = self.gram_matrix(moments, n)
        kept = slice(n, 2 * n + 1)
        numerator = np.zeros_like(gram)
        numerator[kept, kept] = gram[kept, kept]
        return self._largest_ratio(numerator, gram, n)

    def conjugation_ratio(self, moments: MomentSequence, n: int) -> float:
        """
        Norm of the harmonic conjugation t^k -> -i sgn(k) t^k on the section.

        Args:
            moments: Normalized moments up to m_{2n}
            n: Section size

        Returns:
            ||conjugation|| on span{t^{-n}..t^{n}}
        """
        gram = self.gram_matrix(moments, n)
        signs = -1j * np.sign(np.arange(-n, n + 1))
        conj_op = np.diag(signs)
        numerator = conj_op.conj().T @ gram @ conj_op
        return self._largest_ratio(numerator, gram, n)

    def oblique_projection_norm(self, moments: MomentSequence, n: int) -> float:
        """
        Norm of the projection onto span{t^k - m_k} parallel to
        span{t^{-k} - conj(m_k)}, 1 <= k <= n.

        Both spans are orthogonal to the constants in L2(mu), so this is the
        finite section of the analytic/anti-analytic splitting of the
        mean-zero part.

        Args:
            moments: Normalized moments up to m_{2n}
            n: Section size

        Returns:
            Norm of the oblique projection (>= 1)
        """
        gram = self.gram_matrix(moments, n)
        centre = n
        basis = np.zeros((2 * n + 1, 2 * n), dtype=np.complex128)
        for k in range(1, n + 1):
            anti, analytic = k - 1, n + k - 1
            basis[centre - k, anti] = 1.0
            basis[centre, anti] = -np.conj(moments.moments[k])
            basis[centre + k, analytic] = 1.0
            basis[centre, analytic] = -moments.moments[k]

        reduced = basis.conj().T @ gram @ basis
        numerator = np.zeros_like(reduced)
        numerator[n:, n:] = reduced[n:, n:]
        return self._largest_ratio(numerator, reduced, n)

    def orthonormal_polynomials(self, moments: MomentSequence, n: int) -> List[np.ndarray]:
        """
        Gram-Schmidt on 1, t^{-1}, ..., t^{-n} in L2(mu).

        Uses the upper Cholesky factor R of H[j, k] = m_{j-k}; the columns
        of R^{-1} are the coefficient vectors.

        Args:
            moments: Moments up to m_n
            n: Highest degree

        Returns:
            List of n+1 vectors; entry i of vector k multiplies t^{-i}
        """
        if n < 0:
            raise InvalidParameterError(f"Degree must be non-negative, got {n}")
        gram = np.conj(moments.toeplitz(n + 1))
        upper, info = scipy.linalg.lapack.zpotrf(gram, lower=False, clean=True)
        if info > 0:
            # leading minor of order info fails, so degrees up to info - 2 exist
            reached = info - 2
            logger.error(f"Cholesky failed at degree {info - 1} of {n}")
            raise DegenerateMeasureError(
                f"Gram matrix is singular from degree {info - 1}; "
                f"orthonormal polynomials exist up to degree {reached}",
                order_reached=reached
            )
        if info < 0:
            raise InvalidParameterError(f"Cholesky rejected argument {-info}")
        coeffs = scipy.linalg.solve_triangular(
            upper, np.eye(n + 1, dtype=np.complex128), lower=False
        )
        return [coeffs[:k + 1, k].copy() for k in range(n + 1)]


# Singleton instance
_moment_oracle_service = None


def get_moment_oracle_service() -> MomentOracleService:
    """Get or create moment oracle service instance."""
    global _moment_oracle_service
    if _moment_oracle_service is None:
        _moment_oracle_service = MomentOracleService()
    return _moment_oracle_service
