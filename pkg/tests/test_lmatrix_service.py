"""
Tests for L_n(gamma), its factors and the rank-one identities.
"""
import numpy as np
import pytest

from models.sequences import SchurParams
from services.lmatrix_service import get_lmatrix_service, smallest_singular_value
from utils.exceptions import BruteForceCapError, SingularFactorError


@pytest.fixture
def lmatrix():
    return get_lmatrix_service()


def _compositions(n):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def _composition_sum(values, n):
    """L_n by explicit nested loops over j_1 >= n - s_1, j_{i+1} >= j_i - s_{i+1}."""
    size = len(values)

    def entry(j):
        return values[j] if 0 <= j < size else 0.0

    def nested(parts, lower):
        if not parts:
            return 1.0
        total = 0.0j
        for j in range(max(lower, 0), size):
            term = entry(j) * np.conj(entry(j + parts[0]))
            if len(parts) > 1:
                term *= nested(parts[1:], j - parts[1])
            total += term
        return total

    return sum((-1) ** len(parts) * nested(parts, n - parts[0]) for parts in _compositions(n))


class TestLScalar:
    """Test the composition sums L_n(gamma)."""

    def test_order_zero(self, lmatrix, random_gamma):
        """Test L_0 = 1."""
        assert lmatrix.l_scalar(random_gamma, 0) == 1.0

    def test_order_one(self, lmatrix):
        """Test gamma = (0.5, 0.5), n = 1."""
        value = lmatrix.l_scalar(SchurParams.from_values([0.5, 0.5]), 1)

        assert value == pytest.approx(-0.25, abs=1e-14)

    def test_order_two(self, lmatrix):
        """Test gamma = (0.5, 0.5, 0.5), n = 2."""
        value = lmatrix.l_scalar(SchurParams.from_values([0.5, 0.5, 0.5]), 2)

        assert value == pytest.approx(-0.125, abs=1e-14)
        assert _composition_sum([0.5, 0.5, 0.5], 2) == pytest.approx(-0.125, abs=1e-14)

    def test_matches_nested_enumeration(self, lmatrix):
        """Test the folded sums against the literal nested index sums."""
        rng = np.random.default_rng(11)
        for _ in range(12):
            support = int(rng.integers(1, 9))
            values = 0.9 * rng.uniform(0.0, 1.0, support) * np.exp(
                2j * np.pi * rng.uniform(0.0, 1.0, support)
            )
            gamma = SchurParams(gamma=values)
            for n in range(1, 6):
                assert lmatrix.l_scalar(gamma, n) == pytest.approx(
                    _composition_sum(values, n), rel=1e-12, abs=1e-14
                )

    def test_cap(self, lmatrix, random_gamma):
        """Test the combinatorial cap."""
        with pytest.raises(BruteForceCapError):
            lmatrix.l_scalar(random_gamma, 11)


class TestMMatrix:
    """Test the factor M_n."""

    def test_zero(self, lmatrix):
        """Test gamma = 0."""
        np.testing.assert_array_equal(lmatrix.m_matrix(SchurParams.zero(), 3), np.eye(3))

    def test_two_entries(self, lmatrix, gamma_two):
        """Test gamma_1 = 0.6, gamma_2 = 0.8."""
        np.testing.assert_allclose(
            lmatrix.m_matrix(gamma_two, 2), [[0.8, 0.0], [-0.48, 0.6]], atol=1e-15
        )

    def test_terminal_in_window(self, lmatrix):
        """Test a unimodular entry inside 1..n."""
        gamma = SchurParams.from_values([0.0, 0.5, 1.0], terminal_unimodular=True)

        with pytest.raises(SingularFactorError):
            lmatrix.m_matrix(gamma, 3)

    def test_eta(self, lmatrix, gamma_two):
        """Test eta_2 = (0.6, 0.64)."""
        eta = lmatrix.eta_vector(gamma_two, 2)

        np.testing.assert_allclose(eta.ravel(), [0.6, 0.64], atol=1e-14)
        assert 1.0 - np.vdot(eta, eta).real == pytest.approx(0.48 ** 2)

    def test_eta_tilde_norm(self, lmatrix, random_gamma):
        """Test ||eta~|| = ||eta||."""
        eta = lmatrix.eta_vector(random_gamma, 6)
        eta_tilde = lmatrix.eta_tilde_vector(random_gamma, 6)

        assert np.linalg.norm(eta_tilde) == pytest.approx(np.linalg.norm(eta), rel=1e-12)


class TestLMatrix:
    """Test the two constructions of L_n."""

    def test_zero(self, lmatrix):
        """Test gamma = 0."""
        np.testing.assert_array_equal(lmatrix.l_matrix_product(SchurParams.zero(), 4), np.eye(4))
        np.testing.assert_allclose(lmatrix.l_matrix_direct(SchurParams.zero(), 4), np.eye(4))

    def test_single_entry(self, lmatrix, gamma_single):
        """Test L_n = diag(0.8, 1, ..., 1)."""
        expected = np.diag([0.8, 1.0, 1.0, 1.0])

        np.testing.assert_allclose(lmatrix.l_matrix_product(gamma_single, 4), expected, atol=1e-15)
        np.testing.assert_allclose(lmatrix.l_matrix_direct(gamma_single, 4), expected, atol=1e-15)

    def test_product_equals_direct(self, lmatrix, random_gamma):
        """Test the product form against the composition sums."""
        for n in range(1, 7):
            np.testing.assert_allclose(
                lmatrix.l_matrix_product(random_gamma, n),
                lmatrix.l_matrix_direct(random_gamma, n),
                atol=1e-10
            )

    def test_lower_triangular_contraction(self, lmatrix, random_gamma):
        """Test shape and norm of L_n."""
        lmat = lmatrix.l_matrix_product(random_gamma, 8)

        assert np.max(np.abs(np.triu(lmat, 1))) == 0.0
        assert np.linalg.norm(lmat, 2) <= 1.0 + 1e-12

    def test_direct_cap(self, lmatrix, random_gamma):
        """Test the direct route refuses large n."""
        with pytest.raises(BruteForceCapError):
            lmatrix.l_matrix_direct(random_gamma, 12)

    def test_terminal_rejected(self, lmatrix):
        """Test a unimodular entry past gamma_0."""
        gamma = SchurParams.from_values([0.1, 1.0], terminal_unimodular=True)

        with pytest.raises(SingularFactorError):
            lmatrix.l_matrix_product(gamma, 2)

    def test_adjoint_product(self, lmatrix, random_gamma):
        """Test the reversed product reaches L_n*."""
        lmat = lmatrix.l_matrix_product(random_gamma, 5)
        adjoint = lmatrix.adjoint_product(random_gamma, 5, random_gamma.support - 1)

        np.testing.assert_allclose(adjoint, lmat.conj().T, atol=1e-12)

    def test_sigma_min_bounded_by_certificate(self, lmatrix):
        """Test sigma_min(L_n) >= prod_k prod_{j>=k} D_j for gamma_k = 0.5^k."""
        gamma = SchurParams(gamma=np.concatenate(([0.0], 0.5 ** np.arange(1, 21))))
        squares = np.abs(gamma.gamma) ** 2
        c_bound = np.sqrt(np.prod((1.0 - squares) ** np.arange(gamma.size)))

        for n in (4, 16, 32):
            assert smallest_singular_value(lmatrix.l_matrix_product(gamma, n)) >= c_bound - 1e-10


class TestDefectSeries:
    """Test the defect series."""

    def test_zero(self, lmatrix):
        """Test gamma = 0."""
        series = lmatrix.defect_series(SchurParams.zero(), 3, 2)

        np.testing.assert_array_equal(series.defect_matrix, np.zeros((3, 3)))
        assert all(np.all(xi == 0) for xi in series.terms)

    def test_single_entry(self, lmatrix, gamma_single):
        """Test A = diag(0.36, 0, 0)."""
        series = lmatrix.defect_series(gamma_single, 3, 3)

        np.testing.assert_allclose(series.defect_matrix, np.diag([0.36, 0.0, 0.0]), atol=1e-15)
        np.testing.assert_allclose(series.terms[0].ravel(), [0.6, 0.0, 0.0])
        np.testing.assert_allclose(series.terms[1].ravel(), np.zeros(3))
        assert series.lambda_max == pytest.approx(0.36)

    def test_converges(self, lmatrix, random_gamma):
        """Test the residual vanishes past the support and never grows."""
        series = lmatrix.defect_series(random_gamma, 6, random_gamma.support + 1)
        history = series.residual_history

        assert series.residual <= 1e-12
        assert all(b <= a + 1e-14 for a, b in zip(history, history[1:]))


class TestIdentitySuite:
    """Test the identity residuals."""

    def test_zero(self, lmatrix):
        """Test every residual vanishes for gamma = 0."""
        residuals = lmatrix.identity_suite(SchurParams.zero(), 4)

        assert residuals.max_residual() <= 1e-15

    def test_two_entries(self, lmatrix, gamma_two):
        """Test gamma_1 = 0.6, gamma_2 = 0.8 at n = 2."""
        residuals = lmatrix.identity_suite(gamma_two, 2)

        assert residuals.max_residual() <= 1e-12

    def test_random(self, lmatrix):
        """Test random sequences with |gamma_j| <= 0.95 at n = 12."""
        rng = np.random.default_rng(11)
        for _ in range(10):
            support = int(rng.integers(1, 17))
            moduli = 0.95 * np.sqrt(rng.uniform(0, 1, support))
            gamma = SchurParams(gamma=moduli * np.exp(2j * np.pi * rng.uniform(0, 1, support)))

            assert lmatrix.identity_suite(gamma, 12).passes()
