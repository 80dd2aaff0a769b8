"""
Tests for the Schur algorithm, Herglotz transforms, moments and Levinson.
"""
import numpy as np
import pytest

from models.sequences import MomentSequence, PowerSeries, SchurParams
from services.transform_service import get_transform_service
from utils.exceptions import (
    DegenerateMeasureError,
    InvalidWeightError,
    NotASchurFunctionError,
    NotNormalizedError,
)
from utils.families import constant_weight, cosine_weight, zero_weight


@pytest.fixture
def transforms():
    return get_transform_service()


def _series(values, order=8):
    coeffs = np.zeros(order + 1, dtype=np.complex128)
    coeffs[:len(values)] = values
    return PowerSeries(coeffs=coeffs)


class TestSchurAlgorithm:
    """Test the Schur algorithm."""

    def test_constant_function(self, transforms):
        """Test theta = 0.3."""
        gamma = transforms.schur_algorithm(_series([0.3]))

        np.testing.assert_allclose(gamma.gamma, [0.3] + [0.0] * 8, atol=1e-15)
        assert gamma.trust_horizon == 8

    def test_blaschke_terminates(self, transforms):
        """Test theta(z) = z."""
        gamma = transforms.schur_algorithm(PowerSeries.from_values([0, 1]))

        assert gamma.terminal_unimodular
        assert gamma.terminal_index == 1
        assert gamma.entry(0) == 0

    def test_non_contractive_rejected(self, transforms):
        """Test |theta(0)| > 1."""
        with pytest.raises(NotASchurFunctionError):
            transforms.schur_algorithm(PowerSeries.from_values([1.5, 0.0]))

    def test_round_trip(self, transforms):
        """Test schur_algorithm(inverse_schur(gamma)) = gamma."""
        rng = np.random.default_rng(3)
        values = 0.9 * rng.uniform(0, 1, 6) * np.exp(2j * np.pi * rng.uniform(0, 1, 6))
        gamma = SchurParams(gamma=values)

        theta = transforms.inverse_schur(gamma, 32)
        back = transforms.schur_algorithm(theta, max_order=5)

        np.testing.assert_allclose(back.gamma, values, atol=1e-10)


class TestInverseSchur:
    """Test the inverse Schur algorithm."""

    def test_zero(self, transforms):
        """Test gamma = 0."""
        theta = transforms.inverse_schur(SchurParams.zero(), 5)

        np.testing.assert_array_equal(theta.coeffs, np.zeros(6))

    def test_constant(self, transforms):
        """Test gamma = (0.3)."""
        theta = transforms.inverse_schur(SchurParams.from_values([0.3]), 4)

        np.testing.assert_allclose(theta.coeffs, [0.3, 0, 0, 0, 0], atol=1e-15)

    def test_two_parameters(self, transforms):
        """Test gamma = (0.3, 0.5)."""
        theta = transforms.inverse_schur(SchurParams.from_values([0.3, 0.5]), 20)
        gamma = transforms.schur_algorithm(theta, max_order=3)

        np.testing.assert_allclose(gamma.gamma, [0.3, 0.5, 0, 0], atol=1e-12)


class TestHerglotz:
    """Test the Carathéodory and Schur function transforms."""

    def test_lebesgue(self, transforms):
        """Test m = (1, 0, ...)."""
        phi = transforms.herglotz_from_moments(MomentSequence.from_values([1, 0, 0]))

        np.testing.assert_allclose(phi.coeffs, [1, 0, 0])

    def test_single_moment(self, transforms):
        """Test m = (1, 0.3)."""
        phi = transforms.herglotz_from_moments(MomentSequence.from_values([1, 0.3]))

        np.testing.assert_allclose(phi.coeffs, [1, 0.6])

    def test_unnormalized_rejected(self, transforms):
        """Test m_0 != 1."""
        with pytest.raises(NotNormalizedError):
            transforms.herglotz_from_moments(MomentSequence.from_values([2, 0.3]))

    def test_schur_from_caratheodory(self, transforms):
        """Test Phi = 1 + 0.6 z."""
        theta = transforms.schur_from_caratheodory(_series([1, 0.6], order=4))

        np.testing.assert_allclose(theta.coeffs, [0.3, -0.09, 0.027, -0.0081])

    def test_one_minus_z(self, transforms):
        """Test Phi = 1 - z."""
        theta = transforms.schur_from_caratheodory(_series([1, -1], order=3))

        np.testing.assert_allclose(theta.coeffs, [-0.5, -0.25, -0.125])

    def test_caratheodory_from_schur(self, transforms):
        """Test theta = 0.3."""
        phi = transforms.caratheodory_from_schur(_series([0.3], order=3))

        assert phi.order == 4
        np.testing.assert_allclose(phi.coeffs, [1, 0.6, 0.18, 0.054, 0.0162])

    def test_round_trip(self, transforms):
        """Test schur_from_caratheodory(caratheodory_from_schur(theta)) = theta."""
        theta = transforms.inverse_schur(SchurParams.from_values([0.2, -0.4j, 0.1]), 12)
        back = transforms.schur_from_caratheodory(transforms.caratheodory_from_schur(theta))

        np.testing.assert_allclose(back.coeffs, theta.coeffs, atol=1e-12)

    def test_moments_from_caratheodory(self, transforms):
        """Test the inverse of herglotz_from_moments."""
        moments = transforms.moments_from_caratheodory(PowerSeries.from_values([1, 0.6, 0.18]))

        np.testing.assert_allclose(moments.moments, [1, 0.3, 0.09])


class TestMomentsFromWeight:
    """Test FFT moments."""

    def test_constant(self, transforms):
        """Test w = 1."""
        moments = transforms.moments_from_weight(constant_weight(), 4, grid=64)

        np.testing.assert_allclose(moments.moments, [1, 0, 0, 0, 0], atol=1e-15)

    def test_cosine(self, transforms):
        """Test w = 1 + 0.6 cos."""
        moments = transforms.moments_from_weight(cosine_weight([0.6]), 4, grid=64)

        np.testing.assert_allclose(moments.moments, [1, 0.3, 0, 0, 0], atol=1e-15)

    def test_zero_weight(self, transforms):
        """Test w = 2 - 2 cos."""
        moments = transforms.moments_from_weight(zero_weight(1.0), 4, grid=64)

        np.testing.assert_allclose(moments.moments, [1, -0.5, 0, 0, 0], atol=1e-15)

    def test_coarse_grid_rejected(self, transforms):
        """Test grid < 8 * order."""
        with pytest.raises(InvalidWeightError):
            transforms.moments_from_weight(constant_weight(), 16, grid=64)

    def test_negative_weight_rejected(self, transforms):
        """Test a weight dipping below zero."""
        with pytest.raises(InvalidWeightError):
            transforms.moments_from_weight(cosine_weight([1.5]), 4, grid=64)

    def test_zero_mass(self, transforms):
        """Test the zero weight."""
        with pytest.raises(DegenerateMeasureError):
            transforms.moments_from_weight(np.zeros(64), 4)


class TestLevinson:
    """Test the Levinson recursion."""

    def test_lebesgue(self, transforms):
        """Test m = (1, 0, ...)."""
        gamma = transforms.levinson_verblunsky(MomentSequence.from_values([1, 0, 0, 0]))

        np.testing.assert_array_equal(gamma.gamma, np.zeros(3))

    def test_single_moment(self, transforms):
        """Test gamma_0 = conj(m_1)."""
        gamma = transforms.levinson_verblunsky(MomentSequence.from_values([1, 0.3j]))

        assert gamma.entry(0) == pytest.approx(-0.3j)

    def test_one_minus_cos(self, transforms):
        """Test gamma_n = -1/(n+2) for w = 1 - cos."""
        moments = transforms.moments_from_weight(zero_weight(1.0), 32, grid=512)
        gamma = transforms.levinson_verblunsky(moments)

        np.testing.assert_allclose(gamma.gamma, -1.0 / (np.arange(32) + 2.0), atol=1e-12)

    def test_agrees_with_schur_path(self, transforms):
        """Test the two routes to gamma on w = 1 - cos."""
        moments = transforms.moments_from_weight(zero_weight(1.0), 32, grid=512)

        assert transforms.quadruple_discrepancy(moments, 24) < 1e-8

    def test_finite_support_is_degenerate(self, transforms):
        """Test a two-point measure."""
        # delta at t = 1 and t = -1, equal weights
        moments = MomentSequence.from_values([1, 0, 1, 0, 1])

        with pytest.raises(DegenerateMeasureError) as info:
            transforms.levinson_verblunsky(moments)
        assert info.value.order_reached == 2

    def test_schur_path_on_finite_support(self, transforms):
        """Test that the Schur route ends the two-point measure with gamma_1 = 1."""
        gamma = transforms.schur_path_parameters(MomentSequence.from_values([1, 0, 1, 0, 1]))

        assert gamma.terminal_unimodular
        np.testing.assert_allclose(gamma.gamma, [0.0, 1.0], atol=1e-15)

    def test_discrepancy_on_finite_support(self, transforms):
        """Test the route comparison stops before the singular section."""
        moments = MomentSequence.from_values([1, 0, 1, 0, 1])

        assert transforms.quadruple_discrepancy(moments, 3) == pytest.approx(0.0, abs=1e-15)
        assert transforms.quadruple_discrepancy(MomentSequence.from_values([1, 1, 1]), 1) == 0.0


class TestSzegoIdentity:
    """Test the Szegő product identity."""

    def test_zero(self, transforms):
        """Test theta = 0."""
        result = transforms.szego_identity_residual(SchurParams.zero(), _series([0.0]))

        assert result.lhs == 1.0
        assert result.residual == pytest.approx(0.0, abs=1e-15)

    def test_constant(self, transforms):
        """Test theta = 0.3."""
        result = transforms.szego_identity_residual(
            SchurParams.from_values([0.3]), _series([0.3])
        )

        assert result.lhs == pytest.approx(0.91)
        assert result.residual <= 1e-10

    def test_two_parameters(self, transforms):
        """Test gamma = (0.3, 0.5) at r = 0.999."""
        gamma = SchurParams.from_values([0.3, 0.5])
        theta = transforms.inverse_schur(gamma, 128)
        result = transforms.szego_identity_residual(gamma, theta, quad_points=4096, radius=0.999)

        assert result.extrapolated
        assert result.residual <= 1e-6

    def test_unimodular_theta_is_singular(self, transforms):
        """Test |theta| = 1 on the circle."""
        result = transforms.szego_identity_residual(
            SchurParams.zero(), _series([1.0]), quad_points=64
        )

        assert result.singular
