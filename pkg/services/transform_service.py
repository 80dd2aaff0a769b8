"""
Transforms between weights, moments, Carathéodory and Schur functions
and Schur parameters.
"""
from typing import Callable, Optional, Union

import numpy as np
from loguru import logger

from config.settings import settings
from models.reports import SzegoIdentityResult
from models.sequences import MomentSequence, PowerSeries, SchurParams
from utils.exceptions import (
    DegenerateMeasureError,
    InconsistentInputError,
    InvalidParameterError,
    InvalidWeightError,
    NotASchurFunctionError,
    NotNormalizedError,
)

# Both routes to gamma (Levinson on moments, Schur algorithm on theta) use
# this convention; gamma_0 = conj(m_1) = theta(0).
GAMMA_CONVENTION = (
    "m_k = integral of t^k dmu; Phi(z) = 1 + 2 sum conj(m_k) z^k; "
    "theta = (Phi - 1) / (z (Phi + 1)); monic orthogonal polynomials satisfy "
    "P_{n+1}(z) = z P_n(z) - conj(gamma_n) P_n^*(z) with "
    "gamma_n = conj(integral of t P_n(t) dmu) / ||P_n||^2"
)

WeightSource = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


class TransformService:
    """Schur algorithm, its inverse, Herglotz transforms, moments and Levinson."""

    def __init__(self):
        """Initialize the transform service."""
        logger.info("Transform service initialized")

    def schur_algorithm(
        self,
        theta: PowerSeries,
        max_order: Optional[int] = None
    ) -> SchurParams:
        """
        Run the Schur algorithm on the Taylor head of a Schur function.

        theta_{j+1} = (theta_j - gamma_j) / (z (1 - conj(gamma_j) theta_j)),
        gamma_j = theta_j(0). Each step consumes one coefficient, so
        gamma_j is fully determined by the input for j <= theta.order.

        Args:
            theta: Coefficients theta_0..theta_N
            max_order: Last parameter index to produce (defaults to N)

        Returns:
            SchurParams with trust_horizon set to the last produced index
        """
        limit = theta.order if max_order is None else min(max_order, theta.order)
        if limit < 0:
            raise InvalidParameterError(f"max_order must be non-negative, got {max_order}")

        gammas = []
        current = theta
        for j in range(limit + 1):
            g = complex(current.coeffs[0])
            modulus = abs(g)
            if modulus > 1.0 + settings.tol_unimodular:
                raise NotASchurFunctionError(
                    f"Schur step {j} produced |gamma_{j}| = {modulus!r} > 1"
                )
            gammas.append(g)
            if modulus >= 1.0 - settings.tol_unimodular:
                logger.debug(f"Schur algorithm terminated at unimodular gamma_{j}")
                return SchurParams(
                    gamma=np.array(gammas),
                    terminal_unimodular=True,
                    trust_horizon=j
                )
            if j == limit:
                break
            ratio = (current - g) / (1 - current * g.conjugate())
            current = ratio.divide_z()

        logger.debug(f"Schur algorithm produced {len(gammas)} parameters")
        return SchurParams(gamma=np.array(gammas, dtype=np.complex128), trust_horizon=limit)

    def inverse_schur(self, gamma: SchurParams, order: int) -> PowerSeries:
        """
        Rebuild theta from its parameters by running the recursion backwards.

        theta_j = (gamma_j + z theta_{j+1}) / (1 + conj(gamma_j) z theta_{j+1}),
        started from the zero function past the last stored entry.

        Args:
            gamma: Schur parameters
            order: Truncation order of the result

        Returns:
            theta_0..theta_order
        """
        if order < 0:
            raise InvalidParameterError(f"order must be non-negative, got {order}")
        theta = PowerSeries.constant(0.0, order)
        for j in range(gamma.size - 1, -1, -1):
            g = complex(gamma.gamma[j])
            shifted = theta.times_z()
            theta = (shifted + g) / (shifted * g.conjugate() + 1)
        return theta

    def herglotz_from_moments(self, moments: MomentSequence) -> PowerSeries:
        """
        Carathéodory function Phi(z) = 1 + 2 sum_{k>=1} conj(m_k) z^k.

        Args:
            moments: Normalized moments (m_0 = 1)

        Returns:
            Phi to the order of the moments
        """
        if abs(moments.moments[0] - 1.0) > settings.tol_moment_normalization:
            raise NotNormalizedError(
                f"Moments must satisfy m_0 = 1, got {complex(moments.moments[0])!r}"
            )
        coeffs = 2.0 * np.conj(moments.moments)
        coeffs[0] = 1.0
        return PowerSeries(coeffs=coeffs)

    def moments_from_caratheodory(self, phi: PowerSeries) -> MomentSequence:
        """Moments of the measure behind Phi: m_0 = 1, m_k = conj(Phi_k) / 2."""
        self._check_unit_constant(phi)
        moments = np.conj(phi.coeffs) / 2.0
        moments[0] = 1.0
        return MomentSequence(moments=moments)

    def schur_from_caratheodory(self, phi: PowerSeries) -> PowerSeries:
        """
        theta = (Phi - 1) / (z (Phi + 1)).

        The result has order one less than Phi.
        """
        self._check_unit_constant(phi)
        if phi.order < 1:
            raise InconsistentInputError("Phi needs at least one coefficient past Phi_0")
        return ((phi - 1) / (phi + 1)).divide_z()

    def caratheodory_from_schur(self, theta: PowerSeries) -> PowerSeries:
        """
        Phi = (1 + z theta) / (1 - z theta).

        z theta is exact to one order past theta, so the result has order
        theta.order + 1.
        """
        shifted = PowerSeries(coeffs=np.concatenate(([0.0], theta.coeffs)))
        return (shifted + 1) / (1 - shifted)

    def _check_unit_constant(self, phi: PowerSeries) -> None:
        if abs(phi.coeffs[0] - 1.0) > settings.tol_unimodular:
            raise InconsistentInputError(
                f"Carathéodory function must satisfy Phi(0) = 1, got {complex(phi.coeffs[0])!r}"
            )

    def moments_from_weight(
        self,
        weight: WeightSource,
        order: int,
        grid: Optional[int] = None
    ) -> MomentSequence:
        """
        Normalized moments of w(theta) dtheta / 2pi by FFT.

        Args:
            weight: Callable on angles in [0, 2pi), or samples on a uniform grid
            order: Highest moment index N
            grid: Number of sample points M for a callable weight

        Returns:
            m_0..m_N normalized to m_0 = 1
        """
        if order < 0:
            raise InvalidParameterError(f"order must be non-negative, got {order}")

        if callable(weight):
            points = settings.default_grid if grid is None else grid
            angles = 2.0 * np.pi * np.arange(points) / points
            samples = np.asarray(weight(angles), dtype=float)
        else:
            samples = np.asarray(weight, dtype=float)
            points = samples.size

        if samples.ndim != 1 or samples.size != points:
            raise InvalidWeightError("Weight samples must form a one-dimensional grid")
        if points < 8 * order:
            raise InvalidWeightError(
                f"Grid of {points} points is too coarse for order {order} (need {8 * order})"
            )

        peak = float(np.max(np.abs(samples))) if samples.size else 0.0
        if samples.size and samples.min() < -settings.tol_negative_weight * max(1.0, peak):
            raise InvalidWeightError(f"Weight takes negative value {samples.min()!r}")
        samples = np.clip(samples, 0.0, None)

        raw = np.fft.ifft(samples)[:order + 1]
        mass = float(raw[0].real)
        if mass <= np.finfo(float).tiny:
            raise DegenerateMeasureError("Weight has zero mass", order_reached=0)

        logger.debug(f"Moments computed on {points} grid points up to order {order}")
        return MomentSequence(moments=raw / mass)

    def levinson_verblunsky(self, moments: MomentSequence) -> SchurParams:
        """
        Parameters gamma_0..gamma_{N-1} by the Szegő (Levinson) recursion.

        Monic orthogonal polynomials are advanced with
        P_{n+1} = z P_n - conj(gamma_n) P_n^*; the squared norms follow
        E_{n+1} = E_n (1 - |gamma_n|^2).

        Args:
            moments: m_0..m_N with a positive definite Toeplitz section

        Returns:
            SchurParams of length N
        """
        m = moments.moments
        count = moments.order
        gammas = np.zeros(count, dtype=np.complex128)
        poly = np.ones(1, dtype=np.complex128)
        energy = float(m[0].real)
        floor = settings.tol_toeplitz_margin * energy
        if energy <= 0.0:
            raise DegenerateMeasureError("Measure has zero mass", order_reached=0)

        for n in range(count):
            beta = np.dot(poly, m[1:n + 2])
            g = np.conj(beta) / energy
            gammas[n] = g
            reversed_poly = np.conj(poly[::-1])
            nxt = np.zeros(n + 2, dtype=np.complex128)
            nxt[1:] = poly
            nxt[:n + 1] -= np.conj(g) * reversed_poly
            poly = nxt
            energy *= 1.0 - abs(g) ** 2
            if energy <= floor:
                raise DegenerateMeasureError(
                    f"Measure supported on too few points at order {n + 1}",
                    order_reached=n + 1
                )

        return SchurParams(gamma=gammas, trust_horizon=count - 1 if count else None)

    def quadruple_discrepancy(self, moments: MomentSequence, order: int) -> float:
        """
        Largest gap between the Levinson and Schur-path parameters.

        Args:
            moments: Moment sequence (normalized internally)
            order: Last index compared

        Returns:
            max_j |gamma_j^Levinson - gamma_j^Schur| for j <= order
        """
        normalized = self._normalized(moments)
        window = min(order, normalized.order - 1)
        if window < 0:
            return 0.0
        head = MomentSequence(moments=normalized.moments[:window + 2])
        try:
            levinson = self.levinson_verblunsky(head)
        except DegenerateMeasureError as e:
            # the unimodular step itself is not comparable; check the regular head
            logger.debug(f"Levinson recursion stopped at order {e.order_reached}")
            levinson = self.levinson_verblunsky(
                MomentSequence(moments=head.moments[:max(e.order_reached or 0, 1)])
            )
        schur = self.schur_path_parameters(head, max_order=window)
        upto = min(levinson.size, schur.size)
        return float(np.max(np.abs(levinson.gamma[:upto] - schur.gamma[:upto]), initial=0.0))

    def schur_path_parameters(
        self,
        moments: MomentSequence,
        max_order: Optional[int] = None
    ) -> SchurParams:
        """
        Parameters of a moment sequence via Phi, theta and the Schur algorithm.

        Unlike the Levinson recursion this route runs through a finitely
        supported measure and ends with a terminal unimodular entry.

        Args:
            moments: Moment sequence (normalized internally)
            max_order: Last parameter index to produce

        Returns:
            SchurParams
        """
        theta = self.schur_from_caratheodory(self.herglotz_from_moments(self._normalized(moments)))
        return self.schur_algorithm(theta, max_order=max_order)

    @staticmethod
    def _normalized(moments: MomentSequence) -> MomentSequence:
        mass = float(moments.moments[0].real)
        if mass <= np.finfo(float).tiny:
            raise DegenerateMeasureError("Measure has zero mass", order_reached=0)
        return MomentSequence(moments=moments.moments / mass)

    def szego_identity_residual(
        self,
        gamma: SchurParams,
        theta: PowerSeries,
        quad_points: Optional[int] = None,
        radius: Optional[float] = None,
        extrapolate: bool = True
    ) -> SzegoIdentityResult:
        """
        Compare prod (1 - |gamma_k|^2) with exp of the boundary mean of log(1 - |theta|^2).

        The boundary mean is taken with the trapezoid rule on circles of
        radius r < 1. With ``extrapolate`` the radii 1-h, 1-2h, 1-3h
        (h = 1 - r) are combined with weights 3, -3, 1.

        Args:
            gamma: Schur parameters of theta
            theta: Truncated Schur function
            quad_points: Nodes per circle (default from settings)
            radius: Outer radius (default 1 - 1/(4 * quad_points))
            extrapolate: Apply radial extrapolation

        Returns:
            SzegoIdentityResult; singular when |theta| >= 1 at a node
        """
        points = settings.quad_points if quad_points is None else quad_points
        r = 1.0 - 1.0 / (4.0 * points) if radius is None else radius
        if not 0.0 < r < 1.0:
            raise InvalidParameterError(f"Quadrature radius must lie in (0, 1), got {r}")
        step = 1.0 - r

        if gamma.terminal_unimodular:
            lhs = 0.0
        else:
            lhs = float(np.prod(1.0 - np.abs(gamma.gamma) ** 2))

        nodes = np.exp(2j * np.pi * np.arange(points) / points)
        use_extrapolation = extrapolate and 1.0 - 3.0 * step > 0.0
        if use_extrapolation:
            radii, weights = [r, 1.0 - 2.0 * step, 1.0 - 3.0 * step], [3.0, -3.0, 1.0]
        else:
            radii, weights = [r], [1.0]

        singular = False
        log_rhs = 0.0
        for rad, wgt in zip(radii, weights):
            mod2 = np.abs(theta.evaluate(rad * nodes)) ** 2
            if np.any(mod2 >= 1.0):
                singular = True
                break
            log_rhs += wgt * float(np.mean(np.log1p(-mod2)))

        if singular:
            logger.warning("|theta| reaches 1 on the quadrature circle; log integral diverges")
            rhs = 0.0
        else:
            rhs = float(np.exp(log_rhs))

        return SzegoIdentityResult(
            lhs=lhs,
            rhs=rhs,
            residual=abs(lhs - rhs),
            radius=r,
            quad_points=points,
            extrapolated=use_extrapolation,
            singular=singular
        )


# Singleton instance
_transform_service = None


def get_transform_service() -> TransformService:
    """Get or create transform service instance."""
    global _transform_service
    if _transform_service is None:
        _transform_service = TransformService()
    return _transform_service
