"""Builtin weight and parameter families."""
from typing import Callable, Optional, Sequence

import numpy as np

from models.sequences import SchurParams
from utils.exceptions import IngestionError

WeightFunction = Callable[[np.ndarray], np.ndarray]

WEIGHT_FAMILIES = ("constant", "cosine", "zero", "zero-squared")
GAMMA_FAMILIES = ("geometric", "spike", "harmonic")


def constant_weight() -> WeightFunction:
    """Lebesgue measure."""
    return lambda angles: np.ones_like(angles)


def cosine_weight(coeffs: Sequence[float]) -> WeightFunction:
    """w(theta) = 1 + sum_k c_k cos(k theta), k >= 1."""
    values = np.asarray(coeffs, dtype=float)

    def weight(angles: np.ndarray) -> np.ndarray:
        out = np.ones_like(angles)
        for k, c in enumerate(values, start=1):
            out = out + c * np.cos(k * angles)
        return out

    return weight


def zero_weight(power: float) -> WeightFunction:
    """w(theta) = |1 - e^{i theta}|^{2p} = (2 - 2 cos theta)^p."""
    if power < 0:
        raise IngestionError(f"Zero order must be non-negative, got {power}")
    return lambda angles: np.power(np.maximum(2.0 - 2.0 * np.cos(angles), 0.0), power)


def build_weight(
    name: str,
    cos_coeffs: Optional[Sequence[float]] = None,
    power: Optional[float] = None
) -> WeightFunction:
    """
    Look up a builtin weight.

    Args:
        name: constant, cosine, zero or zero-squared
        cos_coeffs: Cosine coefficients for ``cosine``
        power: Exponent p for ``zero``

    Returns:
        Weight as a function of the angle
    """
    if name == "constant":
        return constant_weight()
    if name == "cosine":
        if not cos_coeffs:
            raise IngestionError("The cosine weight needs --cos-coeffs")
        return cosine_weight(cos_coeffs)
    if name == "zero":
        return zero_weight(1.0 if power is None else power)
    if name == "zero-squared":
        return zero_weight(1.0)
    raise IngestionError(f"Unknown weight '{name}', expected one of {', '.join(WEIGHT_FAMILIES)}")


def geometric_gamma(q: float, order: int) -> SchurParams:
    """gamma_0 = 0, gamma_k = q^k for 1 <= k <= order."""
    gamma = np.zeros(order + 1, dtype=np.complex128)
    gamma[1:] = q ** np.arange(1, order + 1)
    return SchurParams(gamma=gamma)


def spike_gamma(amplitude: complex, index: int) -> SchurParams:
    """A single nonzero entry gamma_index = amplitude."""
    if index < 0:
        raise IngestionError(f"Spike index must be non-negative, got {index}")
    gamma = np.zeros(index + 1, dtype=np.complex128)
    gamma[index] = amplitude
    return SchurParams(gamma=gamma)


def harmonic_gamma(c: float, order: int) -> SchurParams:
    """gamma_k = c / (k + 1) for 0 <= k <= order; square summable, sum k|gamma_k|^2 diverges."""
    return SchurParams(gamma=c / (np.arange(order + 1) + 1.0))


def build_gamma_family(
    name: str,
    param: float,
    order: int,
    spike_index: int = 1
) -> SchurParams:
    """
    Look up a builtin parameter family.

    Args:
        name: geometric, spike or harmonic
        param: q, amplitude or c
        order: Truncation order
        spike_index: Position of the spike

    Returns:
        SchurParams
    """
    if name == "geometric":
        return geometric_gamma(param, order)
    if name == "spike":
        return spike_gamma(param, spike_index)
    if name == "harmonic":
        return harmonic_gamma(param, order)
    raise IngestionError(
        f"Unknown parameter family '{name}', expected one of {', '.join(GAMMA_FAMILIES)}"
    )
