"""
Pydantic models for parameter sequences, power series and moments.
"""
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as npoly
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import settings
from utils.exceptions import (
    InconsistentInputError,
    InvalidParameterError,
    NotASchurFunctionError,
)
from utils.helpers import complex_to_pairs, pairs_to_complex

# Dense complex matrices travel as plain ndarrays (row-major, complex128).
DenseComplexMatrix = np.ndarray

Scalar = Union[int, float, complex]


def as_complex_vector(value: Any) -> np.ndarray:
    """Coerce lists, pair lists and arrays into a read-only complex vector."""
    if isinstance(value, np.ndarray):
        arr = np.array(value, dtype=np.complex128)
    elif isinstance(value, (list, tuple)):
        arr = pairs_to_complex(value)
    else:
        raise TypeError(f"Expected a sequence of numbers, got {type(value).__name__}")
    if arr.ndim != 1:
        raise ValueError(f"Expected a one-dimensional sequence, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


class SchurParams(BaseModel):
    """
    Schur (Verblunsky) parameter sequence gamma_0, gamma_1, ...

    Entries beyond the stored length are zero. When ``terminal_unimodular``
    is set the last stored entry has modulus 1 and the sequence ends there.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    gamma: np.ndarray = Field(..., description="Stored parameters gamma_0..gamma_N")
    terminal_unimodular: bool = Field(False, description="Last entry is unimodular")
    trust_horizon: Optional[int] = Field(
        None, ge=0, description="Last index fully determined by the input data"
    )

    @field_validator("gamma", mode="before")
    @classmethod
    def _coerce_gamma(cls, value: Any) -> np.ndarray:
        return as_complex_vector(value)

    @model_validator(mode="after")
    def _check_moduli(self) -> "SchurParams":
        moduli = np.abs(self.gamma)
        inner = moduli
        if self.terminal_unimodular:
            if moduli.size == 0:
                raise InvalidParameterError("Terminal flag set on an empty sequence")
            if abs(moduli[-1] - 1.0) > settings.tol_unimodular:
                raise InvalidParameterError(
                    f"Terminal entry has modulus {moduli[-1]!r}, expected 1"
                )
            inner = moduli[:-1]
        bad = np.flatnonzero(inner > 1.0 - settings.tol_regular)
        if bad.size:
            j = int(bad[0])
            raise InvalidParameterError(f"|gamma_{j}| = {inner[j]!r} is not below 1")
        return self

    @classmethod
    def from_values(
        cls,
        values: Sequence[Scalar],
        terminal_unimodular: bool = False,
        trust_horizon: Optional[int] = None
    ) -> "SchurParams":
        """Build from plain numbers."""
        return cls(
            gamma=np.asarray(values, dtype=np.complex128),
            terminal_unimodular=terminal_unimodular,
            trust_horizon=trust_horizon
        )

    @classmethod
    def zero(cls) -> "SchurParams":
        """The zero sequence (Lebesgue measure)."""
        return cls(gamma=np.zeros(0, dtype=np.complex128))

    @property
    def size(self) -> int:
        return int(self.gamma.size)

    @property
    def last_index(self) -> int:
        """Index of the last stored entry, -1 when empty."""
        return self.size - 1

    @property
    def support(self) -> int:
        """One past the index of the last nonzero entry."""
        nonzero = np.flatnonzero(self.gamma)
        return int(nonzero[-1]) + 1 if nonzero.size else 0

    @property
    def terminal_index(self) -> Optional[int]:
        return self.last_index if self.terminal_unimodular else None

    def entry(self, j: int) -> complex:
        """gamma_j with zero extension."""
        if 0 <= j < self.size:
            return complex(self.gamma[j])
        return 0j

    def window(self, start: int, stop: int) -> np.ndarray:
        """Entries gamma_start..gamma_{stop-1}, zero-extended."""
        out = np.zeros(max(stop - start, 0), dtype=np.complex128)
        lo, hi = max(start, 0), min(stop, self.size)
        if hi > lo:
            out[lo - start:hi - start] = self.gamma[lo:hi]
        return out

    def to_json_dict(self) -> Dict[str, Any]:
        """JSON form ``{"gamma": [[re, im], ...], "terminal_unimodular": bool}``."""
        data: Dict[str, Any] = {
            "gamma": complex_to_pairs(self.gamma),
            "terminal_unimodular": self.terminal_unimodular,
        }
        if self.trust_horizon is not None:
            data["trust_horizon"] = self.trust_horizon
        return data

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "SchurParams":
        return cls(
            gamma=list(data["gamma"]),
            terminal_unimodular=bool(data.get("terminal_unimodular", False)),
            trust_horizon=data.get("trust_horizon")
        )


class PowerSeries(BaseModel):
    """
    Truncated power series sum_{k<=order} c_k z^k.

    Arithmetic between two series is carried out to the smaller order.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    coeffs: np.ndarray = Field(..., description="Coefficients c_0..c_order")

    @field_validator("coeffs", mode="before")
    @classmethod
    def _coerce_coeffs(cls, value: Any) -> np.ndarray:
        arr = as_complex_vector(value)
        if arr.size == 0:
            raise ValueError("A power series needs at least the constant coefficient")
        return arr

    @classmethod
    def from_values(cls, values: Sequence[Scalar]) -> "PowerSeries":
        return cls(coeffs=np.asarray(values, dtype=np.complex128))

    @classmethod
    def constant(cls, value: Scalar, order: int) -> "PowerSeries":
        coeffs = np.zeros(order + 1, dtype=np.complex128)
        coeffs[0] = value
        return cls(coeffs=coeffs)

    @property
    def order(self) -> int:
        return int(self.coeffs.size) - 1

    def _operands(self, other: Union["PowerSeries", Scalar]):
        if isinstance(other, PowerSeries):
            order = min(self.order, other.order)
            return self.coeffs[:order + 1], other.coeffs[:order + 1], order
        rhs = np.zeros(self.coeffs.size, dtype=np.complex128)
        rhs[0] = other
        return self.coeffs, rhs, self.order

    def __add__(self, other: Union["PowerSeries", Scalar]) -> "PowerSeries":
        a, b, _ = self._operands(other)
        return PowerSeries(coeffs=a + b)

    __radd__ = __add__

    def __sub__(self, other: Union["PowerSeries", Scalar]) -> "PowerSeries":
        a, b, _ = self._operands(other)
        return PowerSeries(coeffs=a - b)

    def __rsub__(self, other: Scalar) -> "PowerSeries":
        a, b, _ = self._operands(other)
        return PowerSeries(coeffs=b - a)

    def __neg__(self) -> "PowerSeries":
        return PowerSeries(coeffs=-self.coeffs)

    def __mul__(self, other: Union["PowerSeries", Scalar]) -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return PowerSeries(coeffs=self.coeffs * other)
        a, b, order = self._operands(other)
        return PowerSeries(coeffs=np.convolve(a, b)[:order + 1])

    __rmul__ = __mul__

    def __truediv__(self, other: Union["PowerSeries", Scalar]) -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return PowerSeries(coeffs=self.coeffs / other)
        a, b, order = self._operands(other)
        if b[0] == 0:
            raise NotASchurFunctionError("Series division by a series with zero constant term")
        q = np.zeros(order + 1, dtype=np.complex128)
        q[0] = a[0] / b[0]
        for k in range(1, order + 1):
            q[k] = (a[k] - np.dot(b[1:k + 1], q[k - 1::-1])) / b[0]
        return PowerSeries(coeffs=q)

    def times_z(self) -> "PowerSeries":
        """z * f, kept at the same order."""
        coeffs = np.zeros_like(self.coeffs)
        coeffs[1:] = self.coeffs[:-1]
        return PowerSeries(coeffs=coeffs)

    def divide_z(self) -> "PowerSeries":
        """f / z for f(0) = 0; the order drops by one."""
        if self.order == 0:
            raise InconsistentInputError("Cannot divide an order-0 series by z")
        return PowerSeries(coeffs=self.coeffs[1:])

    def evaluate(self, z: Union[Scalar, np.ndarray]) -> Union[complex, np.ndarray]:
        """Horner evaluation of the truncated series."""
        return npoly.polyval(z, self.coeffs)

    def to_json_dict(self) -> Dict[str, Any]:
        return {"coeffs": complex_to_pairs(self.coeffs)}


class MomentSequence(BaseModel):
    """
    Trigonometric moments m_0..m_N of a measure on the unit circle.

    m_k is the integral of t^k; m_{-k} is conj(m_k). The Toeplitz
    section [m_{k-j}] must be positive semidefinite.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    moments: np.ndarray = Field(..., description="Moments m_0..m_N")

    @field_validator("moments", mode="before")
    @classmethod
    def _coerce_moments(cls, value: Any) -> np.ndarray:
        arr = as_complex_vector(value)
        if arr.size == 0:
            raise ValueError("A moment sequence needs at least m_0")
        return arr

    @model_validator(mode="after")
    def _check_positive(self) -> "MomentSequence":
        m0 = self.moments[0]
        scale = max(1.0, abs(m0))
        if abs(m0.imag) > settings.tol_toeplitz_psd * scale:
            raise InconsistentInputError(f"m_0 must be real, got {m0!r}")
        lowest = float(scipy.linalg.eigvalsh(self.toeplitz(self.order + 1))[0])
        if lowest < -settings.tol_toeplitz_psd * scale:
            raise InconsistentInputError(
                f"Toeplitz section is not positive semidefinite (min eigenvalue {lowest:.3e})"
            )
        return self

    @classmethod
    def from_values(cls, values: Sequence[Scalar]) -> "MomentSequence":
        return cls(moments=np.asarray(values, dtype=np.complex128))

    @property
    def order(self) -> int:
        return int(self.moments.size) - 1

    def value(self, k: int) -> complex:
        """m_k for |k| <= order."""
        if abs(k) > self.order:
            raise InconsistentInputError(f"Moment m_{k} is beyond order {self.order}")
        return complex(self.moments[k]) if k >= 0 else complex(np.conj(self.moments[-k]))

    def toeplitz(self, size: int) -> DenseComplexMatrix:
        """Toeplitz section G[j, k] = m_{k-j}, j, k < size."""
        if size - 1 > self.order:
            raise InconsistentInputError(
                f"Toeplitz section of size {size} needs moments up to m_{size - 1}"
            )
        m = self.moments[:size]
        return scipy.linalg.toeplitz(np.conj(m), m)

    def to_json_dict(self) -> Dict[str, Any]:
        """JSON form ``{"moments": [[re, im], ...]}``."""
        return {"moments": complex_to_pairs(self.moments)}
