"""Utility functions."""
import hashlib
import json
from typing import Any, Iterator, List, Sequence, Tuple

import numpy as np


def complex_to_pairs(values: Sequence[complex]) -> List[List[float]]:
    """Encode complex numbers as ``[re, im]`` pairs."""
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


def pairs_to_complex(values: Sequence[Any]) -> np.ndarray:
    """
    Decode a JSON list into a complex vector.

    Entries may be plain numbers or ``[re, im]`` pairs.

    Args:
        values: Decoded JSON list

    Returns:
        complex128 vector
    """
    out = np.zeros(len(values), dtype=np.complex128)
    for j, v in enumerate(values):
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ValueError(f"Entry {j} must be a number or an [re, im] pair, got {v!r}")
            out[j] = complex(float(v[0]), float(v[1]))
        else:
            out[j] = complex(v)
    return out


def matrix_to_pairs(matrix: np.ndarray) -> List[List[List[float]]]:
    """Encode a complex matrix as nested ``[re, im]`` pairs."""
    return [complex_to_pairs(row) for row in np.atleast_2d(matrix)]


def format_complex_cell(value: complex) -> str:
    """Format a complex value as a ``re,im`` CSV cell."""
    return f"{float(np.real(value))!r},{float(np.imag(value))!r}"


def digest_payload(payload: Any) -> str:
    """SHA-256 of the canonical JSON form of ``payload``."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def compositions(n: int) -> Iterator[Tuple[int, ...]]:
    """
    Enumerate the ordered compositions of ``n`` into positive parts.

    There are 2**(n-1) of them for n >= 1.
    """
    if n <= 0:
        return
    # each bit of the mask marks a cut between consecutive units
    for mask in range(1 << (n - 1)):
        parts = []
        run = 1
        for bit in range(n - 1):
            if mask >> bit & 1:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield tuple(parts)


def loglog_slope(sizes: Sequence[float], values: Sequence[float]) -> float:
    """
    Least-squares slope of log(values) against log(sizes).

    Non-positive values are floored at the smallest positive double so a
    collapse to zero reads as a steep decay instead of a NaN.
    """
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.maximum(np.asarray(values, dtype=float), np.finfo(float).tiny))
    if len(x) < 2:
        return 0.0
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def random_schur_entries(
    rng: np.random.Generator,
    support: int,
    max_modulus: float
) -> np.ndarray:
    """
    Draw ``support`` complex entries with uniform phase and modulus <= max_modulus.

    Args:
        rng: numpy random generator
        support: number of entries
        max_modulus: upper bound on |gamma_j| (strictly below 1)

    Returns:
        complex128 vector
    """
    moduli = max_modulus * np.sqrt(rng.uniform(0.0, 1.0, size=support))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=support)
    return moduli * np.exp(1j * phases)
