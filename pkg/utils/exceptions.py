"""
Domain errors.

Every error is a ``ValueError`` so callers that only care about bad input
can catch the builtin.
"""
from typing import Optional


class SchurScopeError(ValueError):
    """Base class for all SchurScope errors."""


class InvalidParameterError(SchurScopeError):
    """A Schur parameter violates |gamma_j| < 1 or the terminal convention."""


class NotASchurFunctionError(SchurScopeError):
    """A coefficient sequence is not the Taylor head of a Schur function."""


class InconsistentInputError(SchurScopeError):
    """Two inputs that must agree (orders, lengths, shapes) do not."""


class NotNormalizedError(SchurScopeError):
    """Moment sequence with m_0 != 1."""


class InvalidWeightError(SchurScopeError):
    """Weight samples are negative or the grid is too coarse."""


class DegenerateMeasureError(SchurScopeError):
    """Zero mass or a singular Toeplitz section."""

    def __init__(self, message: str, order_reached: Optional[int] = None):
        super().__init__(message)
        self.order_reached = order_reached


class SingularFactorError(SchurScopeError):
    """A unimodular parameter falls inside a factor window."""


class BruteForceCapError(SchurScopeError):
    """Combinatorial evaluation requested above the configured cap."""


class ProvenanceError(SchurScopeError):
    """Independently supplied inputs describe different measures."""


class IngestionError(SchurScopeError):
    """Input source could not be read or parsed."""


class InvariantViolationError(SchurScopeError):
    """A numerically checked identity or monotonicity property failed."""
