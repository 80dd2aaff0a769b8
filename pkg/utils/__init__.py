"""Utils package."""
from utils.helpers import (
    complex_to_pairs,
    pairs_to_complex,
    matrix_to_pairs,
    format_complex_cell,
    digest_payload,
    compositions,
    loglog_slope,
    random_schur_entries
)
from utils.exceptions import (
    SchurScopeError,
    InvalidParameterError,
    NotASchurFunctionError,
    InconsistentInputError,
    NotNormalizedError,
    InvalidWeightError,
    DegenerateMeasureError,
    SingularFactorError,
    BruteForceCapError,
    ProvenanceError,
    IngestionError,
    InvariantViolationError
)

__all__ = [
    'complex_to_pairs',
    'pairs_to_complex',
    'matrix_to_pairs',
    'format_complex_cell',
    'digest_payload',
    'compositions',
    'loglog_slope',
    'random_schur_entries',
    'SchurScopeError',
    'InvalidParameterError',
    'NotASchurFunctionError',
    'InconsistentInputError',
    'NotNormalizedError',
    'InvalidWeightError',
    'DegenerateMeasureError',
    'SingularFactorError',
    'BruteForceCapError',
    'ProvenanceError',
    'IngestionError',
    'InvariantViolationError'
]
