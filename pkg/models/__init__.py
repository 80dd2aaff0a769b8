"""Models package."""
from models.sequences import (
    SchurParams, PowerSeries, MomentSequence, DenseComplexMatrix, as_complex_vector
)
from models.reports import (
    Verdict, OutputFormat, TailProduct, ClassStats, SzegoIdentityResult,
    DefectSeries, IdentityResiduals, SweepPoint, StrongSzegoCertificate,
    Tolerances, RunConfig, Provenance, DiagnosticReport, VerificationSummary
)
from models.sources import InputKind, SourceSpec, ResolvedInput

__all__ = [
    'SchurParams', 'PowerSeries', 'MomentSequence', 'DenseComplexMatrix',
    'as_complex_vector',
    'Verdict', 'OutputFormat', 'TailProduct', 'ClassStats', 'SzegoIdentityResult',
    'DefectSeries', 'IdentityResiduals', 'SweepPoint', 'StrongSzegoCertificate',
    'Tolerances', 'RunConfig', 'Provenance', 'DiagnosticReport', 'VerificationSummary',
    'InputKind', 'SourceSpec', 'ResolvedInput'
]
