"""Analyzers package."""
from analyzers.sweep_analyzer import SweepAnalyzer, get_sweep_analyzer
from analyzers.verdict_analyzer import (
    VerdictAnalyzer, get_verdict_analyzer, EVIDENCE_NOTICE
)

__all__ = [
    'SweepAnalyzer', 'get_sweep_analyzer',
    'VerdictAnalyzer', 'get_verdict_analyzer', 'EVIDENCE_NOTICE'
]
