"""
Pydantic models for run configuration, numerical results and reports.
"""
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import settings


class Verdict(str, Enum):
    """Outcome of the Helson-Szegő decision procedure."""
    CERTIFIED_HS = "certified_hs"
    LIKELY_HS = "likely_hs"
    LIKELY_NOT_HS = "likely_not_hs"
    NOT_HS_NECESSARY_VIOLATION = "not_hs_necessary_violation"
    INCONCLUSIVE = "inconclusive"

    @property
    def exit_code(self) -> int:
        if self in (Verdict.CERTIFIED_HS, Verdict.LIKELY_HS):
            return 0
        if self in (Verdict.LIKELY_NOT_HS, Verdict.NOT_HS_NECESSARY_VIOLATION):
            return 1
        return 2


class OutputFormat(str, Enum):
    """Report file format."""
    JSON = "json"
    CSV = "csv"


class TailProduct(BaseModel):
    """Tail product prod_{j>=k} D_{gamma_j}."""
    value: float = Field(..., ge=0.0, le=1.0, description="Product value")
    degenerate: bool = Field(False, description="A terminal entry sits in the tail")


class ClassStats(BaseModel):
    """Membership statistics of a parameter sequence."""
    in_l2: bool = Field(..., description="Sequence is square summable")
    l2_norm_sq: float = Field(..., ge=0.0, description="sum |gamma_k|^2")
    strong_szego_sum: float = Field(..., ge=0.0, description="sum k |gamma_k|^2")
    szego_product: float = Field(
        ..., ge=0.0, le=1.0, description="prod_k (1 - |gamma_k|^2)^k"
    )


class SzegoIdentityResult(BaseModel):
    """Both sides of the Szegő product identity and their difference."""
    lhs: float = Field(..., description="prod_k (1 - |gamma_k|^2)")
    rhs: float = Field(..., description="exp of the mean of log(1 - |theta|^2)")
    residual: float = Field(..., description="|lhs - rhs|")
    radius: float = Field(..., description="Outer quadrature radius")
    quad_points: int = Field(..., description="Trapezoid nodes per circle")
    extrapolated: bool = Field(..., description="Radial extrapolation applied")
    singular: bool = Field(False, description="|theta| >= 1 at some node")


class DefectSeries(BaseModel):
    """Defect operator I - L L* and its rank-one expansion."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    defect_matrix: np.ndarray = Field(..., description="A = I - L L*")
    partial_sum: np.ndarray = Field(..., description="sum of xi_j xi_j*")
    terms: List[np.ndarray] = Field(default_factory=list, description="Vectors xi_j")
    residual: float = Field(..., description="||A - partial_sum||")
    residual_history: List[float] = Field(
        default_factory=list, description="Residual after each term"
    )
    lambda_max: float = Field(..., description="Largest eigenvalue of A")


class IdentityResiduals(BaseModel):
    """Residuals of the exact matrix identities at one (gamma, n)."""
    r_fact: float = Field(..., description="||L(gamma) - M(gamma) L(W gamma)||")
    r_rank1: float = Field(..., description="||I - M M* - eta eta*||")
    r_rank: float = Field(..., description="Second singular value of I - M M*")
    r_contr: float = Field(..., description="max(0, ||L|| - 1)")
    r_eig: float = Field(..., description="|1 - ||eta||^2 - prod (1 - |gamma_j|^2)|")
    r_bound: float = Field(..., description="max(0, prod D - sigma_min(M))")
    r_rank1_adjoint: float = Field(..., description="||I - M* M - eta~ eta~*||")
    r_eta_tilde: float = Field(..., description="| ||eta~|| - ||eta|| |")
    r_adjoint: float = Field(..., description="||reversed adjoint product - L*||")
    r_lower: float = Field(..., description="Largest entry above the diagonal of L")

    def as_dict(self) -> Dict[str, float]:
        return self.model_dump()

    def max_residual(self) -> float:
        return max(self.as_dict().values())

    def passes(self, tolerance: Optional[float] = None) -> bool:
        tol = settings.tol_identity if tolerance is None else tolerance
        return self.max_residual() <= tol


class SweepPoint(BaseModel):
    """One point of a finite-section sweep."""
    n: int = Field(..., ge=1, description="Section size")
    value: float = Field(..., description="Measured quantity")


class StrongSzegoCertificate(BaseModel):
    """Sufficient condition for the Helson-Szegő property."""
    passes: bool = Field(..., description="Certificate holds")
    strong_szego_sum: float = Field(..., ge=0.0, description="sum k |gamma_k|^2")
    szego_product: float = Field(..., ge=0.0, le=1.0, description="C^2 = prod_k (1 - |gamma_k|^2)^k")
    c_bound: float = Field(..., ge=0.0, description="prod_{k>=1} prod_{j>=k} D_{gamma_j}")
    tail_share: float = Field(..., ge=0.0, description="Last-quarter share of sum k|gamma_k|^2")
    tail_check_passed: bool = Field(..., description="Truncation tail heuristic held")
    reason: str = Field("", description="Why the certificate failed")


class Tolerances(BaseModel):
    """Tolerances recorded with every run."""
    tol_regular: float = Field(default_factory=lambda: settings.tol_regular, gt=0.0)
    tol_unimodular: float = Field(default_factory=lambda: settings.tol_unimodular, gt=0.0)
    tol_quadruple: float = Field(default_factory=lambda: settings.tol_quadruple, gt=0.0)
    tol_identity: float = Field(default_factory=lambda: settings.tol_identity, gt=0.0)


class RunConfig(BaseModel):
    """Per-run configuration assembled from settings, YAML and CLI flags."""
    order: int = Field(default_factory=lambda: settings.default_order, ge=1)
    grid: int = Field(default_factory=lambda: settings.default_grid, ge=8)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    sweep_sizes: List[int] = Field(default_factory=lambda: list(settings.default_sweep_sizes))
    output_format: OutputFormat = Field(OutputFormat.JSON)
    seed: int = Field(default_factory=lambda: settings.default_seed, ge=0)
    workers: int = Field(default_factory=lambda: settings.workers, ge=1)
    quad_points: int = Field(default_factory=lambda: settings.quad_points, ge=16)
    out: Optional[str] = Field(
        default_factory=lambda: settings.output_dir, description="Output directory (None: no files)"
    )

    @field_validator("sweep_sizes")
    @classmethod
    def _check_sizes(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("sweep_sizes must not be empty")
        if value[0] < 1:
            raise ValueError("sweep sizes must be positive")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError(f"sweep_sizes must be strictly ascending, got {value}")
        return value

    @model_validator(mode="after")
    def _check_grid(self) -> "RunConfig":
        if self.grid < 8 * self.order:
            raise ValueError(
                f"grid ({self.grid}) must be at least 8 * order ({8 * self.order})"
            )
        return self

    class Config:
        json_schema_extra = {
            "example": {
                "order": 256,
                "grid": 4096,
                "sweep_sizes": [4, 8, 16, 32, 64, 128],
                "output_format": "json",
                "seed": 0,
                "workers": 1
            }
        }


class Provenance(BaseModel):
    """Everything needed to reproduce a report."""
    input_kind: str = Field(..., description="weight, moments, theta or gamma")
    input_description: str = Field(..., description="Human-readable source")
    input_digest: str = Field(..., description="SHA-256 of the canonical input")
    truncation_order: int = Field(..., description="Number of parameters used")
    tolerances: Tolerances = Field(default_factory=Tolerances)
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(0)
    tool_version: str = Field(default_factory=lambda: settings.app_version)
    gamma_convention: str = Field(..., description="Sign and conjugation convention")
    quadruple_discrepancy: Optional[float] = Field(
        None, description="Max |gamma Levinson - gamma Schur| on the checked window"
    )


class DiagnosticReport(BaseModel):
    """Outcome and evidence of the Helson-Szegő diagnosis."""
    verdict: Verdict
    sigma_sweep: List[SweepPoint] = Field(default_factory=list)
    sigma_inf: Optional[float] = None
    sigma_slope: Optional[float] = None
    riesz_sweep: List[SweepPoint] = Field(default_factory=list)
    riesz_slope: Optional[float] = None
    conjugation_sweep: List[SweepPoint] = Field(default_factory=list)
    oblique_sweep: List[SweepPoint] = Field(default_factory=list)
    strong_szego: Optional[StrongSzegoCertificate] = None
    szego_identity_residual: Optional[float] = None
    szego_identity_singular: bool = False
    epsilon_evidence: Optional[float] = Field(
        None, description="lambda_max of the partial defect series (1 - epsilon)"
    )
    class_stats: Optional[ClassStats] = None
    notes: List[str] = Field(default_factory=list)
    provenance: Provenance


class VerificationSummary(BaseModel):
    """Result of a randomized identity campaign."""
    trials: int
    n: int
    seed: int
    tolerance: float
    max_residuals: Dict[str, float] = Field(default_factory=dict)
    failures: List[str] = Field(default_factory=list)

    @property
    def passes(self) -> bool:
        return not self.failures
