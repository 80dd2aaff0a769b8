"""
Pydantic models describing where a run's input comes from.
"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from models.sequences import MomentSequence, PowerSeries, SchurParams


class InputKind(str, Enum):
    """Kind of input a run starts from."""
    WEIGHT = "weight"
    MOMENTS = "moments"
    THETA = "theta"
    GAMMA = "gamma"
    GAMMA_AND_MOMENTS = "gamma+moments"


class SourceSpec(BaseModel):
    """Source flags as given on the command line or in a run file."""
    weight: Optional[str] = Field(None, description="Builtin weight name or CSV path")
    cos_coeffs: Optional[List[float]] = Field(None, description="Cosine weight coefficients")
    power: Optional[float] = Field(None, ge=0.0, description="Exponent of the zero weight")
    moments: Optional[str] = Field(None, description="Moments as JSON text or a JSON file")
    theta: Optional[str] = Field(None, description="Schur coefficients as JSON text or file")
    gamma_file: Optional[str] = Field(None, description="Schur parameter JSON file")
    gamma_family: Optional[str] = Field(None, description="Builtin parameter family")
    family_param: Optional[float] = Field(None, description="Family parameter")
    spike_index: int = Field(1, ge=0, description="Index of the spike family entry")

    class Config:
        json_schema_extra = {
            "example": {
                "weight": "zero-squared"
            }
        }


class ResolvedInput(BaseModel):
    """Parsed input together with its provenance fields."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: InputKind
    description: str
    digest: str
    gamma: Optional[SchurParams] = None
    moments: Optional[MomentSequence] = None
    theta: Optional[PowerSeries] = None
