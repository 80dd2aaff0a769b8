"""
Input ingestion: weights, moments, Schur coefficients and parameter files.
"""
import json
import os
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import ValidationError

from models.reports import RunConfig
from models.sequences import MomentSequence, PowerSeries, SchurParams
from models.sources import InputKind, ResolvedInput, SourceSpec
from services.transform_service import get_transform_service
from utils.exceptions import IngestionError
from utils.families import build_gamma_family, build_weight
from utils.helpers import digest_payload

WEIGHT_COLUMNS = ("weight", "w", "value")


class IngestService:
    """Turns source flags into validated models."""

    def __init__(self):
        """Initialize the ingest service."""
        self.transforms = get_transform_service()
        logger.info("Ingest service initialized")

    def read_json_argument(self, text: str) -> Any:
        """
        Decode JSON given inline or as a file path.

        Args:
            text: JSON text, or the path of a JSON file

        Returns:
            Decoded value
        """
        if os.path.isfile(text):
            try:
                with open(text, "r", encoding="utf-8") as handle:
                    return json.load(handle)
            except (OSError, json.JSONDecodeError) as e:
                raise IngestionError(f"Cannot read JSON file {text}: {e}") from e
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise IngestionError(f"Input is neither a file nor valid JSON: {e}") from e

    def parse_moments(self, text: str) -> MomentSequence:
        """Moments from ``[m_0, m_1, ...]`` or ``{"moments": [...]}``."""
        data = self.read_json_argument(text)
        values = data.get("moments") if isinstance(data, dict) else data
        if not isinstance(values, list):
            raise IngestionError("Moments must be a JSON list or an object with a 'moments' list")
        return MomentSequence(moments=values)

    def parse_theta(self, text: str) -> PowerSeries:
        """Schur coefficients from ``[theta_0, ...]`` or ``{"coeffs": [...]}``."""
        data = self.read_json_argument(text)
        values = data.get("coeffs") if isinstance(data, dict) else data
        if not isinstance(values, list):
            raise IngestionError("Theta must be a JSON list or an object with a 'coeffs' list")
        return PowerSeries(coeffs=values)

    def load_gamma_file(self, path: str) -> SchurParams:
        """Schur parameters from a ``{"gamma": [[re, im], ...]}`` file."""
        data = self.read_json_argument(path)
        if not isinstance(data, dict) or "gamma" not in data:
            raise IngestionError(f"{path} has no 'gamma' entry")
        return SchurParams.from_json_dict(data)

    def load_weight_csv(self, path: str) -> np.ndarray:
        """
        Weight samples on a uniform grid of [0, 2pi) from a CSV file.

        Uses the column named weight, w or value, else the last column.
        """
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise IngestionError(f"Cannot read weight CSV {path}: {e}") from e
        if frame.empty:
            raise IngestionError(f"Weight CSV {path} has no rows")
        column = next((c for c in frame.columns if str(c).strip().lower() in WEIGHT_COLUMNS),
                      frame.columns[-1])
        samples = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=float)
        if np.isnan(samples).any():
            raise IngestionError(f"Column '{column}' of {path} is not numeric")
        logger.debug(f"Loaded {samples.size} weight samples from {path}")
        return samples

    def _weight_moments(self, spec: SourceSpec, config: RunConfig) -> MomentSequence:
        if os.path.isfile(spec.weight):
            samples = self.load_weight_csv(spec.weight)
            return self.transforms.moments_from_weight(samples, config.order)
        weight = build_weight(spec.weight, cos_coeffs=spec.cos_coeffs, power=spec.power)
        return self.transforms.moments_from_weight(weight, config.order, grid=config.grid)

    def _describe(self, spec: SourceSpec) -> Dict[str, Any]:
        payload = spec.model_dump(exclude_none=True)
        for key in ("weight", "moments", "theta", "gamma_file"):
            value = payload.get(key)
            if value and os.path.isfile(value):
                with open(value, "rb") as handle:
                    payload[f"{key}_sha256"] = digest_payload(handle.read().decode("utf-8", "replace"))
        return payload

    def resolve(self, spec: SourceSpec, config: Optional[RunConfig] = None) -> ResolvedInput:
        """
        Resolve exactly one source (or gamma together with moments).

        Args:
            spec: Source flags
            config: Run configuration (order and grid for weights)

        Returns:
            ResolvedInput with the parsed models and an input digest
        """
        config = config or RunConfig()
        has_gamma = bool(spec.gamma_file or spec.gamma_family)
        has_moments = bool(spec.moments or spec.weight)
        chosen = [bool(spec.weight), bool(spec.moments), bool(spec.theta),
                  bool(spec.gamma_file), bool(spec.gamma_family)]
        if sum(chosen) == 0:
            raise IngestionError("No input source given")
        if sum(chosen) > 1 and not (has_gamma and has_moments and sum(chosen) == 2):
            raise IngestionError("Give one source, or a parameter source together with moments")

        payload = self._describe(spec)
        digest = digest_payload(payload)
        description = ", ".join(f"{k}={v}" for k, v in sorted(payload.items())
                                if not k.endswith("_sha256"))

        try:
            gamma = None
            if spec.gamma_file:
                gamma = self.load_gamma_file(spec.gamma_file)
            elif spec.gamma_family:
                if spec.family_param is None:
                    raise IngestionError("--gamma-family needs --family-param")
                gamma = build_gamma_family(
                    spec.gamma_family, spec.family_param, config.order, spec.spike_index
                )

            moments = None
            if spec.moments:
                moments = self.parse_moments(spec.moments)
            elif spec.weight:
                moments = self._weight_moments(spec, config)

            theta = self.parse_theta(spec.theta) if spec.theta else None
        except ValidationError as e:
            logger.error(f"Input failed validation: {e}")
            raise IngestionError(f"Input failed validation: {e}") from e

        if gamma is not None and moments is not None:
            kind = InputKind.GAMMA_AND_MOMENTS
        elif gamma is not None:
            kind = InputKind.GAMMA
        elif theta is not None:
            kind = InputKind.THETA
        elif spec.weight:
            kind = InputKind.WEIGHT
        else:
            kind = InputKind.MOMENTS

        logger.info(f"Resolved {kind.value} input ({description})")
        return ResolvedInput(
            kind=kind,
            description=description,
            digest=digest,
            gamma=gamma,
            moments=moments,
            theta=theta
        )


# Singleton instance
_ingest_service = None


def get_ingest_service() -> IngestService:
    """Get or create ingest service instance."""
    global _ingest_service
    if _ingest_service is None:
        _ingest_service = IngestService()
    return _ingest_service
