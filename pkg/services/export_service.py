"""
Report, sweep and matrix output.
"""
import json
import os
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel

from models.reports import SweepPoint
from utils.helpers import format_complex_cell, matrix_to_pairs

Payload = Union[BaseModel, Dict[str, Any], List[Any]]


class ExportService:
    """Writes deterministic JSON and CSV artefacts."""

    def __init__(self):
        """Initialize the export service."""
        logger.info("Export service initialized")

    def render_json(self, payload: Payload) -> str:
        """Canonical JSON text (sorted keys, two-space indent)."""
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json")
        return json.dumps(payload, indent=2, sort_keys=True)

    def write_json(self, payload: Payload, path: str) -> str:
        """Write ``payload`` as canonical JSON and return the path."""
        self._ensure_parent(path)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.render_json(payload))
            handle.write("\n")
        logger.info(f"Wrote {path}")
        return path

    def sweep_frame(self, points: List[SweepPoint]) -> pd.DataFrame:
        """Sweep as a two-column frame (n, value)."""
        return pd.DataFrame(
            {"n": [p.n for p in points], "value": [p.value for p in points]},
            columns=["n", "value"]
        )

    def write_sweep_csv(self, points: List[SweepPoint], path: str) -> str:
        """Write one sweep as CSV."""
        self._ensure_parent(path)
        self.sweep_frame(points).to_csv(path, index=False, float_format="%.17g")
        logger.info(f"Wrote {path}")
        return path

    def matrix_frame(self, matrix: np.ndarray) -> pd.DataFrame:
        """Complex matrix as a frame of ``re,im`` cells."""
        cells = [[format_complex_cell(v) for v in row] for row in np.atleast_2d(matrix)]
        return pd.DataFrame(cells)

    def write_matrix(
        self,
        matrix: np.ndarray,
        path: str,
        as_csv: bool,
        metadata: Optional[Dict[str, Any]] = None
    ) -> str:
        """
        Dump a dense complex matrix.

        Args:
            matrix: Matrix to write
            path: Target file
            as_csv: CSV with quoted ``re,im`` cells, else nested JSON pairs
            metadata: Extra keys for the JSON document (ignored for CSV)

        Returns:
            The path written
        """
        if as_csv:
            self._ensure_parent(path)
            self.matrix_frame(matrix).to_csv(path, index=False, header=False)
            logger.info(f"Wrote {path}")
            return path
        return self.write_json(dict(metadata or {}, matrix=matrix_to_pairs(matrix)), path)

    @staticmethod
    def _ensure_parent(path: str) -> None:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)


# Singleton instance
_export_service = None


def get_export_service() -> ExportService:
    """Get or create export service instance."""
    global _export_service
    if _export_service is None:
        _export_service = ExportService()
    return _export_service
