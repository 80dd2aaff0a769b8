"""Services package."""
from services.sequence_service import SequenceService, get_sequence_service
from services.transform_service import (
    TransformService, get_transform_service, GAMMA_CONVENTION
)
from services.lmatrix_service import (
    LMatrixService, get_lmatrix_service,
    spectral_norm, smallest_singular_value
)
from services.oracle_service import MomentOracleService, get_moment_oracle_service
from services.ingest_service import IngestService, get_ingest_service
from services.export_service import ExportService, get_export_service

__all__ = [
    'SequenceService', 'get_sequence_service',
    'TransformService', 'get_transform_service', 'GAMMA_CONVENTION',
    'LMatrixService', 'get_lmatrix_service',
    'spectral_norm', 'smallest_singular_value',
    'MomentOracleService', 'get_moment_oracle_service',
    'IngestService', 'get_ingest_service',
    'ExportService', 'get_export_service'
]
