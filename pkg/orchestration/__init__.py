"""Orchestration package."""
from orchestration.pipeline_manager import (
    PipelineManager, get_pipeline_manager, failure_exit_code
)

__all__ = ['PipelineManager', 'get_pipeline_manager', 'failure_exit_code']
