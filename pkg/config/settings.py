"""
Application settings and configuration.
"""
from pydantic_settings import BaseSettings
from typing import List


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Application
    app_name: str = "SchurScope"
    app_version: str = "1.0.0"
    environment: str = "development"

    # Numerical tolerances
    tol_regular: float = 1e-12          # |gamma_j| <= 1 - tol_regular for non-terminal entries
    tol_unimodular: float = 1e-9        # band around |gamma| = 1 classified as terminal
    tol_moment_normalization: float = 1e-12
    tol_toeplitz_psd: float = 1e-10
    tol_toeplitz_margin: float = 1e-12
    tol_negative_weight: float = 1e-12
    tol_identity: float = 1e-10
    tol_quadruple: float = 1e-6
    quadruple_check_order: int = 24

    # Combinatorial oracle
    brute_force_cap: int = 10
    log_space_threshold: int = 64

    # Run defaults
    default_order: int = 256
    default_grid: int = 4096
    default_sweep_sizes: List[int] = [4, 8, 16, 32, 64, 128]
    default_seed: int = 0
    quad_points: int = 4096

    # Verdict thresholds
    epsilon_min: float = 1e-3
    slope_cutoff: float = 0.25
    c_min: float = 1e-6
    tail_share_max: float = 0.01
    l2_tail_share_max: float = 0.2
    plateau_tolerance: float = 0.02
    min_tail_entries: int = 8

    # Execution
    workers: int = 1
    output_dir: str = "reports"

    # Logging
    log_level: str = "INFO"
    log_file: str = "logs/schurscope.log"

    class Config:
        env_file = ".env"
        case_sensitive = False


# Global settings instance
settings = Settings()
