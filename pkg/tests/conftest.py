"""Test configuration."""
import numpy as np
import pytest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

# Settings for testing: no log file, no default output directory
os.environ['ENVIRONMENT'] = 'test'
os.environ['LOG_FILE'] = ''
os.environ['OUTPUT_DIR'] = ''

from loguru import logger  # noqa: E402

from config.settings import settings  # noqa: E402
from models.sequences import SchurParams  # noqa: E402


@pytest.fixture(autouse=True)
def restore_settings():
    """Undo tolerance changes made by CLI runs."""
    snapshot = settings.model_dump()
    yield
    for name, value in snapshot.items():
        setattr(settings, name, value)
    # CLI runs bind a sink to the captured stderr of that test
    logger.remove()
    logger.add(sys.stderr, level="WARNING")


@pytest.fixture
def gamma_two():
    """gamma_1 = 0.6, gamma_2 = 0.8 (gamma_0 unused by the factors)."""
    return SchurParams.from_values([0.0, 0.6, 0.8])


@pytest.fixture
def gamma_single():
    """Only gamma_1 = 0.6 is nonzero."""
    return SchurParams.from_values([0.0, 0.6])


@pytest.fixture
def random_gamma():
    """Reproducible truncated parameters with moduli up to 0.5."""
    rng = np.random.default_rng(7)
    moduli = 0.5 * rng.uniform(0.0, 1.0, size=10)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=10)
    return SchurParams(gamma=moduli * np.exp(1j * phases))
