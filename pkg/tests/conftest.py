"""Shared fixtures for the battery test suite."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project root to Python path for imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from core.model import ModelParams  # noqa: E402
from tests.helpers import FIG2  # noqa: E402


@pytest.fixture
def fig2_params() -> ModelParams:
    """Charging-curve parameters at n_s = 0.3 with a modest truncation."""
    return ModelParams(**FIG2, n_s=0.3, dim=30)


@pytest.fixture
def small_params() -> ModelParams:
    return ModelParams(**FIG2, n_s=0.5, dim=8)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
