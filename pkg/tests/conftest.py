from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from memcarve import CarveConfig, default_config


@pytest.fixture(scope="session")
def cfg() -> CarveConfig:
    return default_config()


@pytest.fixture(scope="session")
def small_cfg() -> CarveConfig:
    """Small blocks and tiles so unit tests can use compact dumps."""
    return CarveConfig(block_size=64, min_tile_pixels=8)


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
