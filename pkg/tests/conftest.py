"""Shared fixtures: seeded generators and random well-posed models."""

import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from matkit import ModelParams, random_params  # noqa: E402

SEED = 20240601
FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def random_models():
    """500 seeded models drawn uniformly, away from the degenerate gates."""
    generator = np.random.default_rng(SEED)
    return [random_params(generator) for _ in range(500)]


@pytest.fixture(scope="session")
def special_models():
    """500 seeded models with a diagonal H0 (phi0 = 0)."""
    generator = np.random.default_rng(SEED + 1)
    return [random_params(generator, phi0=0.0) for _ in range(500)]


@pytest.fixture
def worked_model():
    """eps = (1, -1), omega = (1, -1), phi1 = pi/4: EPs at lambda = -i and +i."""
    return ModelParams(1.0, -1.0, 1.0, -1.0, phi1=math.pi / 4)


@pytest.fixture
def fixture_path():
    def _path(name):
        return os.path.join(FIXTURES, name)
    return _path
