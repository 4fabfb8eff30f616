"""
Shared pytest fixtures: bundled spaces, random generators and preset paths
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from geometry.frame import ApSpace  # noqa: E402
from verify.spaces import random_space  # noqa: E402

PRESETS = Path(__file__).parent / "presets"

# A point where the E2 rotation frame has exact hand values
E2_POINT = np.array([0.0, np.pi / 4])


@pytest.fixture
def presets_dir() -> Path:
    return PRESETS


@pytest.fixture
def identity_space() -> ApSpace:
    """λᵢ^μ = δᵢ^μ in two dimensions"""
    return ApSpace.from_strings([["1", "0"], ["0", "1"]], label="identity")


@pytest.fixture
def e1_space() -> ApSpace:
    """Diagonal exponential frame: rows (e^{x1}, 0), (0, 1)"""
    return ApSpace.from_strings([["exp(x1)", "0"], ["0", "1"]], label="e1")


@pytest.fixture
def e2_space() -> ApSpace:
    """Rotation frame by the angle x2"""
    return ApSpace.from_strings([["cos(x2)", "sin(x2)"], ["-sin(x2)", "cos(x2)"]], label="e2")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_sample_set(seed: int, n: int, num_points: int = 20):
    """A random space together with points in [-1, 1]^n at which its frame is regular"""
    rng = np.random.default_rng(seed)
    points = rng.uniform(-1.0, 1.0, size=(num_points, n))
    return random_space(rng, n, points=points), points
