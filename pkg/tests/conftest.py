"""
Pytest Configuration and Shared Fixtures
========================================

Shared grids, coverings and suite settings. Unit tests run at small N so
the dense operator routines stay fast; refinement checks use explicit grids.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from alphamod.core.covering import build_covering  # noqa: E402
from alphamod.core.grid import make_grid  # noqa: E402
from alphamod.verify.suites import load_verify_defaults  # noqa: E402


def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line("markers", "unit: Unit tests")
    config.addinivalue_line("markers", "integration: Integration tests")
    config.addinivalue_line("markers", "slow: Slow running tests")


# ============================================
# Grids
# ============================================

@pytest.fixture
def grid_1d():
    """1D torus of period 2 pi with N = 64."""
    return make_grid(1, 64, 2 * math.pi)


@pytest.fixture
def grid_32():
    """1D torus of period 2 pi with N = 32 (dense-operator oracles)."""
    return make_grid(1, 32, 2 * math.pi)


@pytest.fixture
def grid_2d():
    """2D torus of period 2 pi with N = 16 per axis."""
    return make_grid(2, 16, 2 * math.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# ============================================
# Coverings
# ============================================

@pytest.fixture(params=[0.0, 0.5, 1.0], ids=["alpha0", "alpha0.5", "alpha1"])
def covering_1d(request, grid_1d):
    """Validated covering of the 1D band for each standard alpha."""
    return build_covering(request.param, grid_1d)


# ============================================
# Verification defaults
# ============================================

@pytest.fixture
def small_defaults():
    """Packaged defaults shrunk to N = 64 and a couple of trials."""
    return load_verify_defaults(
        overrides={
            "suite": {"points_per_axis": 64},
            "checks": {"trials": {name: 2 for name in (
                "thm11", "thm12", "lemma32", "band_limited", "highfreq",
                "appendix", "mollification", "regularization", "band_filter",
            )}},
        }
    )
