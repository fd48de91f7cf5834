import numpy as np
import pytest

from ellcas import EllipticSurface, QuadratureSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def strip():
    return EllipticSurface(d=1.0, mu0=0.0)


@pytest.fixture
def fast_quad():
    """Loosened momentum tolerance for qualitative checks."""
    return QuadratureSpec(p_rel_tol=1e-6)
