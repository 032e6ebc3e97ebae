import numpy as np
import pytest

from app.config.settings import settings
from app.domain.grid_model import Domain1D
from app.domain.measure_model import SignedMeasure
from app.services.grid_service import build_grid


@pytest.fixture(autouse=True)
def restaurar_settings():
    """Los tests que tocan settings no contaminan a los demás"""
    snapshot = settings.model_dump()
    yield
    for key, value in snapshot.items():
        setattr(settings, key, value)


@pytest.fixture
def unit_domain():
    return Domain1D(((0.0, 1.0),))


@pytest.fixture
def grid32(unit_domain):
    return build_grid(unit_domain, 32)


@pytest.fixture
def grid64(unit_domain):
    return build_grid(unit_domain, 64)


@pytest.fixture
def delta1():
    return SignedMeasure.from_atoms([(1.0, 1.0)], 0.5)


@pytest.fixture
def delta_half():
    return SignedMeasure.from_atoms([(0.5, 1.0)], 0.5)


@pytest.fixture
def appendix_mu():
    """δ₁ + δ_{0.6} − 0.05·δ_{0.3}"""
    return SignedMeasure.from_atoms([(1.0, 1.0), (0.6, 1.0), (0.3, -0.05)], 0.6)


@pytest.fixture
def appendix_mu_small():
    """δ₁ + δ_{0.6} − 0.002·δ_{0.3}, cumple (μ2) fuerte en R = 1"""
    return SignedMeasure.from_atoms([(1.0, 1.0), (0.6, 1.0), (0.3, -0.002)], 0.6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
