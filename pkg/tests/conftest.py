import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from basinwaves.assembly import EdgeTables, VolumeTables
from basinwaves.mesh import structured_rect_mesh
from basinwaves.model import ModelConfig, SemidiscreteSystem, gaussian_dip_bottom
from basinwaves.space import FunctionSpace

settings.register_profile(
    "default", deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

UNIT_SQUARE = (0.0, 1.0, 0.0, 1.0)


@pytest.fixture(scope="session")
def unit_mesh8():
    return structured_rect_mesh(8, 8, UNIT_SQUARE)


@pytest.fixture(scope="session")
def unit_mesh4():
    return structured_rect_mesh(4, 4, UNIT_SQUARE)


@pytest.fixture(scope="session")
def scalar_p1(unit_mesh8):
    return FunctionSpace(unit_mesh8, 1, rank=1)


@pytest.fixture(scope="session")
def scalar_p2(unit_mesh8):
    return FunctionSpace(unit_mesh8, 2, rank=1)


@pytest.fixture(scope="session")
def vector_p2(unit_mesh8):
    return FunctionSpace(unit_mesh8, 2, rank=2)


@pytest.fixture(scope="session")
def tables8(unit_mesh8):
    return VolumeTables(unit_mesh8, 8), EdgeTables(unit_mesh8, 8)


def make_manufactured_system(N, degree_eta=1, degree_u=2, g=1.0,
                             check_pd=False):
    mesh = structured_rect_mesh(N, N, UNIT_SQUARE)
    cfg = ModelConfig(bathymetry=gaussian_dip_bottom(), g=g, gamma=1000.0,
                      forcing="manufactured")
    return SemidiscreteSystem(mesh, cfg, degree_eta=degree_eta,
                              degree_u=degree_u, check_pd=check_pd)


@pytest.fixture(scope="session")
def msys8():
    return make_manufactured_system(8)


def random_coeffs(rng, n):
    return rng.standard_normal(n)


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def fitted_order(hs, errs):
    """Least-squares slope of log(err) against log(h)."""
    hs = np.asarray(hs, float)
    errs = np.asarray(errs, float)
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
