import numpy as np
import pytest

from nozzlebench.geometry import build_nozzle_profile
from nozzlebench.meshing import generate_axisym_mesh, generate_pipe_mesh, generate_rect_mesh

COARSE_SIZING = {
    "inlet": 2.4e-3,
    "convergent": 1.6e-3,
    "throat": 8e-4,
    "expansion": 1.6e-3,
}


@pytest.fixture(scope="session")
def nozzle_profile():
    return build_nozzle_profile()


@pytest.fixture(scope="session")
def coarse_nozzle_mesh(nozzle_profile):
    return generate_axisym_mesh(nozzle_profile, COARSE_SIZING)


@pytest.fixture(scope="session")
def small_pipe_mesh():
    return generate_pipe_mesh(radius=0.002, length=0.04, h=4e-4)


@pytest.fixture(scope="session")
def unit_square_mesh():
    """Coarsest rectangle mesh on the unit square."""
    return generate_rect_mesh(0.0, 1.0, 0.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def tiny_offaxis_mesh():
    """Small mesh away from the axis (r in [1, 1.2])."""
    return generate_rect_mesh(1.0, 1.2, 0.0, 0.2, 0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
