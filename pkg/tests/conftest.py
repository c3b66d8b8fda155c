import numpy as np
import pytest

from qjumps import (
    CorrelationKernel,
    PhysicalConstants,
    build_grid,
    gaussian_packet,
    make_noise_model,
)

# Reference setup used throughout: hbar = m = 1, A = 0.5 via the gaussian
# kernel C = 1, ell = 2, minimum-uncertainty packet sigma0^2 = 0.5 at rest.
SIGMA0_SQ = 0.5
DT = 0.005
T_FINAL = 2.0


@pytest.fixture(scope="session")
def constants():
    return PhysicalConstants()


@pytest.fixture(scope="session")
def model():
    return make_noise_model(CorrelationKernel.gaussian(1.0, 2.0))


@pytest.fixture(scope="session")
def model_zero():
    return make_noise_model(CorrelationKernel.gaussian(0.0, 2.0))


@pytest.fixture(scope="session")
def rho_grid():
    return build_grid(128, -10.0, 10.0)


@pytest.fixture(scope="session")
def traj_grid():
    return build_grid(256, -10.0, 10.0)


@pytest.fixture(scope="session")
def packet_rho(rho_grid):
    return gaussian_packet(rho_grid, 0.0, SIGMA0_SQ)


@pytest.fixture(scope="session")
def packet_traj(traj_grid):
    return gaussian_packet(traj_grid, 0.0, SIGMA0_SQ)
