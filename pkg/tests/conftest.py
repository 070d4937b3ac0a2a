import numpy as np
import pytest

from nfield import centered_grid, make_kernel, make_plan, make_weight, sigmoid
from nfield.dynamics import ModelParams


@pytest.fixture(scope="session")
def grid1d():
    return centered_grid(1, 8.0, 1025)  # spacing 1/64


@pytest.fixture(scope="session")
def grid2d():
    return centered_grid(2, 4.0, 129)  # spacing 1/16


@pytest.fixture(scope="session")
def exp_weight():
    return make_weight("exponential", 1, rate=1.0)


@pytest.fixture(scope="session")
def poly_weight():
    return make_weight("polynomial", 1, exponent=2.0)


@pytest.fixture(scope="session")
def kernel1d(grid1d):
    return make_kernel("polynomial_bump", 1, grid1d.spacing, normalize_to=1.0)


@pytest.fixture(scope="session")
def plan1d(kernel1d, grid1d):
    return make_plan(kernel1d, grid1d, "fourier")


@pytest.fixture(scope="session")
def params1d(kernel1d, plan1d):
    return ModelParams(kernel1d, sigmoid(a=1.0, beta=4.0, theta=0.5), 0.1, plan1d)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20250809)
