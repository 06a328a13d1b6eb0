import numpy as np
import pytest
from hypothesis import settings

from thinfilm.grid import RegularizationParams, build_grid
from thinfilm.stepper import SolverConfig, default_initial, integrate

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

STANDARD = RegularizationParams(1e-2, 1e-1, 1)


@pytest.fixture(scope="session")
def standard_params():
    return STANDARD


@pytest.fixture(scope="session")
def standard_run():
    """N=65, u0 = 0.5 + 0.25 cos(pi x), dt = 1e-5 fixed, T = 1e-3."""
    g = build_grid(65)
    return integrate(default_initial(g), STANDARD, SolverConfig().fixed_step(1e-5))


@pytest.fixture(scope="session")
def standard_run_half():
    g = build_grid(65)
    return integrate(default_initial(g), STANDARD, SolverConfig().fixed_step(5e-6))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
