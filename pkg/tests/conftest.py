import numpy as np
import pytest

from trdevdiv import build_grid, build_spectral_scale


@pytest.fixture(scope="session")
def grid8():
    return build_grid(2, 8)


@pytest.fixture(scope="session")
def scale8(grid8):
    return build_spectral_scale(grid8)


@pytest.fixture(scope="session")
def scale16():
    return build_spectral_scale(build_grid(2, 16))


@pytest.fixture(scope="session")
def scale3d():
    return build_spectral_scale(build_grid(3, 4))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
