import numpy as np
import pytest

from crlab.maps import build_immersion


@pytest.fixture(scope="session")
def maps():
    """F_1 .. F_8 in binary64."""
    return {n: build_immersion(n) for n in range(1, 9)}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_c4(rng, count, scale=1.0):
    return scale * (rng.normal(size=(count, 4)) + 1j * rng.normal(size=(count, 4)))
