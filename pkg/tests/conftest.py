import numpy as np
import pytest

from einwarp.geometry import FDConfig


@pytest.fixture(scope="session")
def cfg():
    return FDConfig()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(42)
