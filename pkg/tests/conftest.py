import numpy as np
import pytest

from carleman import half_disk_preset


@pytest.fixture(scope="session")
def preset():
    return half_disk_preset()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
