import numpy as np
import pytest

from qschur.quat import Quaternion


@pytest.fixture
def rng():
    return np.random.default_rng(0xA11CE)


def rand_quat(rng, scale=1.0):
    return Quaternion.from_array(rng.uniform(-scale, scale, size=4))
