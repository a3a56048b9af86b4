import numpy as np
import pytest
from hypothesis import settings

from vecpcpp import fixtures

settings.register_profile("package", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("package")


@pytest.fixture
def lin1():
    return fixtures.lin1()


@pytest.fixture
def par1():
    return fixtures.par1()


@pytest.fixture
def sat1():
    return fixtures.sat1()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
