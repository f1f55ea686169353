import numpy as np
import pytest

from fpconstraint.assembly import assemble
from fpconstraint.experiments import HEALTHY_MODEL
from fpconstraint.mesh import build_mesh


@pytest.fixture(scope="session")
def healthy_model():
    return HEALTHY_MODEL


@pytest.fixture(scope="session")
def healthy_system(healthy_model):
    return assemble(healthy_model, build_mesh(2000, healthy_model.dim))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
