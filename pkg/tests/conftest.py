import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from minspace import Polyhedron

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

F_BAR, G_GRAVE, H_ACUTE = 0, 1, 2


def a_polyhedron() -> Polyhedron:
    """y <= 1/2, x + y <= 1, -x + y <= 1."""
    return Polyhedron.from_arrays([[0, 1], [1, 1], [-1, 1]], [0.5, 1, 1])


@pytest.fixture
def A():
    return a_polyhedron()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
