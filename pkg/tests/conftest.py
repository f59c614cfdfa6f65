import os

import pytest
from hypothesis import HealthCheck, settings

from carrier_lab import generators, packing

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def tri3():
    return generators.tri3()


@pytest.fixture(scope="session")
def grid3():
    return generators.square_grid(3)


def _packed(deg, depth):
    t = generators.generate_hyperbolic(deg, depth)
    p = packing.pack_maximal(t)
    return t, p, packing.to_embedded_graph(p, t)


@pytest.fixture(scope="session")
def hex7_d4():
    return _packed(7, 4)


@pytest.fixture(scope="session")
def hex7_d3():
    return _packed(7, 3)


@pytest.fixture(scope="session")
def hex7_d6():
    return _packed(7, 6)


@pytest.fixture(scope="session")
def k4():
    t = generators.wheel(3)
    return t, packing.pack_maximal(t)
