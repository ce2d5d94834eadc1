import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from orbitscope.lie_core import Family, GroupSpec

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def spec(family: str, n: int) -> GroupSpec:
    return GroupSpec(Family(family), n)
