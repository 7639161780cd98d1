import os

import pytest
from hypothesis import HealthCheck, settings

from ltlearn.traces import Alphabet, Sample

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

U1 = "hhhhohch"
V1 = "hhhhhchohh"
V2 = "hhhhhowchhh"
V3 = "hhhhhwowcww"
ROBOT = "hocw"


@pytest.fixture
def robot_v1() -> Sample:
    return Sample.from_words([U1], [V1], ROBOT)


@pytest.fixture
def robot() -> Sample:
    return Sample.from_words([U1], [V1, V2, V3], ROBOT)


@pytest.fixture
def pq() -> Alphabet:
    return Alphabet(("p", "q"))
