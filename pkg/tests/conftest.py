import random

import pytest

from newstopics.model import HyperParams


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def hyper():
    return HyperParams()
