import random

import pytest
from hypothesis import settings

settings.register_profile("npg", max_examples=40, deadline=None)
settings.load_profile("npg")


@pytest.fixture
def rng():
    return random.Random(20240611)
