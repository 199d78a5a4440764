import random

import pytest

from fellsem.generators import (busby_smith_z2, five_element_action,
                                full_monoid_action)


@pytest.fixture
def rng():
    return random.Random(20260823)


@pytest.fixture(scope="session")
def busby():
    return busby_smith_z2()


@pytest.fixture(scope="session")
def five():
    return five_element_action()


@pytest.fixture(scope="session")
def full_i2():
    return full_monoid_action(2)
