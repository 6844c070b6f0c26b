import numpy as np
import pytest
from hypothesis import settings

from coeba.tsplib import TspInstance

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def random_instance(dim, seed, name=None):
    rng = np.random.default_rng(seed)
    coords = rng.integers(0, 1000, size=(dim, 2)).astype(float)
    return TspInstance(name=name or f"rand{dim}_{seed}", dimension=dim, coords=coords)


@pytest.fixture
def square():
    return TspInstance("square", 4, np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float))


@pytest.fixture
def small_scenario():
    return [random_instance(12, 1), random_instance(17, 2), random_instance(9, 3)]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
