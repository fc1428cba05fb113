import numpy as np
import pytest
from hypothesis import settings

from symmetroids.pencil import Pencil

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


def random_symmetric(rng, n=5, count=None):
    shape = (n, n) if count is None else (count, n, n)
    G = rng.standard_normal(shape)
    return (G + np.swapaxes(G, -1, -2)) / 2


def random_pencil(seed, identity=True) -> Pencil:
    """Random pencil with A0 = I (or random A0) and Gaussian A1..A3."""
    rng = np.random.default_rng([seed, 99])
    mats = random_symmetric(rng, count=4)
    if identity:
        mats[0] = np.eye(5)
    return Pencil(mats)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
