import numpy as np
import pytest

from satett.data import make_dataset

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def rng(seed):
    return np.random.Generator(np.random.Philox(key=seed))


@pytest.fixture
def random_dataset():
    """A small two-source dataset with both subgroups populated."""
    g = rng(1234)
    n = 400
    x = g.standard_normal(n)
    v = (g.random(n) < 0.5).astype(np.int64)
    s = (g.random(n) < 0.4).astype(np.int64)
    a = np.where(
        s == 1,
        (g.random(n) < 0.5).astype(np.int64),
        (g.random(n) < 0.3 + 0.3 * v).astype(np.int64),
    )
    y = 1.5 * x + 0.5 * v + a * (v - 0.5) + g.standard_normal(n)
    return make_dataset(y, a, s, v, x.reshape(-1, 1), covariate_names=("x",))
