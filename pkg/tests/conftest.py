import numpy as np
import pytest

from neumannlab.neumann import OddSequence
from neumannlab.permutation import FinSuppPerm


@pytest.fixture
def P():
    """5, 7, 9, ... extended by steps of 2."""
    return OddSequence((5, 7), 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


def random_finsupp(rng, lo=-50, hi=50, max_moved=12):
    k = int(rng.integers(0, max_moved + 1))
    pts = rng.choice(np.arange(lo, hi + 1), size=k, replace=False)
    return FinSuppPerm(dict(zip(pts.tolist(), rng.permutation(pts).tolist())))


def random_word(rng, max_len=20):
    n = int(rng.integers(0, max_len + 1))
    letters = []
    for _ in range(n):
        name = "t" if rng.random() < 0.5 else "s"
        letters.append((name, int(rng.choice([-1, 1]))))
    return tuple(letters)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
