import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from sdivergence import make_distribution


@pytest.fixture
def running_pair():
    return make_distribution([0.5, 0.5]), make_distribution([0.25, 0.75])


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_pair(rng, n):
    return (make_distribution(rng.standard_exponential(n), renormalize=True),
            make_distribution(rng.standard_exponential(n), renormalize=True))


@st.composite
def distribution_pairs(draw, min_n=2, max_n=12):
    """Strictly positive pairs of equal length, renormalized from bounded weights."""
    n = draw(st.integers(min_n, max_n))
    weights = st.floats(1e-3, 1.0, allow_nan=False, allow_infinity=False)
    a = draw(st.lists(weights, min_size=n, max_size=n))
    b = draw(st.lists(weights, min_size=n, max_size=n))
    return make_distribution(a, renormalize=True), make_distribution(b, renormalize=True)


orders = st.floats(-5.0, 6.0, allow_nan=False)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for key in sorted(results):
            terminalreporter.write_line(results[key])
