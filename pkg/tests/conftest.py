import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from flowsearch import families

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def instances(draw, max_side=6, **kw):
    """Random connected bipartite instance with sigma on side A."""
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    n_a = draw(st.integers(2, max_side))
    n_b = draw(st.integers(2, max_side))
    return families.random_bipartite(rng, n_a=n_a, n_b=n_b, **kw)


@pytest.fixture
def p3():
    return families.p3()


@pytest.fixture
def c4():
    return families.four_cycle()


@pytest.fixture
def star3():
    return families.star(3)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion."""

    def record(label, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
