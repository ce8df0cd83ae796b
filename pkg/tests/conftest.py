import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from quanticflow.binary_forms import BinaryForm

ACCEPTANCE_RESULTS = []

small_ints = st.integers(min_value=-20, max_value=20)
rationals = st.fractions(min_value=-10, max_value=10, max_denominator=12)


@st.composite
def forms(draw, min_degree=0, max_degree=4, elements=rationals):
    n = draw(st.integers(min_value=min_degree, max_value=max_degree))
    return BinaryForm(tuple(draw(elements) for _ in range(n + 1)))


@pytest.fixture
def rng():
    return random.Random(20240501)


def random_int_tuples(n, length, seed, bound=20):
    r = random.Random(seed)
    return [tuple(r.randint(-bound, bound) for _ in range(length)) for _ in range(n)]


def F(x):
    return Fraction(x)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
