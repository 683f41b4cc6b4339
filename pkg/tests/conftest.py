import itertools

import pytest
from hypothesis import strategies as st

from cdagsat.cnf_io import Formula
from cdagsat.core import Clause3, Literal
from cdagsat.render import SAMPLE_CLAUSES

UNSAT8 = tuple(
    tuple(v if s else -v for v, s in zip((1, 2, 3), signs)) for signs in itertools.product((True, False), repeat=3)
)


@pytest.fixture
def sample():
    return Formula.of(6, SAMPLE_CLAUSES)


@pytest.fixture
def unsat8():
    return Formula.of(3, UNSAT8)


@st.composite
def clauses(draw, n):
    vs = draw(st.lists(st.integers(1, n), min_size=3, max_size=3, unique=True))
    negs = draw(st.lists(st.booleans(), min_size=3, max_size=3))
    return Clause3(tuple(Literal(v, g) for v, g in sorted(zip(vs, negs))))


@st.composite
def formulas(draw, min_n=3, max_n=6, max_m=30):
    n = draw(st.integers(min_n, max_n))
    cs = draw(st.lists(clauses(n), max_size=max_m))
    return Formula.of(n, cs)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
