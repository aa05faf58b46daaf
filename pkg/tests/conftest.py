import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from dfalc import Grounding, Signature
from dfalc.syntax import BOTTOM, TOP, And, Exists, Forall, Name, Not, Or

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

CONCEPTS = ("A", "B", "C")
ROLES = ("r", "s")


def two_individual_grounding(A, B, r):
    return Grounding.from_tables(["s1", "s2"], {"A": A, "B": B}, {"r": r})


@pytest.fixture
def ex1():
    return two_individual_grounding([0.0, 0.0], [0.9, 0.0], [[0.0, 0.9], [0.0, 0.0]])


@pytest.fixture
def ex2():
    return two_individual_grounding([0.0, 0.9], [0.0, 0.0], [[0.0, 0.9], [0.0, 0.0]])


@pytest.fixture
def ex3():
    return two_individual_grounding([0.0, 0.9], [0.9, 0.0], [[0.0, 0.0], [0.0, 0.0]])


def concepts(max_depth=3, names=CONCEPTS, roles=ROLES, constants=True):
    leaves = st.sampled_from([Name(n) for n in names])
    if constants:
        leaves = leaves | st.sampled_from([TOP, BOTTOM])

    def extend(inner):
        return st.one_of(
            inner.map(Not),
            st.builds(And, inner, inner),
            st.builds(Or, inner, inner),
            st.builds(Exists, st.sampled_from(roles), inner),
            st.builds(Forall, st.sampled_from(roles), inner),
        )

    return st.recursive(leaves, extend, max_leaves=2**max_depth)


def random_grounding(rng, n, names=CONCEPTS, roles=ROLES, values=None):
    sig = Signature(tuple(names), tuple(roles), tuple(f"i{k}" for k in range(n)))
    shape_c, shape_r = (len(names), n), (len(roles), n, n)
    if values is None:
        c, r = rng.random(shape_c), rng.random(shape_r)
    else:
        c, r = rng.choice(values, size=shape_c), rng.choice(values, size=shape_r)
    return Grounding(sig, c, r)


@st.composite
def groundings(draw, min_n=1, max_n=5, names=CONCEPTS, roles=ROLES, grid=False):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    values = [0.0, 0.5, 1.0] if grid else None
    return random_grounding(np.random.default_rng(seed), n, names, roles, values)


# one summary line per acceptance criterion

_criteria: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when == "teardown":
        return
    number, title = marker.args
    prev = _criteria.get(number, (title, "PASS", 0.0))
    status = prev[1]
    if rep.failed:
        status = "FAIL"
    elif rep.skipped:
        status = "SKIP"
    _criteria[number] = (title, status, prev[2] + rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status, secs = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {status:4}  {title} ({secs:.1f}s)")
