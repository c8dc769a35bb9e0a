import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from coxgalaxy.coxsys import INF, CoxeterMatrix

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

LABELS = (2, 3, 4, 5, 6, 10, INF)


@st.composite
def coxeter_matrices(draw, min_rank=1, max_rank=5, labels=LABELS):
    n = draw(st.integers(min_rank, max_rank))
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            edges[(i, j)] = draw(st.sampled_from(labels))
    return CoxeterMatrix.from_edges(n, edges)


@st.composite
def permuted(draw, m):
    order = draw(st.permutations(range(m.rank)))
    return m.permute(order)


def B(k):
    return CoxeterMatrix.from_edges(k, {(0, 1): 4, **{(i, i + 1): 3 for i in range(1, k - 1)}})


def A(k):
    return CoxeterMatrix.from_edges(k, {(i, i + 1): 3 for i in range(k - 1)})


def D(k):
    edges = {(i, i + 1): 3 for i in range(k - 2)}
    edges[(k - 3, k - 1)] = 3
    return CoxeterMatrix.from_edges(k, edges)


def disjoint(*ms):
    n = sum(m.rank for m in ms)
    edges, off = {}, 0
    for m in ms:
        for i in range(m.rank):
            for j in range(i + 1, m.rank):
                edges[(off + i, off + j)] = m.m[i][j]
        off += m.rank
    return CoxeterMatrix.from_edges(n, edges)


@pytest.fixture
def B5():
    return B(5)


@st.composite
def planted(draw, max_extra=3, labels=LABELS):
    """A system with a pseudo-transposition at t = 0 (I2(6), I2(10) or B3 kind)."""
    kind = draw(st.sampled_from(("I2", "B3")))
    core = {(0, 1): draw(st.sampled_from((6, 10)))} if kind == "I2" else {(0, 1): 4, (1, 2): 3}
    k = 2 if kind == "I2" else 3
    extra = draw(st.integers(0, max_extra))
    n = k + extra
    edges = dict(core)
    for s in range(k, n):
        if draw(st.booleans()):
            edges[(0, s)] = INF
            for u in range(1, k):
                edges[(u, s)] = draw(st.sampled_from(labels))
        for t in range(k, s):
            edges[(t, s)] = draw(st.sampled_from(labels))
    return CoxeterMatrix.from_edges(n, edges)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        verdict, detail = RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {detail}")
