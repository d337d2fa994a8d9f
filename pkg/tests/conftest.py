import random

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from congest_shortcuts.graph import Graph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_connected_graph(n, extra, seed):
    """Random spanning tree plus ``extra`` random chords."""
    rng = random.Random(seed)
    edges = set()
    for v in range(1, n):
        u = rng.randrange(v)
        edges.add((u, v))
    for _ in range(extra):
        a, b = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return Graph(n, edges)


def floyd_warshall(g):
    """All-pairs hop distances by Floyd-Warshall, inf when unreachable."""
    d = np.full((g.n, g.n), np.inf)
    np.fill_diagonal(d, 0)
    for u, v in g.edges:
        d[u, v] = d[v, u] = 1
    for k in range(g.n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d


@st.composite
def connected_graphs(draw, min_n=1, max_n=30):
    n = draw(st.integers(min_n, max_n))
    extra = draw(st.integers(0, 2 * n))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_connected_graph(n, extra, seed)


@pytest.fixture
def path5():
    return Graph(5, [(i, i + 1) for i in range(4)])


@pytest.fixture
def triangle():
    return Graph(3, [(0, 1), (1, 2), (0, 2)])


# --- acceptance summary ----------------------------------------------------------

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::test_criterion_")[1]
        _ACCEPTANCE[name] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        outcome, took = _ACCEPTANCE[name]
        num, _, label = name.partition("_")
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {int(num):2d} {label:<36} {verdict}  ({took:.1f}s)")
