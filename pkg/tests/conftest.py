import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from indturan.graph import Graph

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def graphs(draw, min_n=0, max_n=10):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [e for e, k in zip(pairs, keep) if k])


@st.composite
def host_pairs(draw, min_n=0, max_n=10):
    """(Gamma, G) with G a spanning subgraph of Gamma."""
    Gamma = draw(graphs(min_n, max_n))
    edges = list(Gamma.edges())
    keep = draw(st.lists(st.booleans(), min_size=len(edges), max_size=len(edges)))
    return Gamma, Graph(Gamma.n, [e for e, k in zip(edges, keep) if k])


def random_graph(n, p, seed):
    rnd = random.Random(seed)
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rnd.random() < p])


@pytest.fixture
def two_triangles():
    return Graph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])


# acceptance verdicts, filled by test_acceptance and printed after the run
ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str):
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
