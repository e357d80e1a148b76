import pytest
from hypothesis import given
from hypothesis import strategies as st

from indturan import kernels
from indturan.generators import paley

from conftest import graphs

BACKENDS = kernels.backends()


def test_python_backend_always_present():
    assert "python" in BACKENDS


def test_compiled_backend_builds():
    # the extension is part of the package build; fall back only if missing
    if "cython" not in BACKENDS:
        pytest.skip("compiled kernels not built in this environment")
    assert kernels.BACKEND in ("cython", "python")


@given(graphs(max_n=70), st.integers(0, 2**70))
def test_counts_and_pair_count_agree(G, raw):
    mask = raw & G.full_mask
    results = {name: (k.counts_into(G, mask), k.pair_count(G, range(0, G.n, 2), mask)) for name, k in BACKENDS.items()}
    assert len({repr(v) for v in results.values()}) == 1


@given(graphs(min_n=2, max_n=9), st.integers(1, 4))
def test_best_t_pair_agrees(G, t):
    if t > G.n:
        return
    values = {name: k.best_t_pair(G, t)[0] for name, k in BACKENDS.items()}
    assert len(set(values.values())) == 1


@given(graphs(max_n=40))
def test_max_clique_agrees(G):
    sizes = {name: k.max_clique(G)[0] for name, k in BACKENDS.items()}
    assert len(set(sizes.values())) == 1


def test_max_clique_on_paley_25():
    for k in BACKENDS.values():
        assert k.max_clique(paley(25))[0] == 5
