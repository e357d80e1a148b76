from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from indturan.errors import InputError, ResourceError
from indturan.generators import clique_union, gnp, paley
from indturan.graph import Graph, complete_graph, cycle_graph, pair_count
from indturan.sparseness import (
    INCONCLUSIVE,
    SPARSE,
    VIOLATED,
    check_all_sizes,
    check_exact,
    clique_cover,
    clique_number,
    max_clique,
    refute_random,
    subfield_cliques,
    is_clique,
)

from conftest import graphs


def brute_sparse(G, c, t):
    # direct definition over all pairs of sets with |A|, |B| >= t
    n = G.n
    for a in range(t, n + 1):
        for A in combinations(range(n), a):
            for b in range(t, n + 1):
                for B in combinations(range(n), b):
                    if pair_count(G, A, B) > (1 - c) * a * b:
                        return False
    return True


@given(graphs(max_n=7), st.sampled_from([0.25, 0.5]), st.integers(1, 3))
def test_checkers_match_definition(G, c, t):
    truth = brute_sparse(G, c, t)
    assert (check_all_sizes(G, c, t).verdict == SPARSE) == truth
    assert (check_exact(G, c, t).verdict == SPARSE) == truth


@given(graphs(min_n=1, max_n=11), st.sampled_from([0.25, 0.5]), st.integers(2, 4))
def test_exact_and_all_sizes_agree(G, c, t):
    a, b = check_exact(G, c, t), check_all_sizes(G, c, t)
    assert a.verdict == b.verdict
    assert a.validate(G) and b.validate(G)


def test_clique_union_certified():
    G = clique_union(4, 2)
    assert check_exact(G, 0.5, 8).verdict == SPARSE


def test_k4_refuted_with_valid_witness():
    r = check_exact(complete_graph(4), 0.6, 2)
    assert r.verdict == VIOLATED
    assert r.validate(complete_graph(4))
    A, B = r.witness
    assert len(A) == 2 and len(B) == 2
    assert r.witness_density(complete_graph(4)) > 0.4


def test_t_larger_than_n_is_vacuous():
    assert check_exact(cycle_graph(4), 0.5, 9).verdict == SPARSE


def test_budget_gives_inconclusive():
    assert check_exact(gnp(40, 0.5, 0), 0.5, 6, budget=10).verdict == INCONCLUSIVE


def test_parameter_validation():
    with pytest.raises(InputError):
        check_exact(cycle_graph(4), 1.5, 2)
    with pytest.raises(InputError):
        check_exact(cycle_graph(4), 0.5, 0)
    with pytest.raises(ResourceError):
        check_all_sizes(gnp(20, 0.5, 0), 0.5, 2)


def test_refute_random_never_certifies():
    r = refute_random(complete_graph(8), 0.5, 3, trials=5, seed=1)
    assert r.verdict == VIOLATED and r.validate(complete_graph(8))
    r = refute_random(Graph(8), 0.5, 3, trials=5, seed=1)
    assert r.verdict == INCONCLUSIVE


@pytest.mark.parametrize("q, omega", [(9, 3), (25, 5), (49, 7), (13, 3), (17, 3), (29, 4), (41, 5)])
def test_paley_clique_numbers(q, omega):
    assert clique_number(paley(q)) == omega


@given(graphs(max_n=30))
def test_max_clique_matches_networkx(G):
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(G.edges())
    expected = max((len(c) for c in nx.find_cliques(H)), default=0)
    found = max_clique(G)
    assert len(found) == expected
    assert is_clique(G, found)


@given(graphs(max_n=12), st.sampled_from(["greedy", "exact-small"]))
def test_clique_cover_partitions(G, mode):
    cover = clique_cover(G, mode)
    assert cover.validate(G)
    assert sorted(v for p in cover.parts for v in p) == list(range(G.n))


def test_exact_cover_is_minimum_on_c5():
    assert clique_cover(cycle_graph(5), "exact-small").size == 3
    assert clique_cover(clique_union(3, 4), "exact-small").size == 3


def test_subfield_cliques_are_cliques():
    P = paley(25)
    for cl in subfield_cliques(25, 10, seed=3):
        assert len(cl) == 5 and is_clique(P, cl)
