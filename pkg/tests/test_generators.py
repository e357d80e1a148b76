import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from indturan.errors import InputError
from indturan.generators import (
    bipartition,
    clique_union,
    contains_ksr,
    generate,
    gnp,
    high_girth_bipartite,
    incidence_on,
    paley,
    petersen,
    projective_incidence,
    random_ksr_free,
    thin,
)
from indturan.graph import complete_bipartite
from indturan.lower_bounds import girth


def to_nx(G):
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(G.edges())
    return H


def test_gnp_is_deterministic_and_pinned():
    assert gnp(30, 0.5, 0) == gnp(30, 0.5, 0)
    assert gnp(30, 0.5, 0) != gnp(30, 0.5, 1)
    # frozen outputs of the seeded generator
    assert gnp(30, 0.5, 0).edge_count == 231
    assert gnp(20, 0.5, 3).edge_count == 96


@pytest.mark.parametrize("p, m", [(0.0, 0), (1.0, 45)])
def test_gnp_extremes(p, m):
    assert gnp(10, p, 5).edge_count == m


def test_gnp_rejects_bad_probability():
    with pytest.raises(InputError):
        gnp(5, 1.5, 0)


@pytest.mark.parametrize("q", [5, 9, 13, 25, 29])
def test_paley_is_self_complementary_and_regular(q):
    G = paley(q)
    assert G.degrees() == [(q - 1) // 2] * q
    assert nx.is_isomorphic(to_nx(G), to_nx(G.complement()))


def test_paley_rejects_bad_order():
    for q in (7, 15, 8):
        with pytest.raises(InputError):
            paley(q)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_projective_incidence_is_c4_free_and_regular(p):
    G = projective_incidence(p)
    N = p * p + p + 1
    assert G.n == 2 * N
    assert G.degrees() == [p + 1] * (2 * N)
    assert girth(G) == 6


@pytest.mark.parametrize("k", [2, 5, 10, 14, 20, 31, 64])
def test_incidence_on_exact_size_and_c4_free(k):
    F = incidence_on(k)
    assert F.n == k
    assert bipartition(F) is not None
    assert not contains_ksr(F, 2, 2)


def test_clique_union():
    G = clique_union(4, 3)
    assert G.n == 12 and G.edge_count == 12


@given(st.integers(4, 24), st.integers(0, 1000))
def test_random_ksr_free(k, seed):
    F = random_ksr_free(k, 2, 3, seed)
    assert F.n == k
    assert bipartition(F) is not None
    assert not contains_ksr(F, 2, 3)


def test_contains_ksr_matches_definition():
    assert contains_ksr(projective_incidence(2), 1, 3)
    assert not contains_ksr(projective_incidence(2), 2, 2)
    assert contains_ksr(complete_bipartite(2, 3), 2, 3)


@given(st.integers(2, 40), st.sampled_from([5, 7]), st.integers(0, 100))
def test_high_girth_bipartite(k, g, seed):
    F = high_girth_bipartite(k, g, seed)
    assert bipartition(F) is not None
    assert girth(F) >= g


def test_thin_keeps_subgraph():
    G = gnp(30, 0.5, 0)
    T = thin(G, 0.5, 1)
    assert T.is_subgraph_of(G)
    assert thin(G, 1.0, 1) == G
    assert thin(G, 0.0, 1).edge_count == 0


def test_petersen():
    P = petersen()
    assert P.edge_count == 15 and girth(P) == 5
    assert nx.is_isomorphic(to_nx(P), nx.petersen_graph())


def test_generate_dispatch():
    assert generate("paley", {"q": "13"}).n == 13
    with pytest.raises(InputError, match="needs parameter"):
        generate("gnp", {"n": 5})
    with pytest.raises(InputError, match="unknown family"):
        generate("nope", {})
