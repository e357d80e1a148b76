import random
from fractions import Fraction
from math import comb

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indturan.errors import InputError, ResourceError
from indturan.generators import (
    bipartition,
    clique_union,
    gnp,
    incidence_on,
    paley,
    random_ksr_free,
)
from indturan.graph import Graph, complete_bipartite, complete_graph, cycle_graph, path_graph
from indturan.lower_bounds import (
    build_random_quotient_subgraph,
    canonical_form,
    clique_quotients,
    contains_subgraph,
    cover_from_parts,
    family_subgraph_free,
    girth,
    vt_partial_cover,
)
from indturan.oracle import count_induced_in
from indturan.sparseness import clique_cover, is_clique, subfield_cliques

from conftest import graphs


def to_nx(G):
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(G.edges())
    return H


def test_construction_structure():
    Gamma = gnp(40, 0.5, 3)
    cover = clique_cover(Gamma)
    F = incidence_on(cover.size)
    res = build_random_quotient_subgraph(Gamma, cover, F, seed=11)
    assert res.validate(Gamma, cover)
    owner = cover.index()
    inv = {x: i for i, x in enumerate(res.bijection)}
    for u, v in res.subgraph.edges():
        a, b = owner[u], owner[v]
        if a != b:
            assert F.has_edge(res.bijection[a], res.bijection[b])
    # every Gamma edge between parts mapped to an F edge survives
    for u, v in Gamma.edges():
        a, b = owner[u], owner[v]
        if a != b and F.has_edge(res.bijection[a], res.bijection[b]):
            assert res.subgraph.has_edge(u, v)
    assert sorted(inv) == list(range(cover.size))
    assert res.guaranteed_bound == Fraction(Gamma.edge_count * F.edge_count, comb(cover.size, 2))


def test_construction_is_deterministic():
    Gamma = gnp(30, 0.5, 1)
    cover = clique_cover(Gamma)
    F = incidence_on(cover.size)
    a = build_random_quotient_subgraph(Gamma, cover, F, seed=5)
    b = build_random_quotient_subgraph(Gamma, cover, F, seed=5)
    assert a.subgraph == b.subgraph and a.bijection == b.bijection


def test_construction_input_errors():
    Gamma = gnp(20, 0.5, 1)
    cover = clique_cover(Gamma)
    with pytest.raises(InputError, match="vertices"):
        build_random_quotient_subgraph(Gamma, cover, incidence_on(cover.size + 1), 0)
    with pytest.raises(InputError, match="bipartite"):
        build_random_quotient_subgraph(Gamma, cover, complete_graph(cover.size), 0)


def test_r_equal_two_is_unverified():
    Gamma = gnp(20, 0.5, 1)
    cover = clique_cover(Gamma)
    F = incidence_on(cover.size)
    assert build_random_quotient_subgraph(Gamma, cover, F, 0, s=2, r=2).status == "unverified"
    assert build_random_quotient_subgraph(Gamma, cover, F, 0, s=2, r=3).status == "guaranteed"


@settings(max_examples=25)
@given(st.integers(8, 14), st.integers(0, 10**6))
def test_output_has_no_induced_ksr(n, seed):
    Gamma = gnp(n, 0.5, seed)
    cover = clique_cover(Gamma)
    F = random_ksr_free(cover.size, 2, 3, seed)
    G = build_random_quotient_subgraph(Gamma, cover, F, seed, s=2, r=3).subgraph
    assert count_induced_in(G, G, complete_bipartite(2, 3)) == 0


def test_mean_edges_meet_expectation_bound():
    Gamma = gnp(30, 0.5, 2)
    cover = clique_cover(Gamma)
    F = random_ksr_free(cover.size, 2, 3, 1)
    runs = [build_random_quotient_subgraph(Gamma, cover, F, s) for s in range(60)]
    mean = sum(r.subgraph.edge_count for r in runs) / len(runs)
    assert mean >= float(runs[0].guaranteed_bound)


@pytest.mark.parametrize("q", [25, 49])
def test_vt_partial_cover_on_paley(q):
    Gamma = paley(q)
    parts, covered = vt_partial_cover(Gamma, lambda count, seed: subfield_cliques(q, count, seed), seed=4)
    assert 4 * len(covered) >= 3 * q
    seen = set()
    for p in parts:
        assert is_clique(Gamma, p)
        assert not (seen & set(p))
        seen |= set(p)
    assert seen == set(covered)
    sub, cover = cover_from_parts(Gamma, parts)
    assert cover.validate(sub)
    assert sub.is_subgraph_of(Gamma)


def test_vt_partial_cover_rejects_bad_sampler():
    Gamma = paley(25)
    base = frozenset(range(5))  # the subfield GF(5), a maximum clique
    assert is_clique(Gamma, base)

    def shrinking(count, seed):
        return [base] if count == 1 else [frozenset(range(4))] * count

    with pytest.raises(InputError):
        vt_partial_cover(Gamma, shrinking, seed=0)
    with pytest.raises(ResourceError):
        vt_partial_cover(Gamma, lambda count, seed: [base] * count, seed=0, max_retries=3)


@pytest.mark.parametrize(
    "H, shapes",
    [
        (cycle_graph(6), [(6, 6), (4, 4)]),
        (complete_bipartite(2, 3), [(5, 6)]),
        (cycle_graph(4), [(4, 4), (2, 1)]),
        (path_graph(4), [(4, 3), (3, 2), (2, 1)]),
    ],
    ids=["C6", "K23", "C4", "P4"],
)
def test_clique_quotient_families(H, shapes):
    family = clique_quotients(H)
    assert [(g.n, g.edge_count) for g in family] == shapes
    for member in family:
        assert bipartition(member) is not None


def test_clique_quotients_cap():
    with pytest.raises(ResourceError):
        clique_quotients(cycle_graph(13))


@given(graphs(max_n=8))
def test_canonical_form_is_invariant(G):
    perm = list(range(G.n))
    random.Random(G.edge_count).shuffle(perm)
    assert canonical_form(G) == canonical_form(G.relabel(perm))


@settings(max_examples=60)
@given(graphs(min_n=5, max_n=7), graphs(min_n=5, max_n=7))
def test_canonical_form_separates(G, H):
    same = G.n == H.n and nx.is_isomorphic(to_nx(G), to_nx(H))
    assert (canonical_form(G) == canonical_form(H)) == same


def test_canonical_form_on_regular_pair():
    # two 3-regular graphs on 6 vertices: prism and K_{3,3}
    prism = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)])
    assert canonical_form(prism) != canonical_form(complete_bipartite(3, 3))


@given(graphs(max_n=8), graphs(max_n=5))
def test_contains_subgraph_matches_networkx(F, P):
    gm = nx.algorithms.isomorphism.GraphMatcher(to_nx(F), to_nx(P))
    assert contains_subgraph(F, P) == gm.subgraph_is_monomorphic()


def test_family_subgraph_free():
    assert family_subgraph_free(incidence_on(14), [cycle_graph(4)])
    assert not family_subgraph_free(incidence_on(14), clique_quotients(cycle_graph(4)))
    with pytest.raises(InputError):
        family_subgraph_free(Graph(65), [])
    with pytest.raises(InputError):
        family_subgraph_free(Graph(5), [cycle_graph(11)])


@given(graphs(max_n=12))
def test_girth_matches_networkx(G):
    expected = nx.girth(to_nx(G))
    assert girth(G) == expected
