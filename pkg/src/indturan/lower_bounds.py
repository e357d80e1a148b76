"""Constructions of large subgraphs with no induced copy of a bipartite pattern.

The main construction partitions the host into cliques, maps the cliques to
the vertices of a bipartite auxiliary graph F by a uniform random bijection,
and keeps every intra-clique edge plus the host edges between cliques whose
images are adjacent in F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import InputError, ResourceError
from .generators import bipartition, make_rng
from .graph import Graph, from_mask, iter_bits, to_mask
from .sparseness import CliqueCover, is_clique

MAX_QUOTIENT_VERTICES = 12
MAX_FAMILY_MEMBER_VERTICES = 10
MAX_AUX_VERTICES = 64


@dataclass
class ConstructionResult:
    subgraph: Graph
    cover_size: int
    auxiliary: Graph
    bijection_seed: int
    guaranteed_bound: Fraction
    bijection: list[int] = field(default_factory=list)
    status: str = "guaranteed"

    def validate(self, Gamma: Graph, cover: CliqueCover) -> bool:
        if not self.subgraph.is_subgraph_of(Gamma):
            return False
        for part in cover.parts:
            for u, v in combinations(sorted(part), 2):
                if not self.subgraph.has_edge(u, v):
                    return False
        return True


def build_random_quotient_subgraph(
    Gamma: Graph, cover: CliqueCover, F: Graph, seed: int, s: int | None = None, r: int | None = None
) -> ConstructionResult:
    """Random-bijection subgraph of ``Gamma`` guided by the bipartite graph ``F``.

    When ``s, r`` are given the result is labelled ``unverified`` for r = 2,
    where induced K_{s,r}-freeness is not guaranteed.
    """
    k = cover.size
    if F.n != k:
        raise InputError(f"auxiliary graph has {F.n} vertices, cover has {k} cliques")
    if bipartition(F) is None:
        raise InputError("auxiliary graph must be bipartite")
    rng = make_rng(seed)
    f = rng.permutation(k).tolist()
    inv = [0] * k
    for i, x in enumerate(f):
        inv[x] = i
    part_masks = [to_mask(p) for p in cover.parts]
    allowed = []
    for i in range(k):
        m = part_masks[i]
        for y in iter_bits(F.mask(f[i])):
            m |= part_masks[inv[y]]
        allowed.append(m)
    owner = cover.index()
    masks = [gm & allowed[owner[v]] for v, gm in enumerate(Gamma.masks)]
    G = Graph.from_masks(masks, check=False)
    bound = Fraction(Gamma.edge_count * F.edge_count, math.comb(k, 2)) if k >= 2 else Fraction(0)
    status = "guaranteed"
    if s is not None and r is not None and r == 2:
        status = "unverified"
    return ConstructionResult(G, k, F, int(seed), bound, f, status)


def vt_partial_cover(Gamma: Graph, clique_sampler, seed: int, max_retries: int = 200):
    """Cover at least 3n/4 vertices with ceil(ln(4) n / omega) sampled maximum cliques.

    ``clique_sampler(count, seed)`` must return ``count`` uniformly random
    maximum cliques.  Overlaps are removed greedily in sampling order, so the
    returned parts are disjoint cliques.  Returns ``(parts, covered)``.
    """
    n = Gamma.n
    rng = make_rng(seed)
    probe = clique_sampler(1, int(rng.integers(2**63)))
    if not probe:
        raise InputError("clique sampler returned nothing")
    omega = len(probe[0])
    k = math.ceil(math.log(4) * n / omega)
    for _ in range(max_retries):
        cliques = clique_sampler(k, int(rng.integers(2**63)))
        for cl in cliques:
            if len(cl) != omega or not is_clique(Gamma, cl):
                raise InputError("clique sampler returned a set that is not a maximum clique")
        covered = 0
        for cl in cliques:
            covered |= to_mask(cl)
        if 4 * covered.bit_count() >= 3 * n:
            parts = []
            seen = 0
            for cl in cliques:
                fresh = to_mask(cl) & ~seen
                seen |= fresh
                parts.append(from_mask(fresh))
            return parts, from_mask(covered)
    raise ResourceError(f"no cover of 3n/4 vertices after {max_retries} attempts")


def cover_from_parts(Gamma: Graph, parts) -> tuple[Graph, CliqueCover]:
    """Induced subgraph on the covered vertices (same ids) with a full cover of it.

    Uncovered vertices become isolated singleton parts so the cover partitions
    the whole vertex set.
    """
    nonempty = [frozenset(p) for p in parts if p]
    covered = 0
    for p in nonempty:
        covered |= to_mask(p)
    sub = Gamma.restrict(iter_bits(covered))
    singletons = [frozenset([v]) for v in range(Gamma.n) if not (covered >> v) & 1]
    return sub, CliqueCover(nonempty + singletons)


# -- clique quotients -----------------------------------------------------


def _refine(masks, colours):
    n = len(masks)
    while True:
        sigs = [(colours[v], tuple(sorted(colours[u] for u in iter_bits(masks[v])))) for v in range(n)]
        ranking = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranking[s] for s in sigs]
        if len(set(new)) == len(set(colours)):
            return new
        colours = new


def canonical_form(G: Graph) -> tuple:
    """Isomorphism invariant that determines G up to isomorphism.

    Individualisation-refinement search returning the lexicographically
    smallest adjacency certificate over all discrete leaves.
    """
    n = G.n
    masks = G.masks
    best = [None]

    def certificate(colours):
        order = sorted(range(n), key=lambda v: colours[v])
        pos = {v: i for i, v in enumerate(order)}
        return tuple(sorted(tuple(sorted((pos[u], pos[v]))) for u, v in G.edges()))

    def search(colours):
        colours = _refine(masks, colours)
        if len(set(colours)) == n:
            cert = certificate(colours)
            if best[0] is None or cert < best[0]:
                best[0] = cert
            return
        sizes = {}
        for c in colours:
            sizes[c] = sizes.get(c, 0) + 1
        target = min((c for c in sizes if sizes[c] > 1), key=lambda c: (sizes[c], c))
        for v in range(n):
            if colours[v] == target:
                split = [2 * c for c in colours]
                split[v] = 2 * target - 1
                search(split)

    search([0] * n)
    return (n, best[0] or ())


def quotient_graph(H: Graph, blocks) -> Graph:
    owner = {}
    for i, block in enumerate(blocks):
        for v in block:
            owner[v] = i
    edges = set()
    for u, v in H.edges():
        a, b = owner[u], owner[v]
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return Graph(len(blocks), sorted(edges))


def _clique_partitions(H: Graph):
    n = H.n
    masks = H.masks

    def cliques_with(v, pool):
        # cliques containing v inside pool
        out = []

        def grow(clique, cand):
            out.append(clique)
            for u in iter_bits(cand):
                grow(clique | (1 << u), cand & masks[u] & ~((1 << (u + 1)) - 1))

        grow(1 << v, masks[v] & pool)
        return out

    def rec(remaining, blocks):
        if not remaining:
            yield list(blocks)
            return
        v = (remaining & -remaining).bit_length() - 1
        for cl in cliques_with(v, remaining & ~(1 << v)):
            blocks.append(cl)
            yield from rec(remaining & ~cl, blocks)
            blocks.pop()

    yield from rec((1 << n) - 1, [])


@dataclass
class QuotientFamily:
    source: Graph
    members: list[Graph]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def clique_quotients(H: Graph) -> QuotientFamily:
    """Bipartite clique quotients of H, one representative per isomorphism class."""
    if H.n > MAX_QUOTIENT_VERTICES:
        raise ResourceError(f"clique quotients enumerated only for v(H) <= {MAX_QUOTIENT_VERTICES}")
    seen = {}
    for blocks in _clique_partitions(H):
        Q = quotient_graph(H, [list(iter_bits(b)) for b in blocks])
        if bipartition(Q) is None:
            continue
        key = canonical_form(Q)
        if key not in seen:
            seen[key] = Q
    members = sorted(seen.values(), key=lambda g: (-g.n, -g.edge_count, canonical_form(g)))
    return QuotientFamily(H, members)


def contains_subgraph(F: Graph, P: Graph) -> bool:
    """Backtracking test for a (not necessarily induced) copy of P in F."""
    if P.n > F.n:
        return False
    if P.n == 0:
        return True
    order = []
    placed = 0
    remaining = list(range(P.n))
    while remaining:
        # next: most already-placed neighbors, then highest degree
        v = max(remaining, key=lambda u: ((P.mask(u) & placed).bit_count(), P.degree(u), -u))
        order.append(v)
        remaining.remove(v)
        placed |= 1 << v
    fdeg = F.degrees()
    pdeg = P.degrees()
    image = [-1] * P.n
    all_f = F.full_mask

    def rec(i, used):
        if i == len(order):
            return True
        v = order[i]
        cand = all_f & ~used
        for u in iter_bits(P.mask(v)):
            if image[u] >= 0:
                cand &= F.mask(image[u])
        for x in iter_bits(cand):
            if fdeg[x] < pdeg[v]:
                continue
            image[v] = x
            if rec(i + 1, used | (1 << x)):
                return True
            image[v] = -1
        return False

    return rec(0, 0)


def family_subgraph_free(F: Graph, family) -> bool:
    """True iff no member of ``family`` is a subgraph of F."""
    if F.n > MAX_AUX_VERTICES:
        raise InputError(f"auxiliary graph limited to {MAX_AUX_VERTICES} vertices")
    for member in family:
        if member.n > MAX_FAMILY_MEMBER_VERTICES:
            raise InputError(f"family members limited to {MAX_FAMILY_MEMBER_VERTICES} vertices")
        if contains_subgraph(F, member):
            return False
    return True


def girth(G: Graph) -> float:
    """Length of a shortest cycle (inf for forests), by BFS from every vertex."""
    best = math.inf
    for root in range(G.n):
        dist = {root: 0}
        parent = {root: -1}
        frontier = [root]
        while frontier:
            nxt = []
            for v in frontier:
                for u in iter_bits(G.mask(v)):
                    if u not in dist:
                        dist[u] = dist[v] + 1
                        parent[u] = v
                        nxt.append(u)
                    elif parent[v] != u:
                        best = min(best, dist[u] + dist[v] + 1)
            frontier = nxt
    return best
