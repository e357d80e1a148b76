"""Brute-force ground truth at tiny scale.

Nothing here reuses the adjacency tests of the modules it checks: graphs are
read through their vertex count and edge list only, and every query runs on
locally built neighbor bitmasks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations

from .errors import InputError, ResourceError


@dataclass
class OracleBudget:
    max_vertices: int = 24
    max_pattern: int = 8
    max_edges: int = 24
    max_nodes: int = 50_000_000
    wall_clock: float | None = None


DEFAULT = OracleBudget()


def _adj(graph) -> list[int]:
    n = graph.n
    adj = [0] * n
    for u, v in graph.edges():
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Clock:
    def __init__(self, budget: OracleBudget):
        self.budget = budget
        self.nodes = 0
        self.start = time.monotonic()
        self.best = None  # best bound found so far, reported on exhaustion

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise ResourceError("oracle node budget exhausted", best=self.best)
        if self.budget.wall_clock is not None and self.nodes % 4096 == 0:
            if time.monotonic() - self.start > self.budget.wall_clock:
                raise ResourceError("oracle wall-clock budget exhausted", best=self.best)


def _pattern_order(hadj, k):
    order, placed = [], 0
    left = set(range(k))
    while left:
        v = max(left, key=lambda u: ((hadj[u] & placed).bit_count(), hadj[u].bit_count(), -u))
        order.append(v)
        left.discard(v)
        placed |= 1 << v
    return order


def _copies(gamma_adj, g_adj, n, hadj, k, induced, clock, limit=None, root=None):
    """Labelled maps of the pattern: H-edges to G-edges, and (when induced) H-non-edges to Gamma-non-edges.

    ``root = (h, x)`` restricts to maps sending pattern vertex h to x.
    """
    order = _pattern_order(hadj, k)
    if root is not None:
        order.remove(root[0])
        order.insert(0, root[0])
    hdeg = [hadj[v].bit_count() for v in range(k)]
    gdeg = [g_adj[x].bit_count() for x in range(n)]
    full = (1 << n) - 1
    image = [-1] * k
    found = []
    count = [0]

    def rec(i, used):
        clock.tick()
        if i == k:
            count[0] += 1
            if limit is not None:
                found.append(tuple(image))
                if len(found) >= limit:
                    return True
            return False
        v = order[i]
        cand = full & ~used
        if i == 0 and root is not None:
            cand &= 1 << root[1]
        for j in range(i):
            p = order[j]
            if (hadj[v] >> p) & 1:
                cand &= g_adj[image[p]]
            elif induced:
                cand &= ~gamma_adj[image[p]]
        for x in _bits(cand):
            if gdeg[x] < hdeg[v]:
                continue
            image[v] = x
            if rec(i + 1, used | (1 << x)):
                return True
        image[v] = -1
        return False

    rec(0, 0)
    return count[0], found


def count_induced_in(Gamma, G, H, budget: OracleBudget = DEFAULT) -> int:
    """Number of injective maps sending H-edges to G-edges and H-non-edges to Gamma-non-edges."""
    if Gamma.n != G.n:
        raise InputError("G and Gamma must share a vertex set")
    if H.n > budget.max_pattern or G.n > budget.max_vertices:
        raise ResourceError(f"oracle limited to v(H) <= {budget.max_pattern}, n <= {budget.max_vertices}")
    gam, g = _adj(Gamma), _adj(G)
    for x in range(G.n):
        if g[x] & ~gam[x]:
            raise InputError("G must be a subgraph of Gamma")
    if H.n == 0:
        return 1
    total, _ = _copies(gam, g, G.n, _adj(H), H.n, True, _Clock(budget))
    return total


def _first_copy_edges(gam, g, n, hadj, k, induced, clock):
    _, found = _copies(gam, g, n, hadj, k, induced, clock, limit=1)
    if not found:
        return None
    image = found[0]
    edges = set()
    for a in range(k):
        for b in _bits(hadj[a]):
            if a < b:
                x, y = image[a], image[b]
                edges.add((min(x, y), max(x, y)))
    return sorted(edges)


def _edge_disjoint_packing(gam, g, n, hadj, k, induced, fixed, clock):
    """Greedy count of copies sharing no removable edge; each needs its own deletion."""
    g = list(g)
    count = 0
    while True:
        edges = _first_copy_edges(gam, g, n, hadj, k, induced, clock)
        if edges is None:
            return count
        free = [e for e in edges if e not in fixed]
        if not free:
            return None  # a copy built only from fixed edges: branch is infeasible
        count += 1
        for x, y in free:
            g[x] &= ~(1 << y)
            g[y] &= ~(1 << x)


def _max_avoiding(gam, start, n, hadj, k, induced, budget, lower=0):
    clock = _Clock(budget)
    best = [lower, None]

    clock.best = max(lower, 0)  # the edgeless subgraph is always clean

    def rec(g, ecount, fixed):
        clock.tick()
        if ecount <= best[0]:
            return
        pack = _edge_disjoint_packing(gam, g, n, hadj, k, induced, fixed, clock)
        if pack is None or ecount - pack <= best[0]:
            return
        edges = _first_copy_edges(gam, g, n, hadj, k, induced, clock)
        if edges is None:
            best[0] = ecount
            best[1] = list(g)
            clock.best = ecount
            return
        keep = set(fixed)
        for e in edges:
            if e in fixed:
                continue
            x, y = e
            g2 = list(g)
            g2[x] &= ~(1 << y)
            g2[y] &= ~(1 << x)
            rec(g2, ecount - 1, frozenset(keep))
            keep.add(e)

    total = sum(m.bit_count() for m in start) // 2
    rec(list(start), total, frozenset())
    return best


def _edges_of(adj):
    return [(u, v) for u in range(len(adj)) for v in _bits(adj[u]) if u < v]


def max_subgraph_avoiding(Gamma, H, budget: OracleBudget = DEFAULT):
    """Exact ex(Gamma, no copy of H induced in Gamma) with a witness edge list."""
    gam = _adj(Gamma)
    m = sum(x.bit_count() for x in gam) // 2
    if m > budget.max_edges:
        raise ResourceError(f"max_subgraph_avoiding limited to e(Gamma) <= {budget.max_edges}")
    if H.n > budget.max_pattern:
        raise ResourceError(f"pattern limited to {budget.max_pattern} vertices")
    if H.n > Gamma.n:
        return m, _edges_of(gam)
    best, witness = _max_avoiding(gam, gam, Gamma.n, _adj(H), H.n, True, budget, lower=-1)
    return best, _edges_of(witness)


def turan_number(n: int, H, budget: OracleBudget = DEFAULT) -> int:
    """ex(n, H): the most edges on n vertices with no (not necessarily induced) copy of H.

    Vertex-by-vertex augmentation.  Deleting a minimum-degree vertex from an
    H-free graph with e edges on k vertices leaves at least e - floor(2e/k)
    edges, so only graphs above the back-propagated edge threshold need to be
    extended.  Graphs are deduplicated by a relabelled adjacency certificate;
    missed merges cost time only, never correctness.
    """
    if n > 9 or H.n > 5:
        raise ResourceError("turan_number limited to n <= 9 and v(H) <= 5")
    if n < 0:
        raise InputError("n must be non-negative")
    hadj = _adj(H)
    if H.n > n:
        return n * (n - 1) // 2
    if not any(hadj):
        # every graph on >= v(H) vertices contains an edgeless H
        raise InputError("ex(n, H) is undefined for edgeless H with v(H) <= n")
    clock = _Clock(budget)
    target = max(_greedy_free(n, hadj, H.n, clock), _multipartite_free(n, hadj, H.n, clock))
    floor = [0] * (n + 1)
    floor[n] = target
    for k in range(n, 1, -1):
        floor[k - 1] = max(0, floor[k] - (2 * floor[k]) // k)
    level = {(): (0,)}  # certificate -> adjacency masks; start from one vertex
    for k in range(1, n):
        nxt = {}
        for adj in level.values():
            e = sum(m.bit_count() for m in adj) // 2
            need = floor[k + 1] - e
            for S in range(1 << k):
                clock.tick()
                if S.bit_count() < need:
                    continue
                g = [m | (((S >> v) & 1) << k) for v, m in enumerate(adj)] + [S]
                if any(_copies(g, g, k + 1, hadj, H.n, False, clock, limit=1, root=(h, k))[1] for h in range(H.n)):
                    continue
                nxt.setdefault(_certificate(g), tuple(g))
        level = nxt
    return max(sum(m.bit_count() for m in adj) // 2 for adj in level.values())


def _certificate(adj):
    # colour refinement plus single-path individualisation; equal output implies isomorphic
    n = len(adj)
    colours = [0] * n
    while True:
        while True:
            sigs = [(colours[v], tuple(sorted(colours[u] for u in _bits(adj[v])))) for v in range(n)]
            rank = {x: i for i, x in enumerate(sorted(set(sigs)))}
            new = [rank[x] for x in sigs]
            if len(rank) == len(set(colours)):
                colours = new
                break
            colours = new
        if len(set(colours)) == n:
            break
        sizes = {}
        for c in colours:
            sizes[c] = sizes.get(c, 0) + 1
        cell = min(c for c in sizes if sizes[c] > 1)
        pick = colours.index(cell)
        colours = [2 * c + (v != pick and c == cell) for v, c in enumerate(colours)]
    pos = colours
    return tuple(sorted((min(pos[u], pos[v]), max(pos[u], pos[v])) for u in range(n) for v in _bits(adj[u]) if u < v))


def _multipartite_free(n, hadj, k, clock):
    # lower bound: densest balanced complete multipartite graph without H
    best = 0
    for parts in range(1, n + 1):
        part = [v % parts for v in range(n)]
        g = [sum(1 << u for u in range(n) if part[u] != part[v]) for v in range(n)]
        if _first_copy_edges(g, g, n, hadj, k, False, clock) is None:
            best = max(best, sum(m.bit_count() for m in g) // 2)
    return best


def _greedy_free(n, hadj, k, clock):
    # lower bound: add edges in lexicographic order while H stays absent
    g = [0] * n
    count = 0
    for u, v in combinations(range(n), 2):
        g[u] |= 1 << v
        g[v] |= 1 << u
        if _first_copy_edges(g, g, n, hadj, k, False, clock) is None:
            count += 1
        else:
            g[u] &= ~(1 << v)
            g[v] &= ~(1 << u)
    return count
