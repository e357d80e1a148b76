"""Seeded host-graph families and auxiliary extremal graphs.

Random generators draw from numpy's counter-based Philox bit generator keyed by
the 64-bit seed, consuming one double per unordered pair in lexicographic order.
The same (parameters, seed) therefore always produce the same graph.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import InputError, ResourceError
from .fields import field_for_order, is_prime
from .graph import Graph, iter_bits

RNG_ALGORITHM = "numpy.Philox"
KSR_FREE_MAX_K = 64


def make_rng(seed: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise InputError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(seed))


def gnp(n: int, p: float, seed: int) -> Graph:
    if not 0.0 <= p <= 1.0:
        raise InputError(f"edge probability must lie in [0, 1], got {p}")
    if n < 0:
        raise InputError("n must be non-negative")
    rng = make_rng(seed)
    masks = [0] * n
    for u in range(n - 1):
        draws = rng.random(n - u - 1)
        for off in np.flatnonzero(draws < p).tolist():
            v = u + 1 + off
            masks[u] |= 1 << v
            masks[v] |= 1 << u
    meta = {"family": "gnp", "n": n, "p": p, "seed": int(seed), "rng": RNG_ALGORITHM}
    return Graph.from_masks(masks, meta=meta, check=False)


def paley(q: int) -> Graph:
    """Paley graph on GF(q): x ~ y iff x - y is a non-zero square."""
    if q % 4 != 1:
        raise InputError(f"Paley graphs need q = 1 mod 4, got {q}")
    F = field_for_order(q)
    squares = F.nonzero_squares()
    masks = []
    for x in F.elements():
        m = 0
        for s in squares:
            m |= 1 << F.add(x, s)
        masks.append(m)
    meta = {"family": "paley", "q": q, "field": repr(F)}
    if F.degree == 2:
        meta["irreducible"] = f"x^2 - {F.nonresidue}"
    return Graph.from_masks(masks, meta=meta, check=False)


def clique_union(k: int, s: int) -> Graph:
    if k < 1 or s < 1:
        raise InputError("clique_union needs k, s >= 1")
    masks = []
    for i in range(k):
        block = ((1 << s) - 1) << (i * s)
        masks.extend(block ^ (1 << (i * s + j)) for j in range(s))
    return Graph.from_masks(masks, meta={"family": "clique-union", "k": k, "s": s}, check=False)


def _projective_points(p: int) -> list[tuple[int, int, int]]:
    # first non-zero coordinate normalised to 1
    pts = [(1, y, z) for y in range(p) for z in range(p)]
    pts += [(0, 1, z) for z in range(p)]
    pts.append((0, 0, 1))
    return pts


def projective_incidence(p: int) -> Graph:
    """Point-line incidence graph of PG(2, p); points first, then lines."""
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    if p > 101:
        raise InputError("projective_incidence supports p <= 101")
    pts = _projective_points(p)
    N = len(pts)
    edges = []
    for i, P in enumerate(pts):
        for j, L in enumerate(pts):
            if (P[0] * L[0] + P[1] * L[1] + P[2] * L[2]) % p == 0:
                edges.append((i, N + j))
    return Graph(2 * N, edges, meta={"family": "incidence", "p": p})


def incidence_on(k: int) -> Graph:
    """A C4-free bipartite graph on exactly ``k`` vertices cut from a projective plane.

    Tries the plane just large enough for ``k`` vertices (keeping balanced
    point and line subsets) and the largest plane that fits (padding with
    isolated vertices); returns whichever has more edges.
    """
    if k < 2:
        return Graph(k, meta={"family": "incidence-on", "k": k})
    candidates = []
    p = 2
    while True:
        N = p * p + p + 1
        if is_prime(p):
            if 2 * N <= k:
                candidates.append(("pad", p))
            else:
                candidates.append(("trim", p))
                break
        p += 1
    best = None
    for mode, p in candidates[-2:]:
        inc = projective_incidence(p)
        N = p * p + p + 1
        if mode == "pad":
            masks = list(inc.masks) + [0] * (k - 2 * N)
            G = Graph.from_masks(masks, check=False)
        else:
            keep = list(range(k - k // 2)) + [N + j for j in range(k // 2)]
            G, _ = inc.induced(keep)
        if best is None or G.edge_count > best.edge_count:
            best = G
    best.meta.update({"family": "incidence-on", "k": k})
    return best


def _ksr_violations(masks, side, other_mask, s, r):
    """s-subsets of ``side`` with at least ``r`` common neighbors inside ``other_mask``."""
    found = []
    for S in combinations(side, s):
        common = other_mask
        for v in S:
            common &= masks[v]
        if common.bit_count() >= r:
            found.append((S, common, r))
    return found


def contains_ksr(G: Graph, s: int, r: int, parts=None) -> bool:
    """Exhaustive K_{s,r} subgraph test for a bipartite graph with known parts."""
    if parts is None:
        parts = bipartition(G)
        if parts is None:
            raise InputError("graph is not bipartite")
    X = sum(1 << v for v in parts[0])
    Y = sum(1 << v for v in parts[1])
    return bool(_ksr_violations(G.masks, list(iter_bits(X)), Y, s, r)) or bool(
        _ksr_violations(G.masks, list(iter_bits(Y)), X, s, r)
    )


def bipartition(G: Graph):
    """Two-colouring as (side0, side1) lists, or None if G is not bipartite."""
    colour = [-1] * G.n
    for root in range(G.n):
        if colour[root] >= 0:
            continue
        colour[root] = 0
        stack = [root]
        while stack:
            v = stack.pop()
            for u in iter_bits(G.mask(v)):
                if colour[u] < 0:
                    colour[u] = 1 - colour[v]
                    stack.append(u)
                elif colour[u] == colour[v]:
                    return None
    return [v for v in range(G.n) if colour[v] == 0], [v for v in range(G.n) if colour[v] == 1]


def random_ksr_free(k: int, s: int, r: int, seed: int) -> Graph:
    """Random bipartite K_{s,r}-free graph on ``k`` vertices by sample-then-delete."""
    if not 2 <= s <= r:
        raise InputError("need 2 <= s <= r")
    meta = {"family": "ksr-free", "k": k, "s": s, "r": r, "seed": int(seed)}
    half = k // 2
    X, Y = list(range(half)), list(range(half, k))
    if k < s + r:
        return Graph(k, [(x, y) for x in X for y in Y], meta=meta)
    if k > KSR_FREE_MAX_K:
        raise ResourceError(f"exhaustive K_{{{s},{r}}} verification capped at k={KSR_FREE_MAX_K}")
    rng = make_rng(seed)
    p = min(1.0, k ** (-(s + r - 2) / (s * r - 1)))
    masks = [0] * k
    for x in X:
        draws = rng.random(len(Y))
        for j in np.flatnonzero(draws < p).tolist():
            y = Y[j]
            masks[x] |= 1 << y
            masks[y] |= 1 << x
    y_mask = sum(1 << y for y in Y)
    x_mask = sum(1 << x for x in X)
    while True:
        violations = _ksr_violations(masks, X, y_mask, s, r) + _ksr_violations(masks, Y, x_mask, s, r)
        if not violations:
            break
        for S, _, size in violations:
            common = ~0
            for v in S:
                common &= masks[v]
            if common.bit_count() < size:
                continue  # already destroyed by an earlier deletion
            targets = list(iter_bits(common))
            a = S[int(rng.integers(len(S)))]
            b = targets[int(rng.integers(len(targets)))]
            masks[a] &= ~(1 << b)
            masks[b] &= ~(1 << a)
    meta["density"] = p
    return Graph.from_masks(masks, meta=meta, check=False)


def thin(G: Graph, q: float, seed: int) -> Graph:
    """Keep each edge of G independently with probability q (one draw per edge, lexicographic)."""
    if not 0.0 <= q <= 1.0:
        raise InputError(f"keep probability must lie in [0, 1], got {q}")
    edges = list(G.edges())
    draws = make_rng(seed).random(len(edges))
    kept = [e for e, x in zip(edges, draws) if x < q]
    meta = dict(G.meta)
    meta.update({"thinned": q, "thin_seed": int(seed)})
    return Graph(G.n, kept, meta=meta)


def high_girth_bipartite(k: int, girth: int, seed: int) -> Graph:
    """Random greedy bipartite graph on k vertices whose shortest cycle has length >= girth.

    Cross pairs are visited in a seeded random order; a pair is joined when its
    endpoints are currently at distance >= girth - 1.
    """
    if k < 0 or girth < 3:
        raise InputError("need k >= 0 and girth >= 3")
    left = (k + 1) // 2
    pairs = [(u, v) for u in range(left) for v in range(left, k)]
    order = make_rng(seed).permutation(len(pairs)).tolist()
    masks = [0] * k
    for i in order:
        u, v = pairs[i]
        # BFS from u up to depth girth - 2
        seen = 1 << u
        frontier = 1 << u
        close = False
        for _ in range(girth - 2):
            nxt = 0
            for x in iter_bits(frontier):
                nxt |= masks[x]
            nxt &= ~seen
            if (nxt >> v) & 1:
                close = True
                break
            seen |= nxt
            frontier = nxt
            if not frontier:
                break
        if not close:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
    return Graph.from_masks(masks, meta={"family": "high-girth-bipartite", "k": k, "girth": girth}, check=False)


def petersen() -> Graph:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, edges, meta={"family": "petersen"})


FAMILIES = ("gnp", "paley", "clique-union", "incidence", "ksr-free")


def generate(family: str, params: dict, seed: int = 0) -> Graph:
    """Dispatch used by the CLI."""
    try:
        if family == "gnp":
            return gnp(int(params["n"]), float(params["p"]), seed)
        if family == "paley":
            return paley(int(params["q"]))
        if family == "clique-union":
            return clique_union(int(params["k"]), int(params["s"]))
        if family == "incidence":
            return projective_incidence(int(params["p"]))
        if family == "ksr-free":
            return random_ksr_free(int(params["k"]), int(params["s"]), int(params["r"]), seed)
    except KeyError as exc:
        raise InputError(f"family {family!r} needs parameter {exc.args[0]!r}") from None
    raise InputError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
