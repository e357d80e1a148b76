"""Deciding (c, t)-sparseness, clique numbers and clique covers.

A graph is (c, t)-sparse when every pair of vertex sets A, B with |A|, |B| >= t
has e(A, B) <= (1 - c)|A||B|.  A violating pair exists for some sizes >= t iff
one exists with both sizes exactly t (a uniformly random t-subset pair keeps
the expected density), so the exact checker only enumerates size-t sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

from . import kernels
from .errors import InputError, ResourceError
from .generators import make_rng
from .graph import Graph, from_mask, iter_bits, pair_count, to_mask

SPARSE = "sparse-certified"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

DEFAULT_ENUMERATION_BUDGET = 20_000_000
DEFAULT_CLIQUE_BUDGET = 5_000_000


def _fraction(x) -> Fraction:
    return Fraction(x).limit_denominator(10**9) if isinstance(x, float) else Fraction(x)


@dataclass
class SparsenessReport:
    verdict: str
    c: float
    t: int
    witness: tuple[frozenset, frozenset] | None = None
    method: str = "exhaustive"
    details: dict = field(default_factory=dict)

    def witness_density(self, G: Graph) -> float | None:
        if self.witness is None:
            return None
        A, B = self.witness
        return pair_count(G, A, B) / (len(A) * len(B))

    def validate(self, G: Graph) -> bool:
        """Re-check the witness against the violation inequality."""
        if self.verdict != VIOLATED:
            return self.witness is None
        if self.witness is None:
            return False
        A, B = self.witness
        if len(A) < self.t or len(B) < self.t:
            return False
        return pair_count(G, A, B) > (1 - _fraction(self.c)) * len(A) * len(B)

    def line(self) -> str:
        out = f"{self.verdict} c={self.c} t={self.t} method={self.method}"
        if self.witness is not None:
            A, B = self.witness
            out += f" A={sorted(A)} B={sorted(B)}"
        return out


def _check_params(c, t):
    if not 0 < c < 1:
        raise InputError(f"c must lie in (0, 1), got {c}")
    if t < 1:
        raise InputError(f"t must be a positive integer, got {t}")


def _top(counts, size):
    return sorted(range(len(counts)), key=lambda v: (-counts[v], v))[:size]


def check_exact(G: Graph, c: float, t: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> SparsenessReport:
    """Exhaustive decision over all size-t set pairs.

    For a fixed A the best B is the t vertices with most neighbors in A, so the
    search enumerates the C(n, t) choices of A only; ``budget`` caps that count.
    """
    _check_params(c, t)
    n = G.n
    if t > n:
        return SparsenessReport(SPARSE, c, t, details={"reason": "t > n, no admissible pair"})
    work = comb(n, t)
    if work > budget:
        return SparsenessReport(INCONCLUSIVE, c, t, details={"reason": "enumeration budget", "subsets": work})
    limit = (1 - _fraction(c)) * t * t
    best, best_a = kernels.best_t_pair(G, t, threshold=float(limit))
    details = {"max_pair_count": best, "subsets": work, "backend": kernels.BACKEND}
    if best > limit:
        a_mask = to_mask(best_a)
        counts = kernels.counts_into(G, a_mask)
        B = frozenset(_top(counts, t))
        report = SparsenessReport(VIOLATED, c, t, (frozenset(best_a), B), details=details)
        if not report.validate(G):
            raise AssertionError("exact checker produced an invalid witness")
        return report
    return SparsenessReport(SPARSE, c, t, details=details)


def check_all_sizes(G: Graph, c: float, t: int, max_n: int = 16) -> SparsenessReport:
    """Direct check over every A with |A| >= t and every size |B| >= t.

    Independent of the size-t reduction; used to test it.  Exponential in n.
    """
    _check_params(c, t)
    n = G.n
    if n > max_n:
        raise ResourceError(f"all-sizes check limited to n <= {max_n}")
    one_minus_c = 1 - _fraction(c)
    masks = G.masks
    for a_mask in range(1, 1 << n):
        na = a_mask.bit_count()
        if na < t:
            continue
        counts = sorted(((m & a_mask).bit_count() for m in masks), reverse=True)
        running = sum(counts[: t - 1]) if t > 1 else 0
        for b in range(t, n + 1):
            running += counts[b - 1]
            if running > one_minus_c * na * b:
                B = frozenset(_top([(m & a_mask).bit_count() for m in masks], b))
                return SparsenessReport(VIOLATED, c, t, (from_mask(a_mask), B), method="all-sizes")
    return SparsenessReport(SPARSE, c, t, method="all-sizes")


def refute_random(G: Graph, c: float, t: int, trials: int, seed: int) -> SparsenessReport:
    """Randomised witness search by swap ascent from random size-t pairs.

    Never certifies; returns ``violated`` with a witness or ``inconclusive``.
    """
    _check_params(c, t)
    if t > G.n:
        raise InputError("refute_random needs t <= n")
    rng = make_rng(seed)
    limit = (1 - _fraction(c)) * t * t
    n = G.n
    masks = G.masks
    best_seen = -1
    for trial in range(trials):
        A = set(rng.choice(n, t, replace=False).tolist())
        B = set(rng.choice(n, t, replace=False).tolist())
        while True:
            improved = False
            for side, other in ((A, B), (B, A)):
                counts = kernels.counts_into(G, to_mask(other))
                worst = min(side, key=lambda v: (counts[v], v))
                outside = [v for v in range(n) if v not in side]
                if not outside:
                    continue
                cand = max(outside, key=lambda v: (counts[v], -v))
                if counts[cand] > counts[worst]:
                    side.remove(worst)
                    side.add(cand)
                    improved = True
            if not improved:
                break
        value = sum((masks[a] & to_mask(B)).bit_count() for a in A)
        best_seen = max(best_seen, value)
        if value > limit:
            report = SparsenessReport(
                VIOLATED, c, t, (frozenset(A), frozenset(B)), method="randomized",
                details={"trial": trial, "pair_count": value},
            )
            assert report.validate(G)
            return report
    return SparsenessReport(INCONCLUSIVE, c, t, method="randomized", details={"best_pair_count": best_seen, "trials": trials})


# -- cliques -------------------------------------------------------------


def degeneracy_order(G: Graph) -> list[int]:
    """Smallest-last order: repeatedly remove a minimum-degree vertex."""
    alive = G.full_mask
    deg = G.degrees()
    order = []
    masks = G.masks
    for _ in range(G.n):
        v = min(iter_bits(alive), key=lambda u: (deg[u], u))
        order.append(v)
        alive &= ~(1 << v)
        for u in iter_bits(masks[v] & alive):
            deg[u] -= 1
    return order


def greedy_clique(G: Graph) -> list[int]:
    masks = G.masks
    best = []
    for start in sorted(range(G.n), key=lambda v: -G.degree(v))[: min(G.n, 32)]:
        clique = [start]
        cand = masks[start]
        while cand:
            v = max(iter_bits(cand), key=lambda u: ((masks[u] & cand).bit_count(), -u))
            clique.append(v)
            cand &= masks[v]
        if len(clique) > len(best):
            best = clique
    return best


def max_clique(G: Graph, budget: int | None = DEFAULT_CLIQUE_BUDGET) -> list[int]:
    """A maximum clique, by degeneracy-ordered bitset branch and bound."""
    if G.n == 0:
        return []
    order = degeneracy_order(G)[::-1]
    H = G.relabel(order)
    seed_clique = greedy_clique(G)
    size, members, nodes, complete = kernels.max_clique(H, len(seed_clique) - 1, budget)
    if not complete:
        raise ResourceError(f"clique search exceeded {budget} nodes", best=max(size, len(seed_clique)))
    if size < len(seed_clique) or not members:
        return sorted(seed_clique)
    return sorted(order[v] for v in members)


def clique_number(G: Graph, budget: int | None = DEFAULT_CLIQUE_BUDGET) -> int:
    return len(max_clique(G, budget))


def is_clique(G: Graph, vertices) -> bool:
    vs = list(vertices)
    return all(G.has_edge(u, v) for u, v in combinations(vs, 2))


@dataclass
class CliqueCover:
    parts: list[frozenset]

    @property
    def size(self) -> int:
        return len(self.parts)

    def validate(self, G: Graph) -> bool:
        seen = 0
        for part in self.parts:
            m = to_mask(part)
            if m & seen or not part or not is_clique(G, part):
                return False
            seen |= m
        return seen == G.full_mask

    def index(self) -> list[int]:
        """Part index of every vertex."""
        out = [0] * sum(len(p) for p in self.parts)
        for i, part in enumerate(self.parts):
            for v in part:
                out[v] = i
        return out


def _greedy_cover(G: Graph) -> list[frozenset]:
    masks = G.masks
    remaining = G.full_mask
    parts = []
    while remaining:
        start = max(iter_bits(remaining), key=lambda v: ((masks[v] & remaining).bit_count(), -v))
        clique = 1 << start
        cand = masks[start] & remaining
        while cand:
            v = max(iter_bits(cand), key=lambda u: ((masks[u] & cand).bit_count(), -u))
            clique |= 1 << v
            cand &= masks[v]
        parts.append(from_mask(clique))
        remaining &= ~clique
    return parts


def _exact_cover(G: Graph) -> list[frozenset]:
    n = G.n
    masks = G.masks
    upper = _greedy_cover(G)
    order = sorted(range(n), key=lambda v: G.degree(v))
    best = [upper]

    def place(i, parts):
        if len(parts) >= len(best[0]):
            return
        if i == n:
            best[0] = [from_mask(p) for p in parts]
            return
        v = order[i]
        for j in range(len(parts)):
            if parts[j] & ~masks[v] == 0:
                parts[j] |= 1 << v
                place(i + 1, parts)
                parts[j] &= ~(1 << v)
        parts.append(1 << v)
        place(i + 1, parts)
        parts.pop()

    place(0, [])
    return best[0]


def clique_cover(G: Graph, mode: str = "greedy") -> CliqueCover:
    """Partition of V(G) into cliques; ``exact-small`` is minimum (n <= 20)."""
    if mode == "greedy":
        parts = _greedy_cover(G)
    elif mode == "exact-small":
        if G.n > 20:
            raise InputError("exact-small clique cover needs n <= 20")
        parts = _exact_cover(G)
    else:
        raise InputError(f"unknown clique cover mode {mode!r}")
    return CliqueCover(sorted(parts, key=min))


def subfield_cliques(q: int, count: int, seed: int) -> list[frozenset]:
    """Uniform samples from the cliques a*GF(p) + b (a a non-zero square) of the Paley graph on GF(p^2)."""
    from .fields import field_for_order

    F = field_for_order(q)
    if F.degree != 2:
        raise InputError(f"subfield cliques need q = p^2, got {q}")
    rng = make_rng(seed)
    squares = sorted(F.nonzero_squares())
    base = F.base_field()
    out = []
    for _ in range(count):
        a = squares[int(rng.integers(len(squares)))]
        b = int(rng.integers(q))
        out.append(frozenset(F.add(F.mul(a, x), b) for x in base))
    return out
