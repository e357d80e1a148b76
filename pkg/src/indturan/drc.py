"""Dependent-random-choice embedding of d-bounded bipartite patterns.

Pattern vertices use a fixed layout: the ``ell`` vertices complete to B come
first (ids ``0..ell-1``), then the ``a`` bounded vertices of A1, then the
``b`` vertices of B.  Removing apex 0 therefore shifts every remaining id down
by one, which is how inner-level embeddings are lifted.

Every sampler draws from generators keyed by its position in the attempt tree
(level, apex index, attempt index), so enlarging a budget only appends new
attempts and never changes the outcome of earlier ones.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from .errors import InputError, InternalError, PreconditionError
from .generators import bipartition
from .graph import Embedding, Graph, iter_bits, is_copy_induced_in, to_mask

GRID_BITS = 20
HOEFFDING_LEVEL = 1e-3

REJECT_REASONS = (
    "X-not-independent",
    "tuple-not-rich",
    "A1-pick-collision",
    "A1-pick-adjacent",
    "no-neighbors",
    "apex-not-good",
    "empty-view",
    "guard-failed",
    "budget-exhausted",
)


@dataclass(frozen=True)
class Reject:
    reason: str
    detail: dict = field(default_factory=dict, compare=False)

    def __bool__(self):
        return False


# -- patterns --------------------------------------------------------------


class BipartitePattern:
    """A d-bounded bipartite pattern with A0 complete to B."""

    def __init__(self, ell: int, b: int, a1: list, d: int | None = None, name: str | None = None):
        if ell < 1:
            raise InputError("a pattern needs at least one vertex complete to B")
        if b < 1:
            raise InputError("B must be nonempty")
        self.ell = ell
        self.b = b
        self.a1 = [tuple(sorted(set(nb))) for nb in a1]
        for nb in self.a1:
            if any(not 0 <= i < b for i in nb):
                raise InputError(f"A1 neighbor index out of range 0..{b - 1}: {nb}")
            if len(nb) == b:
                raise InputError("an A1 vertex complete to B belongs in A0")
        self.a = len(self.a1)
        natural = max([ell] + [len(nb) for nb in self.a1])
        self.d = natural if d is None else d
        if self.d < natural:
            raise InputError(f"pattern is not {self.d}-bounded")
        edges = []
        B0 = ell + self.a
        for i in range(ell):
            edges.extend((i, B0 + j) for j in range(b))
        for k, nb in enumerate(self.a1):
            edges.extend((ell + k, B0 + j) for j in nb)
        self.graph = Graph(ell + self.a + b, edges)
        self.e = self.graph.edge_count
        self.name = name or self.spec()

    @property
    def v(self) -> int:
        return self.ell + self.a + self.b

    @property
    def A0(self):
        return list(range(self.ell))

    @property
    def A1(self):
        return list(range(self.ell, self.ell + self.a))

    @property
    def B(self):
        return list(range(self.ell + self.a, self.v))

    def spec(self) -> str:
        parts = ["/".join(map(str, nb)) if nb else "-" for nb in self.a1]
        return f"bip l={self.ell} B={self.b} A1={','.join(parts)}"

    def without_apex(self) -> "BipartitePattern":
        if self.ell < 2:
            raise InputError("cannot remove the last complete vertex")
        return BipartitePattern(self.ell - 1, self.b, self.a1, d=self.d)

    def __repr__(self):
        return f"BipartitePattern({self.spec()!r}, d={self.d})"


def parse_pattern(text: str) -> BipartitePattern:
    """Parse ``bip l=<ell> B=<b> A1=<entries>``.

    A1 entries are comma separated; an integer k means B[0..k-1], a
    slash-separated list (``0/2``) names B indices, ``-`` is an isolated vertex.
    """
    tokens = text.split()
    if not tokens or tokens[0] != "bip":
        raise InputError(f"pattern spec must start with 'bip': {text!r}")
    fields = {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise InputError(f"bad pattern token {tok!r}")
        key, val = tok.split("=", 1)
        fields[key] = val
    try:
        ell = int(fields["l"])
        b = int(fields["B"])
    except (KeyError, ValueError):
        raise InputError(f"pattern spec needs integer l= and B= fields: {text!r}") from None
    a1 = []
    for entry in filter(None, fields.get("A1", "").split(",")):
        if entry == "-":
            a1.append(())
        elif "/" in entry:
            a1.append(tuple(int(x) for x in entry.split("/")))
        else:
            k = int(entry)
            if not 0 <= k <= b:
                raise InputError(f"A1 degree {k} out of range")
            a1.append(tuple(range(k)))
    return BipartitePattern(ell, b, a1)


def pattern_from_graph(H: Graph) -> BipartitePattern:
    """Read a bipartite graph as a pattern, choosing the side with the smallest d."""
    parts = bipartition(H)
    if parts is None:
        raise InputError("pattern graph is not bipartite")
    best = None
    for A, B in (parts, parts[::-1]):
        if not B:
            continue
        bmask = to_mask(B)
        pos = {v: i for i, v in enumerate(B)}
        A0 = [v for v in A if H.mask(v) & bmask == bmask]
        if not A0:
            continue
        a1 = [tuple(pos[x] for x in iter_bits(H.mask(v))) for v in A if v not in A0]
        if any(len(nb) == len(B) for nb in a1):
            continue
        P = BipartitePattern(len(A0), len(B), a1)
        if best is None or P.d < best.d:
            best = P
    if best is None:
        raise InputError("no side of the pattern has a vertex complete to the other side")
    return best


# -- host views --------------------------------------------------------------


class BipartiteHostView:
    """The U-R edges of G, with Gamma kept for non-adjacency tests."""

    def __init__(self, Gamma: Graph, G: Graph, U, R):
        if G.n != Gamma.n:
            raise InputError("G and Gamma must share a vertex set")
        self.Gamma = Gamma
        self.G = G
        self.U_mask = U if isinstance(U, int) else to_mask(U)
        self.R_mask = R if isinstance(R, int) else to_mask(R)
        if self.U_mask & self.R_mask:
            raise InputError("view sides must be disjoint")
        self.U = list(iter_bits(self.U_mask))
        self.R = list(iter_bits(self.R_mask))
        gm = G.masks
        self.deg = {u: (gm[u] & self.R_mask).bit_count() for u in self.U}
        self.edges = sum(self.deg.values())
        self.notes: dict = {}

    @property
    def m(self) -> int:
        return len(self.U)

    @property
    def r(self) -> int:
        return len(self.R)

    @property
    def q(self) -> float:
        if not self.U or not self.R:
            return 0.0
        return self.edges / (self.m * self.r)

    def d_avg(self) -> float:
        return self.edges / self.m if self.U else 0.0

    def nbr_mask(self, u: int) -> int:
        return self.G.mask(u) & self.R_mask

    def common_in_U(self, S) -> int:
        m = self.U_mask
        for x in S:
            m &= self.G.mask(x)
        return m

    def with_U(self, U) -> "BipartiteHostView":
        return BipartiteHostView(self.Gamma, self.G, U, self.R_mask)


def split_view(Gamma: Graph, G: Graph, seed: int = 0) -> BipartiteHostView:
    """Random balanced split into U (floor n/2) and R (ceil n/2)."""
    rng = np.random.Generator(np.random.Philox(int(seed)))
    perm = rng.permutation(G.n).tolist()
    half = G.n // 2
    return BipartiteHostView(Gamma, G, perm[:half], perm[half:])


# -- constants -----------------------------------------------------------------


def _kappa(H) -> float:
    if isinstance(H, BipartitePattern):
        return 1 + 1 / H.v
    if isinstance(H, Graph):
        return 1 + 1 / H.n
    return float(H)


def delta_condition(delta: float, kappa: float) -> bool:
    return 0 < delta < 0.25 and 1 - 2 * delta > delta ** (1 - 1 / kappa)


def choose_delta(H) -> float:
    """Largest delta = k / 2^20 below 1/4 with 1 - 2 delta > delta^(1 - 1/kappa).

    ``H`` is a pattern, a graph (kappa = 1 + 1/v(H)) or kappa itself.  Both
    sides of the inequality decrease in delta at different rates and the
    feasible set is an interval (0, delta*), so bisection on the grid suffices.
    """
    kappa = _kappa(H)
    if kappa <= 1:
        raise InputError("kappa must exceed 1")
    scale = 1 << GRID_BITS
    lo, hi = 1, scale // 4 - 1
    if not delta_condition(lo / scale, kappa):
        raise InternalError("no feasible delta on the grid")
    if delta_condition(hi / scale, kappa):
        return hi / scale
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if delta_condition(mid / scale, kappa):
            lo = mid
        else:
            hi = mid
    return lo / scale


@dataclass
class DrcConfig:
    c: float
    t: int
    delta: float | None = None
    eps: float | None = None
    beta: float | None = None
    mode: str = "soft"
    seed: int = 0
    apex_budget: int = 32
    attempt_budget: int = 64
    check_goodness: bool = True
    goodness_samples: int = 64
    goodness_budget: int = 4096

    def __post_init__(self):
        if not 0 < self.c < 1:
            raise InputError("c must lie in (0, 1)")
        if self.mode not in ("soft", "strict"):
            raise InputError(f"mode must be soft or strict, got {self.mode!r}")

    def resolved(self, H: BipartitePattern) -> "DrcConfig":
        """Copy with delta, eps and beta filled in from the pattern."""
        out = DrcConfig(**self.__dict__)
        if out.delta is None:
            out.delta = choose_delta(H)
        if out.eps is None:
            out.eps = self.c ** (H.b + 1) / 4
        if out.beta is None:
            out.beta = self.c ** (H.b * H.b) / (8 * math.comb(H.b, min(H.b, H.d)))
        if not delta_condition(out.delta, _kappa(H)):
            raise InputError(f"delta={out.delta} violates 1 - 2 delta > delta^(1 - 1/kappa)")
        return out

    def schedule(self, H: BipartitePattern, ell: int) -> dict:
        cfg = self.resolved(H)
        c, d, b, a, e = self.c, H.d, H.b, H.a, H.e
        eps, beta, delta = cfg.eps, cfg.beta, cfg.delta
        gamma = (c ** (b * b) / 2) * delta**b * c ** (a * a) * (c**b * eps) ** a
        return {
            "C": 1 / (2 * (1 - beta) * eps * delta) ** ell,
            "C_prime": delta ** (-2 * ell),
            "gamma": gamma,
            "gamma_ell": gamma * delta**e / 2 * ((1 - beta) ** e * eps**e * delta ** (2 * b) / 2) ** (ell - 1),
        }


def evaluate_guards(view: BipartiteHostView, H: BipartitePattern, cfg: DrcConfig, ell: int) -> dict:
    sched = cfg.schedule(H, ell)
    m, r, t, d = view.m, view.r, cfg.t, H.d
    q_needed = sched["C"] * m ** (-1 / d) * t ** (1 / d) if m else math.inf
    r_needed = sched["C_prime"] * t * (m / t) ** (ell / d)
    return {
        "level": ell,
        "q": view.q,
        "q_needed": q_needed,
        "q_ok": view.q >= q_needed,
        "r": r,
        "r_needed": r_needed,
        "r_ok": r >= r_needed,
    }


# -- reduction -----------------------------------------------------------------


def delta_reduce(view: BipartiteHostView, delta: float, kappa: float | None = None, d: int | None = None):
    """Shrink U until every degree lies within a factor delta^2 of the new average.

    Repeatedly keeps only the vertices of degree >= D_i / delta while the
    vertices of degree <= D_i / delta carry less than 2 delta of the edges, then
    keeps degrees in [delta D, D / delta].  The three guaranteed conclusions are
    asserted on the result (the volume bound only for exponents >= kappa).
    """
    if view.edges <= 0:
        raise InputError("delta_reduce needs e(U, R) > 0")
    if not 0 < delta < 0.25:
        raise InputError("delta must lie in (0, 1/4)")
    deg = view.deg
    Ui = list(view.U)
    iterations = 0
    while True:
        e_i = sum(deg[u] for u in Ui)
        D = e_i / len(Ui)
        low = sum(deg[u] for u in Ui if deg[u] <= D / delta)
        if low < 2 * delta * e_i:
            Ui = [u for u in Ui if deg[u] >= D / delta]
            iterations += 1
            if not Ui:
                raise InternalError(f"reduction emptied U after {iterations} iterations")
            continue
        break
    Up = [u for u in Ui if delta * D <= deg[u] <= D / delta]
    if not Up:
        raise InternalError("reduction produced an empty side")
    out = view.with_U(Up)
    out.notes = {"iterations": iterations, "D_final": D, "m_before": view.m}
    check_reduction(view, out, delta, kappa, d)
    return out


def check_reduction(before: BipartiteHostView, after: BipartiteHostView, delta, kappa=None, d=None, tol=1e-9):
    avg0, avg1 = before.d_avg(), after.d_avg()
    lo, hi = delta**2 * avg1, avg1 / delta**2
    for u in after.U:
        if not lo * (1 - tol) <= after.deg[u] <= hi * (1 + tol):
            raise InternalError(f"vertex {u} degree {after.deg[u]} outside [{lo}, {hi}]")
    if avg1 < delta * avg0 * (1 - tol):
        raise InternalError(f"average degree fell from {avg0} to {avg1}")
    exps = []
    if kappa is not None:
        exps.append(kappa)
        if d is not None and d >= kappa:
            exps.append(d)
    for x in exps:
        if after.m * avg1**x < delta**x * before.m * avg0**x * (1 - tol):
            raise InternalError(f"volume bound fails at exponent {x}")
    return True


# -- richness and goodness -----------------------------------------------------


def is_rich(view: BipartiteHostView, S, T, eps: float) -> bool:
    """|N_G(S) minus N+_Gamma(T)| >= eps m q^|S|, with N_G(S) taken inside U."""
    S = set(S)
    if not S:
        raise InputError("richness needs a nonempty S")
    avoid = 0
    for x in T:
        avoid |= view.Gamma.mask(x) | (1 << x)
    unique = view.common_in_U(S) & ~avoid
    return unique.bit_count() >= eps * view.m * view.q ** len(S)


def goodness_estimate(view, u, beta, eps, k, samples=64, seed=0, budget=4096):
    """Classify u as good, bad or uncertain for k-tuples of its neighbors.

    Exhaustive over all deg(u)^k tuples (repetition allowed) when that is at
    most ``budget``; otherwise a Monte-Carlo estimate whose Hoeffding band at
    confidence 1 - 10^-3 decides, with ``uncertain`` when beta lies inside it.
    """
    nbrs = list(iter_bits(view.nbr_mask(u)))
    if not nbrs:
        raise InputError(f"vertex {u} has no neighbors in the view")
    total = len(nbrs) ** k
    T = (u,)
    if total <= budget:
        bad = sum(1 for S in product(nbrs, repeat=k) if not is_rich(view, S, T, eps))
        return "good" if bad <= beta * total else "bad"
    rng = np.random.Generator(np.random.Philox(int(seed)))
    picks = rng.integers(len(nbrs), size=(samples, k))
    bad = sum(1 for row in picks if not is_rich(view, [nbrs[i] for i in row], T, eps))
    frac = bad / samples
    h = math.sqrt(math.log(2 / HOEFFDING_LEVEL) / (2 * samples))
    if frac + h <= beta:
        return "good"
    if frac - h > beta:
        return "bad"
    return "uncertain"


# -- basic samplers ------------------------------------------------------------


def _rng(seed, path=()):
    if isinstance(seed, np.random.Generator):
        return seed
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def _pool(vertices):
    # ranges are already sorted and indexable; skip the copy
    return vertices if isinstance(vertices, range) else sorted(vertices)


def sample_independent_tuple(Gamma: Graph, sets, seed):
    """One uniform pick from each set; success iff distinct and independent in Gamma."""
    rng = _rng(seed)
    pools = [_pool(s) for s in sets]
    if any(not p for p in pools):
        raise InputError("every set must be nonempty")
    picks = tuple(p[int(rng.integers(len(p)))] for p in pools)
    if len(set(picks)) != len(picks):
        return Reject("collision")
    for x, y in combinations(picks, 2):
        if Gamma.has_edge(x, y):
            return Reject("adjacent")
    return picks


def sample_nonneighbor_survivors(Gamma: Graph, V, W, r: int, seed):
    """Uniform r-tuple R from V and the part of W outside N+_Gamma(R)."""
    rng = _rng(seed)
    pool = _pool(V)
    R = tuple(pool[int(i)] for i in rng.integers(len(pool), size=r)) if r else ()
    removed = set(R)
    for x in R:
        removed.update(iter_bits(Gamma.mask(x)))
    return R, frozenset(W).difference(removed)


# -- single-apex sampler -------------------------------------------------------


def sample_apex_copy(Gamma: Graph, view: BipartiteHostView, H: BipartitePattern, u: int, cfg: DrcConfig, rng=None):
    """One attempt at a copy of H (ell = 1) with its complete vertex at u.

    Returns a validated Embedding or a Reject naming the first failed check.
    """
    if H.ell != 1:
        raise InputError("sample_apex_copy needs a pattern with one complete vertex")
    if not (view.U_mask >> u) & 1:
        raise InputError(f"apex {u} is not in U")
    cfg = cfg.resolved(H) if cfg.eps is None or cfg.delta is None or cfg.beta is None else cfg
    rng = _rng(cfg.seed if rng is None else rng)
    nbrs = list(iter_bits(view.nbr_mask(u)))
    if not nbrs:
        return Reject("no-neighbors")
    b, c = H.b, cfg.c
    X = [nbrs[int(i)] for i in rng.integers(len(nbrs), size=b)]
    if len(set(X)) != b or any(Gamma.has_edge(x, y) for x, y in combinations(X, 2)):
        return Reject("X-not-independent")
    for size in range(1, min(H.d, b) + 1):
        for Y in combinations(range(b), size):
            rest = [X[i] for i in range(b) if i not in Y]
            if not is_rich(view, [X[i] for i in Y], [u] + rest, c ** (b - size) * cfg.eps):
                return Reject("tuple-not-rich", {"Y": Y})
    picks = []
    for nb in H.a1:
        avoid = Gamma.mask(u) | (1 << u)
        for i in range(b):
            if i not in nb:
                avoid |= Gamma.mask(X[i]) | (1 << X[i])
        pool_mask = view.common_in_U([X[i] for i in nb]) & ~avoid
        pool = list(iter_bits(pool_mask))
        if not pool:
            return Reject("tuple-not-rich", {"empty": nb})
        picks.append(pool[int(rng.integers(len(pool)))])
    if len(set(picks)) != len(picks) or u in picks:
        return Reject("A1-pick-collision")
    if any(Gamma.has_edge(x, y) for x, y in combinations(picks, 2)):
        return Reject("A1-pick-adjacent")
    assignment = {0: u}
    assignment.update({H.ell + k: w for k, w in enumerate(picks)})
    assignment.update({H.ell + H.a + i: x for i, x in enumerate(X)})
    phi = Embedding(assignment, source=H.name)
    if not is_copy_induced_in(view.G, Gamma, H.graph, phi):
        raise InternalError(f"apex sampler produced an invalid copy {assignment}")
    return phi


# -- recursion -----------------------------------------------------------------


@dataclass
class EmbedStats:
    reductions: int = 0
    apexes_tried: int = 0
    attempts: int = 0
    rejects: Counter = field(default_factory=Counter)
    guards: list = field(default_factory=list)

    def as_dict(self):
        return {
            "reductions": self.reductions,
            "apexes_tried": self.apexes_tried,
            "attempts": self.attempts,
            "rejects": dict(self.rejects),
            "guards": self.guards,
        }


def _apex_is_good(view, u, H, cfg, path):
    for k in range(1, H.d + 1):
        verdict = goodness_estimate(
            view, u, cfg.beta, cfg.eps, k, cfg.goodness_samples, seed=_seed_int(cfg.seed, path + (k,)),
            budget=cfg.goodness_budget,
        )
        if verdict == "bad":
            return False
    return True


def _seed_int(seed, path):
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def embed_recursive(Gamma: Graph, view: BipartiteHostView, H: BipartitePattern, cfg: DrcConfig, stats=None, _path=()):
    """Copy of H in G induced in Gamma, peeling one complete vertex per level.

    Each level reduces the view, picks an apex u uniformly from the reduced
    side (skipping apexes whose goodness estimate is ``bad``) and either runs
    the single-apex sampler (ell = 1) or recurses on the view between
    N_G(u) and the reduced side minus u and its Gamma-neighbors.
    """
    cfg = cfg.resolved(H)
    if stats is None:
        stats = EmbedStats()
    level = H.ell
    guards = evaluate_guards(view, H, cfg, level)
    stats.guards.append(guards)
    if cfg.mode == "strict" and not (guards["q_ok"] and guards["r_ok"]):
        if not _path:
            failed = "q >= C_l m^(-1/d) t^(1/d)" if not guards["q_ok"] else "r >= C'_l t (m/t)^(l/d)"
            raise PreconditionError(f"level-{level} guard failed: {failed} ({guards})")
        stats.rejects["guard-failed"] += 1
        return Reject("guard-failed", guards)
    if view.edges == 0 or view.m == 0:
        stats.rejects["empty-view"] += 1
        return Reject("empty-view")
    reduced = delta_reduce(view, cfg.delta, _kappa(H), H.d)
    stats.reductions += 1
    for i in range(cfg.apex_budget):
        path = _path + (level, i)
        rng = _rng(cfg.seed, path)
        u = reduced.U[int(rng.integers(reduced.m))]
        stats.apexes_tried += 1
        if reduced.deg[u] == 0:
            stats.rejects["no-neighbors"] += 1
            continue
        if cfg.check_goodness and not _apex_is_good(reduced, u, H, cfg, path + (0,)):
            stats.rejects["apex-not-good"] += 1
            continue
        if level == 1:
            for j in range(cfg.attempt_budget):
                stats.attempts += 1
                res = sample_apex_copy(Gamma, reduced, H, u, cfg, _rng(cfg.seed, path + (j + 1,)))
                if isinstance(res, Embedding):
                    return res
                stats.rejects[res.reason] += 1
            continue
        avoid = Gamma.mask(u) | (1 << u)
        inner = BipartiteHostView(Gamma, view.G, reduced.U_mask & ~avoid, reduced.nbr_mask(u))
        inner_H = H.without_apex()
        res = embed_recursive(Gamma, inner, inner_H, cfg, stats, path)
        if isinstance(res, Embedding):
            assignment = {0: u}
            assignment.update({v + 1: x for v, x in res.assignment.items()})
            phi = Embedding(assignment, source=H.name)
            if not is_copy_induced_in(view.G, Gamma, H.graph, phi):
                raise InternalError(f"recursion produced an invalid copy {assignment}")
            return phi
    if not _path:
        stats.rejects["budget-exhausted"] += 1
    return Reject("budget-exhausted")


def embed(Gamma: Graph, G: Graph, H: BipartitePattern, cfg: DrcConfig, view_seed: int | None = None):
    """Split G into a balanced random bipartite view and run the recursion."""
    view = split_view(Gamma, G, cfg.seed if view_seed is None else view_seed)
    stats = EmbedStats()
    return embed_recursive(Gamma, view, H, cfg, stats), stats
