"""Sampling induced, c-unique copies of trees by a hierarchy of rejection samplers.

Every subtree on the peeling chain of T gets a distribution over its copies:
single vertices are drawn proportionally to degree, edges are uniform G-edges
kept when both ends keep a c-fraction of their neighborhoods, and a larger
subtree with peeling pair {u, w} samples its core R = T' - {u, w}, checks that
both one-leaf extensions carry enough mass, extends u and w independently and
keeps the result when it is again c-unique and induced.

Embeddings of a subtree are tuples aligned with the subtree's sorted vertex
list (its key).
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import InputError, PreconditionError, ResourceError
from .graph import Embedding, Graph, iter_bits, is_copy_induced_in, to_mask

STEP_I = "step-I-extension-gap"
COLLISION = "x-collision"
NOT_UNIQUE = "not-c-unique"
GAMMA_ADJ = "gamma-adjacent"
REJECT_ORDER = (STEP_I, COLLISION, NOT_UNIQUE, GAMMA_ADJ)


# -- trees and peelings --------------------------------------------------------


class LabeledTree:
    def __init__(self, k: int, edges):
        if k < 1:
            raise InputError("a tree needs at least one vertex")
        self.graph = Graph(k, edges)
        if self.graph.edge_count != k - 1 or not self._connected(self.graph.full_mask):
            raise InputError("edges do not form a tree")
        self.k = k
        self._subtrees = None

    @classmethod
    def from_graph(cls, G: Graph) -> "LabeledTree":
        return cls(G.n, list(G.edges()))

    def _connected(self, mask: int) -> bool:
        if mask == 0:
            return False
        start = (mask & -mask).bit_length() - 1
        seen = 1 << start
        frontier = seen
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= self.graph.mask(v) & mask
            frontier = nxt & ~seen
            seen |= frontier
        return seen == mask

    def is_subtree(self, vertices) -> bool:
        return self._connected(to_mask(vertices))

    def subtree_masks(self) -> list[int]:
        """Bitmasks of all connected vertex subsets, grown from their lowest vertex."""
        if self._subtrees is None:
            adj = self.graph.masks
            out = []

            def extend(P, X, NP, above):
                out.append(P)
                while X:
                    low = X & -X
                    X ^= low
                    v = low.bit_length() - 1
                    extend(P | low, X | (adj[v] & above & ~NP), NP | adj[v], above)

            for r in range(self.k):
                above = ~((1 << (r + 1)) - 1)
                extend(1 << r, adj[r] & above, adj[r] | (1 << r), above)
            self._subtrees = sorted(out, key=lambda m: (m.bit_count(), m))
        return self._subtrees

    def subtrees(self) -> list[tuple]:
        return [tuple(iter_bits(m)) for m in self.subtree_masks()]

    def leaves(self, key) -> list[int]:
        if len(key) == 1:
            return list(key)
        m = to_mask(key)
        return [v for v in key if (self.graph.mask(v) & m).bit_count() == 1]

    def neighbor_in(self, v: int, key) -> int:
        """The unique neighbor of leaf v inside subtree ``key``."""
        nb = list(iter_bits(self.graph.mask(v) & to_mask(key)))
        if len(nb) != 1:
            raise InputError(f"{v} is not a leaf of {key}")
        return nb[0]

    def subgraph(self, key) -> Graph:
        return self.graph.induced(key)[0]


def all_trees(k: int):
    """Every labelled tree on k vertices, from Pruefer sequences."""
    from itertools import product

    if k == 1:
        yield LabeledTree(1, [])
        return
    if k == 2:
        yield LabeledTree(2, [(0, 1)])
        return
    for seq in product(range(k), repeat=k - 2):
        degree = [1] * k
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(v for v in range(k) if degree[v] == 1)
            edges.append((min(leaf, x), max(leaf, x)))
            degree[leaf] -= 1
            degree[x] -= 1
        u, w = [v for v in range(k) if degree[v] == 1]
        edges.append((u, w))
        yield LabeledTree(k, edges)


PeelingMap = dict


def removal_order(T: LabeledTree) -> list[int]:
    """Vertices in the order the peeling removes them: lowest-id leaf first."""
    alive = T.graph.full_mask
    order = []
    while alive:
        if alive.bit_count() == 1:
            order.append(alive.bit_length() - 1)
            break
        v = next(x for x in iter_bits(alive) if (T.graph.mask(x) & alive).bit_count() == 1)
        order.append(v)
        alive &= ~(1 << v)
    return order


def build_peeling(T: LabeledTree) -> PeelingMap:
    """Peeling map over all subtrees, removing the lowest-id leaf at each level.

    A subtree is handled at the level of its earliest-removed vertex v, which is
    a leaf of it; its pair is v plus a vertex of the smaller subtree's pair not
    adjacent to v (lowest id on ties).
    """
    pos = {v: i for i, v in enumerate(removal_order(T))}
    adj = T.graph.masks
    nu_mask = {}
    for mask in T.subtree_masks():
        size = mask.bit_count()
        if size <= 2:
            nu_mask[mask] = mask
            continue
        v = min(iter_bits(mask), key=pos.__getitem__)
        inner = nu_mask[mask & ~(1 << v)] & ~adj[v]
        w = (inner & -inner).bit_length() - 1
        nu_mask[mask] = (1 << v) | (1 << w)
    return {tuple(iter_bits(m)): frozenset(iter_bits(val)) for m, val in nu_mask.items()}


def check_peeling(T: LabeledTree, nu: PeelingMap) -> bool:
    """Definition check over every subtree."""
    for key in T.subtrees():
        val = nu.get(key)
        if val is None:
            return False
        if len(key) == 1:
            if val != frozenset(key):
                return False
            continue
        if len(val) != 2:
            return False
        u, w = sorted(val)
        leaves = T.leaves(key)
        if u not in leaves or w not in leaves:
            return False
        minus_w = tuple(x for x in key if x != w)
        minus_u = tuple(x for x in key if x != u)
        if u not in nu[minus_w] or w not in nu[minus_u]:
            return False
    return True


def peeling_chain(T: LabeledTree, nu: PeelingMap) -> list[tuple]:
    """Subtrees needing a sampler, smallest first."""
    need = set()
    stack = [tuple(range(T.k))]
    while stack:
        key = stack.pop()
        if key in need:
            continue
        need.add(key)
        if len(key) >= 2:
            for v in nu[key]:
                stack.append(tuple(x for x in key if x != v))
            if len(key) >= 3:
                stack.append(tuple(x for x in key if x not in nu[key]))
    return sorted(need, key=lambda k: (len(k), k))


# -- constants -----------------------------------------------------------------


@dataclass
class ConstantSchedule:
    k: int
    c: float
    C: float = 1.0
    t: int = 1
    K: dict = field(default_factory=dict)
    eps: dict = field(default_factory=dict)
    kappa: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.c < 1:
            raise InputError("c must lie in (0, 1)")
        if self.k >= 2:
            self.K[2], self.eps[2] = 2.0, 1 / 3
            for i in range(3, self.k + 1):
                self.eps[i] = self.c / (2 * self.K[i - 1])
                self.K[i] = 2 * self.K[i - 1] / (self.eps[i - 1] ** 2 * self.c)
            self.kappa[self.k] = 0.5
            for i in range(self.k - 1, 1, -1):
                self.kappa[i] = self.kappa[i + 1] / (2 * self.K[i])

    @property
    def floor(self) -> int:
        return max(1, math.ceil(self.C * self.t))

    @property
    def L(self) -> float:
        ell = self.k
        if ell < 3:
            return float("nan")
        return self.K[ell - 1] / self.eps[ell - 1]

    def large_C_ok(self) -> bool:
        return self.C > self.c ** (-self.k)


def degeneracy_peel(G: Graph, floor: int) -> Graph:
    """Repeatedly delete vertices of degree below ``floor`` (ids are kept)."""
    masks = list(G.masks)
    alive = G.full_mask
    changed = True
    while changed:
        changed = False
        for v in iter_bits(alive):
            if (masks[v] & alive).bit_count() < floor:
                alive &= ~(1 << v)
                changed = True
    return Graph.from_masks([(m & alive) if (alive >> v) & 1 else 0 for v, m in enumerate(masks)], check=False)


# -- predicates ----------------------------------------------------------------


def is_c_unique(Gamma: Graph, G: Graph, phi, c: float) -> bool:
    """Each image vertex keeps c^(|S|-1) of its G-neighborhood outside the others' Gamma-neighborhoods."""
    S = list(phi.image()) if isinstance(phi, Embedding) else list(phi)
    power = c ** (len(S) - 1)
    for v in S:
        avoid = 0
        for x in S:
            if x != v:
                avoid |= Gamma.mask(x)
        nb = G.mask(v)
        if (nb & ~avoid).bit_count() < power * nb.bit_count():
            return False
    return True


def _check_distribution(pi2, n):
    if isinstance(pi2, dict):
        vec = np.zeros(n)
        for k, v in pi2.items():
            vec[k] = v
    else:
        vec = np.asarray(pi2, dtype=float)
    if vec.shape != (n,) or (vec < 0).any() or abs(vec.sum() - 1) > 1e-9:
        raise InputError("pi2 must be a probability vector over the vertices")
    return vec


def good_set(Gamma: Graph, pi2, c: float) -> frozenset:
    """Vertices x whose non-neighbors (x included) carry pi2-mass at least c."""
    vec = _check_distribution(pi2, Gamma.n)
    total = vec.sum()
    out = []
    for x in range(Gamma.n):
        nbr_mass = sum(vec[y] for y in iter_bits(Gamma.mask(x)))
        if total - nbr_mass >= c - 1e-12:
            out.append(x)
    return frozenset(out)


def good_set_family(Gamma: Graph, pi2, S_family: dict, c: float, gamma: float) -> frozenset:
    """Vertices x for which the y with |S_y minus N(x)| < c|S_y| carry pi2-mass below sqrt(gamma)."""
    vec = _check_distribution(pi2, Gamma.n)
    masks = {y: to_mask(S) for y, S in S_family.items()}
    out = []
    for x in range(Gamma.n):
        nx = Gamma.mask(x)
        bad = 0.0
        for y, sm in masks.items():
            if vec[y] > 0 and (sm & ~nx).bit_count() < c * sm.bit_count():
                bad += vec[y]
        if bad < math.sqrt(gamma):
            out.append(x)
    return frozenset(out)


# -- the sampling hierarchy ----------------------------------------------------


@dataclass(frozen=True)
class TreeReject:
    reason: str

    def __bool__(self):
        return False


def _insert(key, phi, v, x):
    pos = 0
    while pos < len(key) and key[pos] < v:
        pos += 1
    return key[:pos] + (v,) + key[pos:], phi[:pos] + (x,) + phi[pos:]


def _drop(key, phi, drop):
    pairs = [(k, x) for k, x in zip(key, phi) if k not in drop]
    return tuple(k for k, _ in pairs), tuple(x for _, x in pairs)


class LambdaSampler:
    """Sampler for one subtree of the chain; thin view on the hierarchy."""

    def __init__(self, hierarchy, key):
        self.h = hierarchy
        self.key = key

    @property
    def p_succ(self) -> float:
        return self.h.p[self.key]

    def draw(self, rng):
        return self.h.draw(self.key, rng)

    def sample(self, rng, budget=10_000):
        return self.h.sample(self.key, rng, budget)

    def weight(self, phi) -> float:
        return self.h.weight(self.key, tuple(phi))


class TreeSamplerHierarchy:
    """The samplers for every subtree on the peeling chain of T.

    ``p`` holds each sampler's success probability: exact for single vertices
    and edges, a Monte-Carlo calibration for larger subtrees unless supplied
    through ``p_override``.
    """

    def __init__(self, Gamma: Graph, G: Graph, T: LabeledTree, schedule: ConstantSchedule, seed=0,
                 mode="diagnostic", calibration=2000, p_override=None, peel=True):
        if G.n != Gamma.n or not G.is_subgraph_of(Gamma):
            raise InputError("G must be a subgraph of Gamma on the same vertex set")
        if schedule.k != T.k:
            raise InputError("schedule size does not match the tree")
        if mode not in ("diagnostic", "strict"):
            raise InputError(f"mode must be diagnostic or strict, got {mode!r}")
        self.Gamma = Gamma
        self.T = T
        self.c = schedule.c
        self.schedule = schedule
        self.mode = mode
        self.warnings = []
        if not schedule.large_C_ok():
            msg = f"C = {schedule.C} does not exceed c^-|T| = {schedule.c ** -T.k:.4g}"
            if mode == "strict":
                raise PreconditionError(msg)
            self.warnings.append(msg)
            warnings.warn(msg, stacklevel=2)
        self.G = degeneracy_peel(G, schedule.floor) if peel else G
        if self.G.edge_count == 0:
            raise InputError("graph too sparse for schedule")
        self.deg = np.array(self.G.degrees(), dtype=float)
        self.two_e = 2 * self.G.edge_count
        self.cum = np.cumsum(self.deg)
        self.nu = build_peeling(T)
        self.chain = peeling_chain(T, self.nu)
        self._w = {}
        self._ext = {}
        self.p = {}
        self.calibration = {}
        base = np.random.SeedSequence(int(seed))
        for i, key in enumerate(self.chain):
            if p_override and key in p_override:
                self.p[key] = p_override[key]
            elif len(key) == 1:
                self.p[key] = 1.0
            elif len(key) == 2:
                self.p[key] = self._edge_p(key)
            else:
                rng = np.random.Generator(np.random.Philox(base.spawn(1)[0]))
                counts = Counter()
                for _ in range(calibration):
                    res = self.draw(key, rng, calibrating=True)
                    counts["ok" if isinstance(res, Embedding) else res.reason] += 1
                self.p[key] = counts["ok"] / calibration
                self.calibration[key] = dict(counts)
        self.samplers = {key: LambdaSampler(self, key) for key in self.chain}

    # -- helpers

    def _pick_vertex(self, rng) -> int:
        return int(np.searchsorted(self.cum, rng.random() * self.two_e, side="right"))

    def _pair_ok(self, x, y) -> bool:
        c = self.c
        G, Gam = self.G, self.Gamma
        nx, ny = G.mask(x), G.mask(y)
        return (nx & ~Gam.mask(y)).bit_count() >= c * nx.bit_count() and (
            ny & ~Gam.mask(x)
        ).bit_count() >= c * ny.bit_count()

    def _edge_p(self, key) -> float:
        good = 0
        for x, y in self.G.edges():
            if self._pair_ok(x, y):
                good += 2
        return good / self.two_e

    def _cache(self):
        if len(self._w) > 2_000_000:
            self._w.clear()
            self._ext.clear()

    def _validate(self, key, phi):
        H = self.T.subgraph(key)
        emb = Embedding(dict(enumerate(phi)), source=f"tree{key}")
        if not is_copy_induced_in(self.G, self.Gamma, H, emb) or not is_c_unique(self.Gamma, self.G, phi, self.c):
            raise AssertionError(f"sampler produced an invalid copy {phi} of {key}")
        return Embedding({v: x for v, x in zip(key, phi)}, source=f"tree{key}", flags={"c_unique": True, "induced": True})

    # -- weights

    def weight(self, key, phi) -> float:
        """lambda_key(phi), using the stored success probabilities."""
        memo = (key, phi)
        if memo in self._w:
            return self._w[memo]
        self._cache()
        val = self._weight(key, phi)
        self._w[memo] = val
        return val

    def _weight(self, key, phi):
        p = self.p.get(key, 0.0)
        if len(key) == 1:
            return self.deg[phi[0]] / self.two_e
        if p <= 0:
            return 0.0
        if len(key) == 2:
            x, y = phi
            if not self.G.has_edge(x, y) or not self._pair_ok(x, y):
                return 0.0
            return 1 / (self.two_e * p)
        u, w = sorted(self.nu[key])
        R, rho = _drop(key, phi, {u, w})
        lr = self.weight(R, rho)
        if lr == 0:
            return 0.0
        Ru = tuple(k for k in key if k != w)
        Rw = tuple(k for k in key if k != u)
        xs_u, ws_u, mu = self.extensions(Ru, R, rho, u)
        xs_w, ws_w, mw = self.extensions(Rw, R, rho, w)
        eps = self.schedule.eps[len(key) - 1]
        if mu < eps * lr or mw < eps * lr:
            return 0.0
        x_u, x_w = phi[key.index(u)], phi[key.index(w)]
        pu = ws_u[xs_u.index(x_u)] / mu if x_u in xs_u else 0.0
        pw = ws_w[xs_w.index(x_w)] / mw if x_w in xs_w else 0.0
        if pu == 0 or pw == 0 or not self._accept(phi, x_u, x_w):
            return 0.0
        return lr * pu * pw / p

    def extensions(self, ext_key, R, rho, v):
        """Candidate images of leaf v extending rho, their lambda weights and the total."""
        memo = (ext_key, rho)
        if memo in self._ext:
            return self._ext[memo]
        h = self.T.neighbor_in(v, ext_key)
        anchor = rho[R.index(h)]
        xs, ws = [], []
        for x in iter_bits(self.G.mask(anchor)):
            if x in rho:
                continue
            _, phi = _insert(R, rho, v, x)
            wgt = self.weight(ext_key, phi)
            if wgt > 0:
                xs.append(x)
                ws.append(wgt)
        out = (xs, ws, float(sum(ws)))
        self._ext[memo] = out
        return out

    def marginal(self, ext_key, rho, v) -> float:
        R = tuple(k for k in ext_key if k != v)
        return self.extensions(ext_key, R, rho, v)[2]

    def _accept(self, phi, x_u, x_w):
        return x_u != x_w and is_c_unique(self.Gamma, self.G, phi, self.c) and not self.Gamma.has_edge(x_u, x_w)

    # -- sampling

    def draw(self, key, rng, calibrating=False):
        """One run of the process for ``key``: an Embedding or a TreeReject."""
        if len(key) == 1:
            x = self._pick_vertex(rng)
            return Embedding({key[0]: x}, source=f"tree{key}", flags={"c_unique": True, "induced": True})
        if len(key) == 2:
            x = self._pick_vertex(rng)
            nbrs = list(iter_bits(self.G.mask(x)))
            y = nbrs[int(rng.integers(len(nbrs)))]
            if not self._pair_ok(x, y):
                return TreeReject(NOT_UNIQUE)
            return self._validate(key, (x, y))
        u, w = sorted(self.nu[key])
        R = tuple(k for k in key if k not in (u, w))
        res = self.sample(R, rng)
        if not isinstance(res, Embedding):
            return res
        rho = tuple(res.assignment[k] for k in R)
        lr = self.weight(R, rho)
        Ru = tuple(k for k in key if k != w)
        Rw = tuple(k for k in key if k != u)
        xs_u, ws_u, mu = self.extensions(Ru, R, rho, u)
        xs_w, ws_w, mw = self.extensions(Rw, R, rho, w)
        eps = self.schedule.eps[len(key) - 1]
        if mu <= 0 or mw <= 0 or mu < eps * lr or mw < eps * lr:
            return TreeReject(STEP_I)
        x_u = xs_u[int(rng.choice(len(xs_u), p=np.asarray(ws_u) / mu))]
        x_w = xs_w[int(rng.choice(len(xs_w), p=np.asarray(ws_w) / mw))]
        if x_u == x_w:
            return TreeReject(COLLISION)
        k2, phi = _insert(R, rho, u, x_u)
        _, phi = _insert(k2, phi, w, x_w)
        if not is_c_unique(self.Gamma, self.G, phi, self.c):
            return TreeReject(NOT_UNIQUE)
        if self.Gamma.has_edge(x_u, x_w):
            return TreeReject(GAMMA_ADJ)
        return self._validate(key, phi)

    def sample(self, key, rng, budget=10_000):
        """Repeat the process until it outputs (a draw from lambda_key)."""
        last = None
        for _ in range(budget):
            res = self.draw(key, rng)
            if isinstance(res, Embedding):
                return res
            last = res
        return last if last is not None else TreeReject(STEP_I)

    def top(self) -> LambdaSampler:
        return self.samplers[tuple(range(self.T.k))]


def build_hierarchy(Gamma, G, T, c, schedule=None, seed=0, mode="diagnostic", **kw) -> TreeSamplerHierarchy:
    if schedule is None:
        schedule = ConstantSchedule(T.k, c)
    if abs(schedule.c - c) > 1e-15:
        raise InputError("schedule c differs from c")
    return TreeSamplerHierarchy(Gamma, G, T, schedule, seed=seed, mode=mode, **kw)


# -- exact tables ----------------------------------------------------------------


@dataclass
class ExactTable:
    key: tuple
    outcomes: dict  # embedding tuple -> unconditional probability of outputting it
    rejects: dict

    @property
    def p_succ(self) -> float:
        return sum(self.outcomes.values())

    def total(self) -> float:
        return self.p_succ + sum(self.rejects.values())

    def conditional(self) -> dict:
        p = self.p_succ
        return {phi: pr / p for phi, pr in self.outcomes.items()} if p > 0 else {}


def _unique(Gamma, G, S, c):
    # stand-alone c-uniqueness test for the exact expansion
    S = list(S)
    need = c ** (len(S) - 1)
    for v in S:
        others = [x for x in S if x != v]
        nb = [y for y in range(G.n) if G.has_edge(v, y)]
        kept = [y for y in nb if not any(Gamma.has_edge(x, y) for x in others)]
        if len(kept) < need * len(nb):
            return False
    return True


def lambda_exact(Gamma: Graph, G: Graph, T: LabeledTree, c: float, schedule=None, budget=2_000_000, peel=True):
    """Exact output and reject probabilities of every sampler on the chain.

    Expands the process choice by choice; only for tiny hosts.
    """
    if schedule is None:
        schedule = ConstantSchedule(T.k, c)
    Gp = degeneracy_peel(G, schedule.floor) if peel else G
    n = Gp.n
    deg = [sum(1 for y in range(n) if Gp.has_edge(x, y)) for x in range(n)]
    two_e = sum(deg)
    if two_e == 0:
        raise InputError("graph too sparse for schedule")
    nu = build_peeling(T)
    chain = peeling_chain(T, nu)
    tables = {}
    work = [0]

    def tick(k=1):
        work[0] += k
        if work[0] > budget:
            raise ResourceError("exact expansion exceeded its budget")

    for key in chain:
        outcomes, rejects = {}, Counter()
        if len(key) == 1:
            for x in range(n):
                if deg[x]:
                    outcomes[(x,)] = deg[x] / two_e
            tick(n)
        elif len(key) == 2:
            for x in range(n):
                if not deg[x]:
                    continue
                for y in range(n):
                    if Gp.has_edge(x, y):
                        tick()
                        pr = deg[x] / two_e / deg[x]
                        if _unique(Gamma, Gp, (x, y), c):
                            outcomes[(x, y)] = outcomes.get((x, y), 0.0) + pr
                        else:
                            rejects[NOT_UNIQUE] += pr
        else:
            u, w = sorted(nu[key])
            R = tuple(k for k in key if k not in (u, w))
            Ru = tuple(k for k in key if k != w)
            Rw = tuple(k for k in key if k != u)
            lam_R = tables[R].conditional()
            lam_Ru = tables[Ru].conditional()
            lam_Rw = tables[Rw].conditional()
            eps = schedule.eps[len(key) - 1]

            def ext(lam, ext_key, v, rho):
                idx = ext_key.index(v)
                rest = [i for i in range(len(ext_key)) if i != idx]
                got = {}
                for phi, pr in lam.items():
                    if tuple(phi[i] for i in rest) == rho:
                        got[phi[idx]] = got.get(phi[idx], 0.0) + pr
                return got

            for rho, pr_rho in lam_R.items():
                tick()
                eu = ext(lam_Ru, Ru, u, rho)
                ew = ext(lam_Rw, Rw, w, rho)
                mu, mw = sum(eu.values()), sum(ew.values())
                if mu <= 0 or mw <= 0 or mu < eps * pr_rho or mw < eps * pr_rho:
                    rejects[STEP_I] += pr_rho
                    continue
                for xu, pu in eu.items():
                    for xw, pw in ew.items():
                        tick()
                        pr = pr_rho * (pu / mu) * (pw / mw)
                        if xu == xw:
                            rejects[COLLISION] += pr
                            continue
                        phi = dict(zip(R, rho))
                        phi[u], phi[w] = xu, xw
                        img = tuple(phi[k] for k in key)
                        if not _unique(Gamma, Gp, img, c):
                            rejects[NOT_UNIQUE] += pr
                        elif Gamma.has_edge(xu, xw):
                            rejects[GAMMA_ADJ] += pr
                        else:
                            outcomes[img] = outcomes.get(img, 0.0) + pr
        tables[key] = ExactTable(key, outcomes, dict(rejects))
    return tables


def edge_table_reversed(Gamma: Graph, G: Graph, c: float, key=(0, 1)) -> dict:
    """Edge sampler output run in the other order (x_w first), conditioned on success."""
    n = G.n
    deg = [G.degree(x) for x in range(n)]
    two_e = sum(deg)
    out = {}
    for y in range(n):
        for x in iter_bits(G.mask(y)):
            if _unique(Gamma, G, (x, y), c):
                out[(x, y)] = out.get((x, y), 0.0) + 1 / two_e
    total = sum(out.values())
    return {k: v / total for k, v in out.items()} if total else {}


# -- extension diagnostics -------------------------------------------------------


def check_extension(G: Graph, T: LabeledTree, table_T: ExactTable, table_Tv: ExactTable, v: int, K=None, eps=None, kappa=None):
    """Measured constants for lambda_T extending lambda_{T - v} on exact tables.

    Returns the smallest K for the pointwise upper bound, the largest eps at
    the nominal kappa, the smallest kappa at the nominal eps, and whether the
    nominal triple holds.
    """
    key = table_T.key
    sub = table_Tv.key
    if tuple(k for k in key if k != v) != sub:
        raise InputError("second table must be the first subtree minus v")
    lam_T = table_T.conditional()
    lam_Tv = table_Tv.conditional()
    h = T.neighbor_in(v, key)
    vi, hi = key.index(v), key.index(h)
    rest = [i for i in range(len(key)) if i != vi]
    K_meas = 0.0
    marg = Counter()
    for phi, pr in lam_T.items():
        phi_v = tuple(phi[i] for i in rest)
        base = lam_Tv.get(phi_v, 0.0)
        if base <= 0:
            K_meas = math.inf
            continue
        K_meas = max(K_meas, pr * G.degree(phi[hi]) / base)
        marg[phi_v] += pr
    ratios = sorted((marg.get(phi_v, 0.0) / pr, pr) for phi_v, pr in lam_Tv.items() if pr > 0)
    corollary = all(marg.get(p, 0.0) <= K_meas * q * (1 + 1e-9) for p, q in lam_Tv.items())

    def eps_at(kap):
        # largest e with P[ratio >= e] >= 1 - kap
        mass_below = 0.0
        for r, pr in ratios:
            if mass_below + pr > kap + 1e-15:
                return r
            mass_below += pr
        return ratios[-1][0] if ratios else 0.0

    def kappa_at(e):
        return sum(pr for r, pr in ratios if r < e - 1e-15)

    report = {"K_measured": K_meas, "corollary_holds": corollary}
    if kappa is not None:
        report["eps_measured"] = eps_at(kappa)
    if eps is not None:
        report["kappa_measured"] = kappa_at(eps)
    if K is not None and eps is not None and kappa is not None:
        report["nominal_holds"] = K_meas <= K * (1 + 1e-12) and report["kappa_measured"] <= kappa + 1e-12
    report["nominal"] = {"K": K, "eps": eps, "kappa": kappa}
    return report
