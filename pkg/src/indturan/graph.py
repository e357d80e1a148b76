"""Immutable simple graphs with bitset adjacency, neighborhood kernels and edge-list I/O.

Every vertex ``v`` of a :class:`Graph` owns a neighbor bitmask stored as a Python
integer (bit ``u`` set iff ``uv`` is an edge).  Set algebra on neighborhoods is
therefore word-parallel.  A packed ``uint64`` copy of the same rows is built on
demand for the compiled kernels.

Vertex sets are exchanged as ``frozenset`` values at the public surface; the
helpers :func:`to_mask` and :func:`from_mask` convert to and from bitmasks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import kernels
from .errors import InputError

VertexSet = frozenset


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def from_mask(mask: int) -> frozenset:
    return frozenset(iter_bits(mask))


class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Instances are immutable; every derived graph is a new value.
    """

    __slots__ = ("n", "_masks", "edge_count", "_blocks", "meta")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (), meta: dict | None = None):
        if n < 0:
            raise InputError(f"vertex count must be non-negative, got {n}")
        masks = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        self._init(n, masks, meta)

    def _init(self, n, masks, meta):
        self.n = n
        self._masks = tuple(masks)
        self.edge_count = sum(m.bit_count() for m in masks) // 2
        self._blocks = None
        self.meta = dict(meta or {})

    @classmethod
    def from_masks(cls, masks: Iterable[int], meta: dict | None = None, check: bool = True) -> "Graph":
        masks = list(masks)
        n = len(masks)
        if check:
            full = (1 << n) - 1
            for v, m in enumerate(masks):
                if m & ~full:
                    raise InputError(f"neighbor of {v} out of range")
                if (m >> v) & 1:
                    raise InputError(f"self-loop at vertex {v}")
                for u in iter_bits(m):
                    if not (masks[u] >> v) & 1:
                        raise InputError(f"asymmetric adjacency between {v} and {u}")
        g = cls.__new__(cls)
        g._init(n, masks, meta)
        return g

    # -- basic queries -------------------------------------------------

    @property
    def masks(self) -> tuple[int, ...]:
        return self._masks

    @property
    def blocks(self) -> np.ndarray:
        """Adjacency as an ``(n, W)`` array of 64-bit words."""
        if self._blocks is None:
            self._blocks = masks_to_blocks(self._masks, self.n)
        return self._blocks

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def mask(self, v: int) -> int:
        return self._masks[v]

    def neighbors(self, v: int) -> frozenset:
        return from_mask(self._masks[v])

    def degree(self, v: int) -> int:
        return self._masks[v].bit_count()

    def degrees(self) -> list[int]:
        return [m.bit_count() for m in self._masks]

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self._masks[u] >> v) & 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, m in enumerate(self._masks):
            for v in iter_bits(m >> (u + 1)):
                yield u, u + 1 + v

    def check_vertices(self, vertices: Iterable[int]) -> None:
        for v in vertices:
            if not (isinstance(v, (int, np.integer)) and 0 <= v < self.n):
                raise InputError(f"vertex id {v!r} out of range 0..{self.n - 1}")

    # -- derived graphs ------------------------------------------------

    def complement(self) -> "Graph":
        full = self.full_mask
        return Graph.from_masks([(full ^ m) & ~(1 << v) for v, m in enumerate(self._masks)], check=False)

    def restrict(self, vertices: Iterable[int]) -> "Graph":
        """Same vertex ids, keeping only edges with both ends in ``vertices``."""
        keep = to_mask(vertices)
        return Graph.from_masks(
            [(m & keep) if (keep >> v) & 1 else 0 for v, m in enumerate(self._masks)], check=False
        )

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Compact induced subgraph; returns it with the new-to-old id map."""
        order = sorted(set(vertices))
        self.check_vertices(order)
        index = {v: i for i, v in enumerate(order)}
        masks = []
        for v in order:
            masks.append(to_mask(index[u] for u in iter_bits(self._masks[v]) if u in index))
        return Graph.from_masks(masks, check=False), order

    def relabel(self, perm: list[int]) -> "Graph":
        """Graph whose vertex ``i`` is old vertex ``perm[i]``."""
        inv = [0] * self.n
        for i, v in enumerate(perm):
            inv[v] = i
        masks = [to_mask(inv[u] for u in iter_bits(self._masks[v])) for v in perm]
        return Graph.from_masks(masks, check=False)

    def is_subgraph_of(self, other: "Graph") -> bool:
        return self.n == other.n and all(m & ~o == 0 for m, o in zip(self._masks, other._masks))

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self._masks == other._masks

    def __hash__(self):
        return hash((self.n, self._masks))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.edge_count})"


def masks_to_blocks(masks, n: int) -> np.ndarray:
    words = max(1, (n + 63) // 64)
    out = np.zeros((n, words), dtype=np.uint64)
    nbytes = words * 8
    for v, m in enumerate(masks):
        if m:
            out[v] = np.frombuffer(m.to_bytes(nbytes, "little"), dtype="<u8")
    return out


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph.from_masks([full ^ (1 << v) for v in range(n)], check=False)


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


# -- neighborhood and density kernels ------------------------------------


def _as_mask(G: Graph, S) -> int:
    if isinstance(S, int):
        if S >> G.n:
            raise InputError("vertex mask out of range")
        return S
    S = list(S)
    G.check_vertices(S)
    return to_mask(S)


def pair_count(G: Graph, A, B) -> int:
    """Ordered pairs ``(a, b)`` in ``A x B`` with ``ab`` an edge; overlap edges count twice."""
    a_mask = _as_mask(G, A)
    b_mask = _as_mask(G, B)
    return kernels.pair_count(G, list(iter_bits(a_mask)), b_mask)


def pair_density(G: Graph, A, B) -> float:
    a_mask = _as_mask(G, A)
    b_mask = _as_mask(G, B)
    na, nb = a_mask.bit_count(), b_mask.bit_count()
    if na == 0 or nb == 0:
        raise InputError("pair_density needs non-empty A and B")
    return pair_count(G, a_mask, b_mask) / (na * nb)


def common_neighborhood_mask(G: Graph, S) -> int:
    s_mask = _as_mask(G, S)
    if not s_mask:
        raise InputError("common neighborhood of the empty set is undefined")
    out = G.full_mask
    masks = G.masks
    for v in iter_bits(s_mask):
        out &= masks[v]
    return out


def union_neighborhood_mask(G: Graph, S) -> int:
    out = 0
    masks = G.masks
    for v in iter_bits(_as_mask(G, S)):
        out |= masks[v]
    return out


def common_neighborhood(G: Graph, S) -> frozenset:
    return from_mask(common_neighborhood_mask(G, S))


def union_neighborhood(G: Graph, S) -> frozenset:
    return from_mask(union_neighborhood_mask(G, S))


# -- embeddings ----------------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    """Injective assignment of pattern vertices to host vertices."""

    assignment: Mapping[int, int]
    source: str = ""
    flags: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "assignment", dict(self.assignment))
        images = list(self.assignment.values())
        if len(set(images)) != len(images):
            raise InputError(f"embedding is not injective: {self.assignment}")

    def image(self) -> frozenset:
        return frozenset(self.assignment.values())

    def __getitem__(self, v):
        return self.assignment[v]

    def as_tuple(self, order) -> tuple[int, ...]:
        return tuple(self.assignment[v] for v in order)


def is_copy_induced_in(G: Graph, Gamma: Graph, H: Graph, phi) -> bool:
    """True iff ``phi`` maps H-edges to G-edges and H-non-edges to Gamma-non-edges."""
    assignment = phi.assignment if isinstance(phi, Embedding) else dict(phi)
    if set(assignment) != set(range(H.n)):
        raise InputError("embedding must be total on the pattern vertices")
    images = [assignment[v] for v in range(H.n)]
    if len(set(images)) != len(images):
        raise InputError("embedding is not injective")
    G.check_vertices(images)
    if G.n != Gamma.n:
        raise InputError("G and Gamma must share a vertex set")
    for i in range(H.n):
        xi = images[i]
        for j in range(i + 1, H.n):
            xj = images[j]
            if H.has_edge(i, j):
                if not G.has_edge(xi, xj):
                    return False
            elif Gamma.has_edge(xi, xj):
                return False
    return True


# -- edge-list format ----------------------------------------------------


def format_edge_list(G: Graph, header: str | None = None) -> str:
    lines = []
    if header:
        lines.append("# " + header.replace("\n", " "))
    lines.append(f"{G.n} {G.edge_count}")
    lines.extend(f"{u} {v}" for u, v in G.edges())
    return "\n".join(lines) + "\n"


def write_edge_list(G: Graph, path, header: str | None = None) -> None:
    Path(path).write_text(format_edge_list(G, header))


def parse_edge_list(text: str, name: str = "<string>") -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v`` (``u < v``); ``#`` lines are comments."""
    n = m = None
    seen = set()
    edges = []
    header_comment = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header_comment is None and n is None:
                header_comment = line[1:].strip()
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"{name}:{lineno}: expected two integers, got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise InputError(f"{name}:{lineno}: expected two integers, got {raw!r}") from None
        if n is None:
            if a < 0 or b < 0:
                raise InputError(f"{name}:{lineno}: negative header values")
            n, m = a, b
            continue
        if a == b:
            raise InputError(f"{name}:{lineno}: self-loop at {a}")
        if not (0 <= a < b < n):
            raise InputError(f"{name}:{lineno}: edge must satisfy 0 <= u < v < n, got {a} {b}")
        if (a, b) in seen:
            raise InputError(f"{name}:{lineno}: duplicate edge {a} {b}")
        seen.add((a, b))
        edges.append((a, b))
    if n is None:
        raise InputError(f"{name}: missing 'n m' header line")
    if len(edges) != m:
        raise InputError(f"{name}: header declares {m} edges, found {len(edges)}")
    meta = {"header": header_comment} if header_comment else None
    return Graph(n, edges, meta=meta)


def read_edge_list(path) -> Graph:
    path = Path(path)
    return parse_edge_list(path.read_text(), name=str(path))
