"""Pure-Python kernels over integer bitmasks.

Same contract as the compiled ``_ckernels`` module; selected automatically when
the extension is unavailable or ``INDTURAN_BACKEND=python`` is set.
"""

from itertools import combinations

NAME = "python"


def pair_count(G, a_vertices, b_mask):
    masks = G.masks
    return sum((masks[a] & b_mask).bit_count() for a in a_vertices)


def counts_into(G, mask):
    return [(m & mask).bit_count() for m in G.masks]


def _top_sum(counts, t):
    return sum(sorted(counts, reverse=True)[:t])


def best_t_pair(G, t, threshold=None):
    """Maximise e(A, B) over |A| = |B| = t.

    For fixed A the best B takes the t vertices with most neighbors in A, so
    only A is enumerated.  Stops at the first A whose value exceeds
    ``threshold``.  Returns ``(value, A)``.
    """
    masks = G.masks
    n = G.n
    best, best_a = -1, None
    for combo in combinations(range(n), t):
        a_mask = 0
        for v in combo:
            a_mask |= 1 << v
        value = _top_sum([(m & a_mask).bit_count() for m in masks], t)
        if value > best:
            best, best_a = value, combo
            if threshold is not None and value > threshold:
                break
    return best, best_a


def _colour_sort(P, masks):
    """Greedy sequential colouring of candidate set P; returns (order, bounds)."""
    order, bounds = [], []
    U = P
    colour = 0
    while U:
        colour += 1
        Q = U
        while Q:
            low = Q & -Q
            v = low.bit_length() - 1
            U ^= low
            Q ^= low
            Q &= ~masks[v]
            order.append(v)
            bounds.append(colour)
    return order, bounds


def max_clique(G, lower=0, budget=None):
    """Bitset branch and bound with colouring bounds.

    ``G`` should already be relabelled so that low ids come first in the
    preferred branching order.  Returns ``(size, members, nodes, complete)``.
    """
    masks = G.masks
    best = [lower, []]
    nodes = [0]

    class _Stop(Exception):
        pass

    def expand(C, P):
        nodes[0] += 1
        if budget is not None and nodes[0] > budget:
            raise _Stop
        order, bounds = _colour_sort(P, masks)
        for i in range(len(order) - 1, -1, -1):
            if len(C) + bounds[i] <= best[0]:
                return
            v = order[i]
            newP = P & masks[v]
            C.append(v)
            if newP:
                expand(C, newP)
            elif len(C) > best[0]:
                best[0] = len(C)
                best[1] = list(C)
            C.pop()
            P &= ~(1 << v)

    complete = True
    try:
        if G.n:
            expand([], (1 << G.n) - 1)
    except _Stop:
        complete = False
    return best[0], best[1], nodes[0], complete
