# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitset kernels over packed ``uint64`` adjacency rows."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free, calloc

cnp.import_array()

NAME = "cython"


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int popcount_and(const uint64_t* a, const uint64_t* b, Py_ssize_t words) nogil:
    cdef int total = 0
    cdef Py_ssize_t w
    for w in range(words):
        total += __builtin_popcountll(a[w] & b[w])
    return total


def _mask_row(object mask, Py_ssize_t words):
    cdef Py_ssize_t nbytes = words * 8
    return np.frombuffer(int(mask).to_bytes(nbytes, "little"), dtype="<u8").astype(np.uint64)


def pair_count(G, a_vertices, mask):
    cdef uint64_t[:, ::1] rows = G.blocks
    cdef Py_ssize_t words = rows.shape[1]
    cdef uint64_t[::1] b = _mask_row(mask, words)
    cdef long long total = 0
    cdef Py_ssize_t a
    for a in a_vertices:
        total += popcount_and(&rows[a, 0], &b[0], words)
    return total


def counts_into(G, mask):
    cdef uint64_t[:, ::1] rows = G.blocks
    cdef Py_ssize_t n = rows.shape[0], words = rows.shape[1]
    cdef uint64_t[::1] b = _mask_row(mask, words)
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef Py_ssize_t v
    for v in range(n):
        o[v] = popcount_and(&rows[v, 0], &b[0], words)
    return out.tolist()


cdef long long top_sum(int* counts, int* hist, Py_ssize_t n, int t) nogil:
    # counts lie in 0..t, so a histogram gives the top-t sum in O(n + t)
    cdef Py_ssize_t v
    cdef int c, take, left = t
    cdef long long s = 0
    for c in range(t + 1):
        hist[c] = 0
    for v in range(n):
        hist[counts[v]] += 1
    c = t
    while c >= 0 and left > 0:
        take = hist[c] if hist[c] < left else left
        s += <long long>take * c
        left -= take
        c -= 1
    return s


def best_t_pair(G, int t, threshold=None):
    """Maximise e(A, B) over |A| = |B| = t by enumerating A in lexicographic order.

    Neighbor counts into A are updated incrementally from adjacency lists.
    """
    cdef Py_ssize_t n = G.n
    if t <= 0 or t > n:
        return -1, None
    cdef double thr = float(threshold) if threshold is not None else 1e300
    masks = G.masks
    # CSR adjacency
    deg = np.array([m.bit_count() for m in masks], dtype=np.int64)
    offs_np = np.zeros(n + 1, dtype=np.int64)
    offs_np[1:] = np.cumsum(deg)
    adj_np = np.empty(max(1, int(offs_np[n])), dtype=np.int32)
    cdef Py_ssize_t k = 0
    for v in range(n):
        m = masks[v]
        while m:
            low = m & -m
            adj_np[k] = low.bit_length() - 1
            k += 1
            m ^= low
    cdef int64_t[::1] offs = offs_np
    cdef int[::1] adj = adj_np
    cdef int* counts = <int*>calloc(n, sizeof(int))
    cdef int* hist = <int*>malloc((t + 1) * sizeof(int))
    cdef int* idx = <int*>malloc(t * sizeof(int))
    cdef Py_ssize_t i, j, e
    cdef long long value, best = -1
    best_a = None
    try:
        for i in range(t):
            idx[i] = i
            for e in range(offs[i], offs[i + 1]):
                counts[adj[e]] += 1
        while True:
            value = top_sum(counts, hist, n, t)
            if value > best:
                best = value
                best_a = tuple(idx[j] for j in range(t))
                if value > thr:
                    break
            # advance to the next combination
            i = t - 1
            while i >= 0 and idx[i] == n - t + i:
                i -= 1
            if i < 0:
                break
            for j in range(i, t):
                for e in range(offs[idx[j]], offs[idx[j] + 1]):
                    counts[adj[e]] -= 1
            idx[i] += 1
            for j in range(i + 1, t):
                idx[j] = idx[j - 1] + 1
            for j in range(i, t):
                for e in range(offs[idx[j]], offs[idx[j] + 1]):
                    counts[adj[e]] += 1
    finally:
        free(counts)
        free(hist)
        free(idx)
    return best, best_a


# -- maximum clique ------------------------------------------------------

cdef struct CliqueState:
    const uint64_t* rows
    Py_ssize_t n
    Py_ssize_t words
    int best
    int* best_members
    int* current
    long long nodes
    long long budget
    int stopped
    uint64_t* pool      # (n + 1) candidate sets, one per depth
    int* order_pool     # (n + 1) * n colour orders
    int* bound_pool     # (n + 1) * n colour bounds
    uint64_t* scratch   # 2 * words


cdef inline bint is_empty(const uint64_t* s, Py_ssize_t words) nogil:
    cdef Py_ssize_t w
    for w in range(words):
        if s[w]:
            return False
    return True


cdef int colour_sort(CliqueState* st, const uint64_t* P, int* order, int* bounds) nogil:
    cdef Py_ssize_t words = st.words, w, k
    cdef uint64_t* U = st.scratch
    cdef uint64_t* Q = st.scratch + words
    cdef int count = 0, colour = 0, v
    cdef const uint64_t* row
    for w in range(words):
        U[w] = P[w]
    while not is_empty(U, words):
        colour += 1
        for w in range(words):
            Q[w] = U[w]
        w = 0
        while w < words:
            if Q[w] == 0:
                w += 1
                continue
            v = <int>(w * 64 + __builtin_ctzll(Q[w]))
            U[w] &= ~((<uint64_t>1) << (v & 63))
            Q[w] &= ~((<uint64_t>1) << (v & 63))
            row = st.rows + v * words
            for k in range(w, words):
                Q[k] &= ~row[k]
            order[count] = v
            bounds[count] = colour
            count += 1
    return count


cdef void expand(CliqueState* st, int depth) nogil:
    cdef Py_ssize_t words = st.words, w
    cdef uint64_t* P = st.pool + depth * words
    cdef uint64_t* newP = st.pool + (depth + 1) * words
    cdef int* order = st.order_pool + depth * st.n
    cdef int* bounds = st.bound_pool + depth * st.n
    cdef int count, i, v, j
    cdef const uint64_t* row
    st.nodes += 1
    if st.budget >= 0 and st.nodes > st.budget:
        st.stopped = 1
        return
    count = colour_sort(st, P, order, bounds)
    i = count - 1
    while i >= 0:
        if depth + bounds[i] <= st.best:
            return
        v = order[i]
        row = st.rows + v * words
        for w in range(words):
            newP[w] = P[w] & row[w]
        st.current[depth] = v
        if is_empty(newP, words):
            if depth + 1 > st.best:
                st.best = depth + 1
                for j in range(depth + 1):
                    st.best_members[j] = st.current[j]
        else:
            expand(st, depth + 1)
            if st.stopped:
                return
        P[v >> 6] &= ~((<uint64_t>1) << (v & 63))
        i -= 1


def max_clique(G, int lower=0, budget=None):
    cdef Py_ssize_t n = G.n
    if n == 0:
        return lower, [], 0, True
    cdef uint64_t[:, ::1] rows = G.blocks
    cdef Py_ssize_t words = rows.shape[1], w
    cdef CliqueState st
    st.rows = &rows[0, 0]
    st.n = n
    st.words = words
    st.best = lower
    st.nodes = 0
    st.budget = -1 if budget is None else <long long>budget
    st.stopped = 0
    st.best_members = <int*>malloc(n * sizeof(int))
    st.current = <int*>malloc(n * sizeof(int))
    st.pool = <uint64_t*>calloc((n + 1) * words, sizeof(uint64_t))
    st.order_pool = <int*>malloc((n + 1) * n * sizeof(int))
    st.bound_pool = <int*>malloc((n + 1) * n * sizeof(int))
    st.scratch = <uint64_t*>malloc(2 * words * sizeof(uint64_t))
    found = lower
    members = []
    try:
        for v in range(n):
            st.pool[v >> 6] |= (<uint64_t>1) << (v & 63)
        with nogil:
            expand(&st, 0)
        if st.best > lower:
            found = st.best
            members = [st.best_members[j] for j in range(st.best)]
        return found, members, st.nodes, not st.stopped
    finally:
        free(st.best_members)
        free(st.current)
        free(st.pool)
        free(st.order_pool)
        free(st.bound_pool)
        free(st.scratch)
