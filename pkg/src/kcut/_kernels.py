"""Compiled inner loops. Trees arrive with parent[v] < v, so a forward scan is a
root-first traversal and nothing here recurses."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def depths(parent):
    n = parent.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for v in range(1, n):
        out[v] = out[parent[v]] + 1
    return out


@njit(cache=True)
def record_counts(parent, clocks):
    """clocks[v, r-1] is the r-th alarm time of node v (cumulative sums)."""
    n, k = clocks.shape
    counts = np.zeros(k, dtype=np.int64)
    amin = np.empty(n)
    amin[0] = np.inf
    for r in range(k):
        counts[r] += 1  # root: no ancestors
    for v in range(1, n):
        p = parent[v]
        m = amin[p]
        g = clocks[p, k - 1]
        if g < m:
            m = g
        amin[v] = m
        for r in range(k):
            if clocks[v, r] < m:
                counts[r] += 1
            else:
                break
    return counts


@njit(cache=True)
def direct_cuts(indptr, indices, root, k, uniforms):
    """Cut uniformly chosen nodes of the root component until the root dies.

    Each cut consumes one uniform; at most k*n cuts can happen."""
    n = indptr.shape[0] - 1
    cuts = np.zeros(n, dtype=np.int64)
    alive = np.ones(n, dtype=np.bool_)
    comp = np.empty(n, dtype=np.int64)
    seen = np.zeros(n, dtype=np.int64)
    stamp = 0
    size = 0
    dirty = True
    total = 0
    pos = 0
    while True:
        if dirty:
            stamp += 1
            comp[0] = root
            seen[root] = stamp
            size = 1
            head = 0
            while head < size:
                v = comp[head]
                head += 1
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    if alive[w] and seen[w] != stamp:
                        seen[w] = stamp
                        comp[size] = w
                        size += 1
            dirty = False
        j = int(uniforms[pos] * size)
        pos += 1
        if j >= size:
            j = size - 1
        v = comp[j]
        cuts[v] += 1
        total += 1
        if cuts[v] == k:
            if v == root:
                return total
            alive[v] = False
            dirty = True


@njit(cache=True)
def _offspring(gen, kind):
    u = gen.random()
    if kind == 0:  # Poisson(1) by inversion
        j = 0
        p = np.exp(-1.0)
        cdf = p
        while u > cdf and j < 100:
            j += 1
            p = p / j
            cdf += p
        return j
    if kind == 1:  # Geometric(1/2) on {0, 1, 2, ...}
        j = 0
        cdf = 0.5
        p = 0.5
        while u > cdf and j < 200:
            j += 1
            p *= 0.5
            cdf += p
        return j
    return 2 if u < 0.5 else 0  # Binary {0, 2}


@njit(cache=True)
def gw_rejection(gen, n, kind, max_attempts):
    """Grow breadth-first Galton-Watson trees, aborting past n nodes, until one
    has exactly n nodes. Returns (parent, attempts); attempts = -1 on failure."""
    parent = np.empty(n, dtype=np.int64)
    for attempt in range(1, max_attempts + 1):
        parent[0] = -1
        size = 1
        head = 0
        overflow = False
        while head < size:
            c = _offspring(gen, kind)
            if size + c > n:
                overflow = True
                break
            for _ in range(c):
                parent[size] = head
                size += 1
            head += 1
        if not overflow and size == n:
            return parent, attempt
    return parent, -1
