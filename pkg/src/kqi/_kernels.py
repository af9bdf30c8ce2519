"""Compiled inner loops. Every routine here works on plain index arrays (CSR)."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def topological_order(n, indptr, indices):
    """Kahn's algorithm over a CSR out-adjacency.

    Returns an array shorter than ``n`` when the graph has a cycle.
    """
    indeg = np.zeros(n, dtype=np.int64)
    for k in range(indices.shape[0]):
        indeg[indices[k]] += 1
    order = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    for v in range(n):
        if indeg[v] == 0:
            order[tail] = v
            tail += 1
    while head < tail:
        v = order[head]
        head += 1
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            indeg[u] -= 1
            if indeg[u] == 0:
                order[tail] = u
                tail += 1
    return order[:tail]


@njit(cache=True, nogil=True)
def propagate_volumes(order, indptr, indices, weights, s_in, s_out):
    # children are always finished before their parents in reversed order
    n = s_out.shape[0]
    vol = np.zeros(n, dtype=np.float64)
    for i in range(order.shape[0] - 1, -1, -1):
        v = order[i]
        acc = s_out[v]
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            acc += weights[k] / s_in[u] * vol[u]
        vol[v] = acc
    return vol


@njit(cache=True, nogil=True)
def draw_targets(pool, pool_len, m, chosen):
    """Fill ``chosen[:m]`` with distinct entries drawn uniformly from ``pool[:pool_len]``."""
    k = 0
    while k < m:
        t = pool[int(np.random.random() * pool_len)]
        dup = False
        for q in range(k):
            if chosen[q] == t:
                dup = True
                break
        if not dup:
            chosen[k] = t
            k += 1


@njit(cache=True)
def sample_targets(pool, m, repeats, seed):
    """Draw ``repeats`` independent target sets from a frozen pool (for testing)."""
    np.random.seed(seed)
    out = np.empty((repeats, m), dtype=np.int64)
    chosen = np.empty(m, dtype=np.int64)
    for r in range(repeats):
        draw_targets(pool, pool.shape[0], m, chosen)
        out[r] = chosen
    return out


@njit(cache=True, nogil=True)
def preferential_attachment(n, m, seed, total_degree):
    """Grow ``n`` nodes in arrival order, each citing ``min(m, i)`` earlier ones.

    A node is drawn with probability proportional to its degree plus one.
    With ``total_degree`` the degree counts both citations made and received,
    otherwise only citations received. Returns (target, newcomer) arrays.
    """
    np.random.seed(seed)
    n_edges = 0
    for i in range(n):
        n_edges += min(m, i)
    src = np.empty(n_edges, dtype=np.int64)
    dst = np.empty(n_edges, dtype=np.int64)
    per_edge = 2 if total_degree else 1
    pool = np.empty(n + per_edge * n_edges, dtype=np.int64)
    pool_len = 0
    chosen = np.empty(m, dtype=np.int64)
    e = 0
    for i in range(n):
        if i <= m:
            for j in range(i):
                src[e] = j
                dst[e] = i
                e += 1
            k = i
            for j in range(i):
                chosen[j] = j
        else:
            draw_targets(pool, pool_len, m, chosen)
            k = m
            for q in range(k):
                src[e] = chosen[q]
                dst[e] = i
                e += 1
        # virtual self-ring
        pool[pool_len] = i
        pool_len += 1
        for q in range(k):
            pool[pool_len] = chosen[q]
            pool_len += 1
            if total_degree:
                pool[pool_len] = i
                pool_len += 1
    return src, dst
