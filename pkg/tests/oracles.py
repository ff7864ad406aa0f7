"""Independent reference computations used as test oracles.

Nothing here reuses the package's kernels or vectorized sweeps: components
come from networkx, ranks from dense mod-2 elimination in numpy, congestion
and lemma ratios from explicit path enumeration, widths from permutations.
"""

from __future__ import annotations

import math
from itertools import permutations

import networkx as nx
import numpy as np


def nx_graph(n, edges):
    h = nx.Graph()
    h.add_nodes_from(range(n))
    h.add_edges_from(edges)
    return h


def rank_mod2(matrix) -> int:
    a = np.array(matrix, dtype=np.uint8) % 2
    if a.size == 0:
        return 0
    rank = 0
    rows, cols = a.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r, c]), None)
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] ^= a[rank]
        rank += 1
    return rank


def incidence_matrix(n, edges):
    m = np.zeros((n, len(edges)), dtype=np.uint8)
    for j, (u, v) in enumerate(edges):
        m[u, j] = m[v, j] = 1
    return m


def adjacency_matrix(n, edges):
    a = np.zeros((n, n), dtype=np.uint8)
    for u, v in edges:
        a[u, v] = a[v, u] = 1
    return a


def chosen(edges, mask):
    return [e for i, e in enumerate(edges) if mask >> i & 1]


def direct_weight(family, params, n, all_edges, mask, kind="edge"):
    """Weight straight from the defining formulas (not log domain)."""
    if kind == "vertex":
        verts = [v for v in range(n) if mask >> v & 1]
        idx = {v: i for i, v in enumerate(verts)}
        sub = [(idx[u], idx[v]) for u, v in all_edges if u in idx and v in idx]
        r2 = rank_mod2(adjacency_matrix(len(verts), sub))
        x, y = params["x"], params["y"]
        return (x - 1) ** r2 * (y - 1) ** (n - r2)
    s = chosen(all_edges, mask)
    h = nx_graph(n, s)
    kappa = nx.number_connected_components(h) if n else 0
    r = rank_mod2(incidence_matrix(n, s))
    rE = rank_mod2(incidence_matrix(n, all_edges))
    if family == "rc":
        return params["q"] ** kappa * params["mu"] ** len(s)
    if family == "tutte":
        return (params["x"] - 1) ** (rE - r) * (params["y"] - 1) ** (len(s) - r)
    if family == "r2":
        return params["q"] ** rank_mod2(adjacency_matrix(n, s)) * params["mu"] ** len(s)
    if family == "multi_tutte":
        prod = 1.0
        for i in range(len(all_edges)):
            if mask >> i & 1:
                prod *= params["v"][i]
        return params["q"] ** kappa * prod
    if family == "upoly":
        out = (params["y"] - 1) ** (len(s) - r)
        for comp in nx.connected_components(h):
            out *= params["x"][len(comp) - 1]
        return out
    raise ValueError(family)


def brute_partition(family, params, n, edges, kind="edge"):
    k = len(edges) if kind == "edge" else n
    return sum(direct_weight(family, params, n, edges, s, kind) for s in range(1 << k))


def dense_chain(weights):
    """Transition matrix and pi of the lazy single-flip Metropolis chain, from raw weights."""
    size = len(weights)
    k = size.bit_length() - 1
    P = np.zeros((size, size))
    for h in range(size):
        for i in range(k):
            h2 = h ^ (1 << i)
            P[h, h2] = 0.5 * min(1.0, weights[h2] / weights[h]) / k
        P[h, h] = 1.0 - P[h].sum()
    pi = np.array(weights, dtype=float) / sum(weights)
    return P, pi


def brute_path(perm, I, F):
    states = [I]
    for x in perm:
        if (I ^ F) >> x & 1:
            states.append(states[-1] ^ (1 << x))
    return states


def brute_congestion(weights, perm):
    P, pi = dense_chain(weights)
    size = len(weights)
    load = {}
    for I in range(size):
        for F in range(size):
            path = brute_path(perm, I, F)
            for a, b in zip(path, path[1:]):
                load[(a, b)] = load.get((a, b), 0.0) + pi[I] * pi[F] * (len(path) - 1)
    if not load:
        return 0.0
    return max(v / (pi[a] * P[a, b]) for (a, b), v in load.items())


def brute_lemma_max(weights, perm):
    size = len(weights)
    best = 0.0
    for I in range(size):
        for F in range(size):
            for H in brute_path(perm, I, F):
                C = I ^ F ^ H
                best = max(best, weights[I] * weights[F] / (weights[H] * weights[C]))
    return best


def brute_tv_curve(weights, t_max):
    """Worst-start TV distance for t = 0..t_max, one matrix step at a time."""
    P, pi = dense_chain(weights)
    Q = np.eye(len(weights))
    out = []
    for _ in range(t_max + 1):
        out.append(0.5 * np.abs(Q - pi).sum(axis=1).max())
        Q = Q @ P
    return out


def brute_width(n, edges, kind):
    """Exact width by trying every ordering (tiny graphs only)."""
    k = len(edges) if kind == "edge" else n
    best = math.inf
    for perm in permutations(range(k)):
        best = min(best, ordering_width(n, edges, kind, perm))
    return 0 if best is math.inf else best


def ordering_width(n, edges, kind, perm):
    """Width of one ordering, straight from the definition with Python sets."""
    width = 0
    for i in range(len(perm)):
        prefix, suffix = set(perm[:i]), set(perm[i:])
        if kind == "edge":
            pre_v = {v for e in prefix for v in edges[e]}
            suf_v = {v for e in suffix for v in edges[e]}
            width = max(width, len(pre_v & suf_v))
        else:
            adj = {v: set() for v in range(n)}
            for u, v in edges:
                adj[u].add(v)
                adj[v].add(u)
            width = max(width, sum(1 for v in prefix if adj[v] & suffix))
    return width
