"""Random models and deterministic constructions.

All generators are pure functions of (parameters, seed): edge presence is
keyed per pair index through the counter-based generator in rng, so two calls
with the same arguments agree bit-exactly.
"""

from __future__ import annotations

from fractions import Fraction
import math

import numpy as np

from .graph import Graph, VertexSet, bits, iter_bits
from .rng import Stream, bernoulli_indices, derive
from .util import as_fraction


def _pairs_from_indices(n: int, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # invert k = offset(u) + (v - u - 1) with offset(u) = u*n - u*(u+1)/2
    k = idx.astype(np.float64)
    b = 2.0 * n - 1.0
    u = np.floor((b - np.sqrt(b * b - 8.0 * k)) / 2.0).astype(np.int64)
    # float rounding can be off by one near row boundaries
    for _ in range(2):
        off = u * n - (u * (u + 1)) // 2
        too_big = off > idx
        u[too_big] -= 1
        off = u * n - (u * (u + 1)) // 2
        too_small = idx - off >= (n - 1 - u)
        u[too_small] += 1
    off = u * n - (u * (u + 1)) // 2
    v = idx - off + u + 1
    return u, v


def gnp(n: int, p: float, seed: int) -> Graph:
    """Binomial random graph: each of the C(n,2) pairs is an edge with
    probability p, decided independently per pair index."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0,1]")
    total = n * (n - 1) // 2
    adj = [0] * n
    idx = bernoulli_indices(seed, total, p)
    if idx.size:
        us, vs = _pairs_from_indices(n, idx)
        for u, v in zip(us.tolist(), vs.tolist()):
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    return Graph(n, adj)


def random_bipartite(n: int, a: VertexSet, b: VertexSet, p: float, seed: int) -> Graph:
    """Random bipartite graph on universe 0..n-1: only a-b pairs are sampled."""
    if a & b:
        raise ValueError("parts overlap")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0,1]")
    if (a | b) >> n:
        raise ValueError("parts mention vertices >= n")
    a_list = list(iter_bits(a))
    b_list = list(iter_bits(b))
    nb = len(b_list)
    adj = [0] * n
    idx = bernoulli_indices(seed, len(a_list) * nb, p)
    for k in idx.tolist():
        u = a_list[k // nb]
        v = b_list[k % nb]
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return Graph(n, adj)


def reveal_within_pairs(n: int, pairs: list[tuple[int, int]], p: float, seed: int) -> Graph:
    """Reveal an arbitrary pair list with probability p each, keyed by the
    position in the (caller-deterministic) list."""
    adj = [0] * n
    idx = bernoulli_indices(seed, len(pairs), p)
    for k in idx.tolist():
        u, v = pairs[k]
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return Graph(n, adj)


def complete_bipartite(m: int, n: int) -> Graph:
    """K_{m,n-m} with parts {0..m-1} and {m..n-1}."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m >= n:
        raise ValueError("m must be < n")
    low = (1 << m) - 1
    high = ((1 << n) - 1) ^ low
    adj = [high] * m + [low] * (n - m)
    return Graph(n, adj)


def complete_multipartite(sizes: list[int]) -> Graph:
    """Complete multipartite graph with consecutive blocks of the given sizes."""
    if not sizes or any(s < 0 for s in sizes):
        raise ValueError("sizes must be nonempty and nonnegative")
    n = sum(sizes)
    full = (1 << n) - 1
    adj = []
    start = 0
    for s in sizes:
        block = ((1 << s) - 1) << start
        adj.extend([full ^ block] * s)
        start += s
    return Graph(n, adj)


def k4_counterexample(n: int, m: int) -> Graph:
    """Minimum-degree-n/4 graph whose big part is a disjoint union of K_{m,m}:
    A independent, complete A-B cross edges, |A| = n/4 - m, |B| = 3n/4 + m."""
    if n % 4:
        raise ValueError("n must be divisible by 4")
    size_a = n // 4 - m
    size_b = 3 * (n // 4) + m
    if size_a < 1:
        raise ValueError("need n/4 - m >= 1")
    if size_b % (2 * m):
        raise ValueError(f"|B| = {size_b} must be divisible by 2m = {2 * m}")
    a_mask = (1 << size_a) - 1
    full = (1 << n) - 1
    b_mask = full ^ a_mask
    adj = [b_mask] * size_a + [0] * size_b
    start = size_a
    for _ in range(size_b // (2 * m)):
        left = ((1 << m) - 1) << start
        right = ((1 << m) - 1) << (start + m)
        for v in range(start, start + m):
            adj[v] = a_mask | right
        for v in range(start + m, start + 2 * m):
            adj[v] = a_mask | left
        start += 2 * m
    return Graph(n, adj)


def stable_model(
    n: int, alpha, beta, defect_fraction: float, seed: int
) -> tuple[Graph, VertexSet, VertexSet]:
    """Near-extremal fixture: complete bipartite K_{ceil(alpha n), rest} with a
    seeded fraction of vertices degraded to cut-degree exactly ceil(alpha*n/4),
    the stability floor. Returns (graph, A, B); the witness partition always
    passes verify_stability(alpha, beta)."""
    alpha = as_fraction(alpha)
    beta = as_fraction(beta)
    if not 0 < alpha <= Fraction(1, 3):
        raise ValueError("alpha must be in (0, 1/3]")
    if not 0 <= beta < Fraction(1, 12):
        raise ValueError("beta must be in [0, 1/12)")
    if not 0.0 <= defect_fraction <= 1.0:
        raise ValueError("defect_fraction must be in [0,1]")
    size_a = math.ceil(alpha * n)
    size_b = n - size_a
    if size_a < 1 or size_b < 1:
        raise ValueError("degenerate partition")
    floor_deg = math.ceil(alpha * n / 4)
    ka = int(defect_fraction * size_a)
    kb = int(defect_fraction * size_b)
    if ka > beta * n or kb > beta * n:
        raise ValueError("defect_fraction too large for beta: witness would fail")
    if ka and floor_deg >= size_b - beta * n:
        raise ValueError("degraded cut-degree would not sit below |B| - beta*n")
    if kb and floor_deg >= size_a - beta * n:
        raise ValueError("degraded cut-degree would not sit below |A| - beta*n")
    if kb > floor_deg or ka > floor_deg:
        raise ValueError("defects exceed the degree floor; keep-sets impossible")

    a_list = list(range(size_a))
    b_list = list(range(size_a, n))
    rng = Stream(derive(seed, "stable"))
    deg_a = sorted(rng.sample(a_list, ka))
    deg_b = sorted(rng.sample(b_list, kb))
    deg_a_mask = bits(deg_a)
    deg_b_mask = bits(deg_b)

    # Degraded vertices keep each other plus the lowest normal vertices of the
    # other side, so kept degrees land exactly on the floor.
    def keep_set(degraded_other: list[int], normal_other: list[int]) -> int:
        kept = list(degraded_other) + normal_other[: floor_deg - len(degraded_other)]
        return bits(kept)

    normal_b = [v for v in b_list if not ((deg_b_mask >> v) & 1)]
    normal_a = [v for v in a_list if not ((deg_a_mask >> v) & 1)]
    keep_a = keep_set(deg_b, normal_b)  # B-neighbours kept by a degraded A-vertex
    keep_b = keep_set(deg_a, normal_a)

    a_mask = (1 << size_a) - 1
    b_mask = ((1 << n) - 1) ^ a_mask
    adj = [0] * n
    for v in a_list:
        adj[v] = keep_a if (deg_a_mask >> v) & 1 else b_mask
    for v in b_list:
        adj[v] = keep_b if (deg_b_mask >> v) & 1 else a_mask
    # drop asymmetric halves: edge only if both endpoints keep each other
    for v in a_list:
        row = 0
        for w in iter_bits(adj[v]):
            if (adj[w] >> v) & 1:
                row |= 1 << w
        adj[v] = row
    for w in b_list:
        row = 0
        for v in iter_bits(adj[w]):
            if (adj[v] >> w) & 1:
                row |= 1 << v
        adj[w] = row
    g = Graph(n, adj)
    if ka and g.degree(deg_a[0]) != floor_deg:
        raise AssertionError("degraded degree missed the floor")
    return g, a_mask, b_mask
