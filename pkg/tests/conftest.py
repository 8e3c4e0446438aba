"""Shared fixtures and independent reference implementations for tests.

The reference implementations here deliberately use different mechanisms than
the library (itertools enumeration, bitmask DP) so agreement is meaningful.
"""

import itertools

from tripack.graph import Graph, bits, iter_bits, union
from tripack.generators import random_bipartite
from tripack.packing import Cherry
from tripack.rng import derive


def make_complete(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, [full ^ (1 << v) for v in range(n)])


def disjoint_biclique_blocks(blocks: int, m: int) -> Graph:
    """`blocks` disjoint copies of K_{m,m} on consecutive vertex ranges."""
    n = blocks * 2 * m
    adj = [0] * n
    for blk in range(blocks):
        base = blk * 2 * m
        left = ((1 << m) - 1) << base
        right = ((1 << m) - 1) << (base + m)
        for v in range(base, base + m):
            adj[v] = right
        for v in range(base + m, base + 2 * m):
            adj[v] = left
    return Graph(n, adj)


def make_random_cherry(nv: int, nu: int, cross_p: float, seed: int) -> Cherry:
    """Random super-regular-style cherry: U = [0,nu), V = [nu,nu+nv),
    W = [nu+nv, 2nu+nv), with V-U and V-W random bipartite at cross_p."""
    n = 2 * nu + nv
    u = bits(range(nu))
    v = bits(range(nu, nu + nv))
    w = bits(range(nu + nv, n))
    g1 = random_bipartite(n, v, u, cross_p, derive(seed, "vu"))
    g2 = random_bipartite(n, v, w, cross_p, derive(seed, "vw"))
    return Cherry(u, v, w, union(g1, g2))


def make_complete_cherry(k: int) -> Cherry:
    """Complete tripartite cherry with all three parts of size k."""
    n = 3 * k
    u = bits(range(k))
    v = bits(range(k, 2 * k))
    w = bits(range(2 * k, 3 * k))
    adj = [0] * n
    for x in iter_bits(u):
        adj[x] = v
    for x in iter_bits(w):
        adj[x] = v
    for x in iter_bits(v):
        adj[x] = u | w
    return Cherry(u, v, w, Graph(n, adj))


def naive_max_packing_size(g: Graph) -> int:
    """Exhaustive maximum triangle packing by bitmask DP over vertex subsets;
    independent of the branch-and-bound oracle."""
    tris = []
    for u, v, w in itertools.combinations(range(g.n), 3):
        if g.has_edge(u, v) and g.has_edge(u, w) and g.has_edge(v, w):
            tris.append((1 << u) | (1 << v) | (1 << w))
    memo = {}

    def best(avail: int) -> int:
        if avail == 0:
            return 0
        if avail in memo:
            return memo[avail]
        v = (avail & -avail).bit_length() - 1
        res = best(avail ^ (1 << v))
        for tm in tris:
            if (tm >> v) & 1 and not (tm & ~avail):
                r = 1 + best(avail & ~tm)
                if r > res:
                    res = r
        memo[avail] = res
        return res

    return best((1 << g.n) - 1)


def all_matchings_max(g: Graph, a: int, b: int) -> int:
    """Maximum matching size by brute-force enumeration over edge subsets."""
    edges = [(u, v) for (u, v) in g.edges() if ((a >> u) & 1 and (b >> v) & 1) or ((b >> u) & 1 and (a >> v) & 1)]

    def grow(i: int, used: int) -> int:
        if i == len(edges):
            return 0
        best = grow(i + 1, used)
        u, v = edges[i]
        em = (1 << u) | (1 << v)
        if not (used & em):
            best = max(best, 1 + grow(i + 1, used | em))
        return best

    return grow(0, 0)
