"""Exact small-scale ground truth: maximum triangle packing, triangle counts,
maximum bipartite matching, Hall violators."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Graph, VertexSet, bits, iter_bits


@dataclass
class TrianglePacking:
    """Pairwise vertex-disjoint triangles (u,v,w) with u < v < w."""

    triples: list[tuple[int, int, int]]
    host: Graph | None = None

    @property
    def size(self) -> int:
        return len(self.triples)

    def vertex_mask(self) -> int:
        m = 0
        for t in self.triples:
            m |= bits(t)
        return m

    def validate(self, g: Graph | None = None) -> None:
        """Raise unless every triple is a triangle in g and all are disjoint."""
        g = g if g is not None else self.host
        if g is None:
            raise ValueError("no host graph to validate against")
        used = 0
        for (u, v, w) in self.triples:
            if not (0 <= u < v < w < g.n):
                raise ValueError(f"triple {(u, v, w)} not sorted in range")
            if not (g.has_edge(u, v) and g.has_edge(u, w) and g.has_edge(v, w)):
                raise ValueError(f"triple {(u, v, w)} is not a triangle")
            tmask = bits((u, v, w))
            if used & tmask:
                raise ValueError(f"triple {(u, v, w)} overlaps another triple")
            used |= tmask


@dataclass
class Matching:
    """Pairwise vertex-disjoint edges."""

    edges: list[tuple[int, int]]
    host: Graph | None = None

    @property
    def size(self) -> int:
        return len(self.edges)

    def vertex_mask(self) -> int:
        m = 0
        for (u, v) in self.edges:
            m |= (1 << u) | (1 << v)
        return m

    def validate(self, g: Graph | None = None) -> None:
        g = g if g is not None else self.host
        used = 0
        for (u, v) in self.edges:
            if g is not None and not g.has_edge(u, v):
                raise ValueError(f"({u},{v}) is not an edge of the host")
            emask = (1 << u) | (1 << v)
            if used & emask:
                raise ValueError(f"({u},{v}) overlaps another matching edge")
            used |= emask


def count_triangles(g: Graph, within: VertexSet | None = None) -> int:
    """Exact number of triangles with all three vertices in `within`."""
    s = g.vertex_mask() if within is None else within
    if s >> g.n:
        raise ValueError("within mentions vertices outside the graph")
    total = 0
    for u in iter_bits(s):
        above_u = g.adj[u] & s & ~((1 << (u + 1)) - 1)
        for v in iter_bits(above_u):
            common = g.adj[u] & g.adj[v] & s & ~((1 << (v + 1)) - 1)
            total += common.bit_count()
    return total


def triangles_list(g: Graph, within: VertexSet | None = None) -> list[tuple[int, int, int]]:
    """All triangles (u,v,w), u < v < w, inside `within`, lexicographic."""
    s = g.vertex_mask() if within is None else within
    out = []
    for u in iter_bits(s):
        above_u = g.adj[u] & s & ~((1 << (u + 1)) - 1)
        for v in iter_bits(above_u):
            common = g.adj[u] & g.adj[v] & s & ~((1 << (v + 1)) - 1)
            for w in iter_bits(common):
                out.append((u, v, w))
    return out


def count_k4_within(g: Graph, s: VertexSet) -> int:
    """Exact number of K4's with all four vertices in s. Each K4 is counted
    once, anchored at its two lowest vertices."""
    total = 0
    for u in iter_bits(s):
        above_u = g.adj[u] & s & ~((1 << (u + 1)) - 1)
        for v in iter_bits(above_u):
            common = g.adj[u] & g.adj[v] & s & ~((1 << (v + 1)) - 1)
            for w in iter_bits(common):
                total += (common & g.adj[w] & ~((1 << (w + 1)) - 1)).bit_count()
    return total


@dataclass
class OracleResult:
    packing: TrianglePacking
    status: str  # "optimal" | "budget" | "unknown"
    nodes: int = 0

    @property
    def size(self) -> int:
        return self.packing.size


def greedy_triangle_packing(
    g: Graph, within: VertexSet | None = None, limit: int | None = None
) -> TrianglePacking:
    """Lexicographic greedy packing; used as branch-and-bound incumbent and as
    the portfolio baseline."""
    s = g.vertex_mask() if within is None else within
    used = 0
    triples = []
    for u in iter_bits(s):
        if (used >> u) & 1:
            continue
        nu = g.adj[u] & s & ~used & ~((1 << (u + 1)) - 1)
        found = None
        for v in iter_bits(nu):
            common = nu & g.adj[v] & ~((1 << (v + 1)) - 1)
            if common:
                found = (u, v, (common & -common).bit_length() - 1)
                break
        if found:
            triples.append(found)
            used |= bits(found)
            if limit is not None and len(triples) >= limit:
                break
    return TrianglePacking(triples, host=g)


def max_triangle_packing_exact(
    g: Graph,
    budget: int | None = None,
    step_limit: int | None = None,
    within: VertexSet | None = None,
) -> OracleResult:
    """Maximum-cardinality triangle packing by branch and bound.

    Branches on the live vertex with the fewest available triangles: one child
    per triangle through it plus one child that excludes it from the packing.
    Exceeding step_limit yields status "unknown" (incumbent returned, never
    claimed optimal); reaching budget yields status "budget"."""
    s = g.vertex_mask() if within is None else within
    tris = triangles_list(g, s)
    tri_masks = [bits(t) for t in tris]
    by_vertex: dict[int, list[int]] = {}
    for i, t in enumerate(tris):
        for v in t:
            by_vertex.setdefault(v, []).append(i)

    incumbent = greedy_triangle_packing(g, s)
    best = list(incumbent.triples)
    if budget is not None and len(best) >= budget:
        return OracleResult(TrianglePacking(best[:budget], host=g), "budget", 0)

    nodes = 0
    limit_hit = False

    def available(i: int, blocked: int) -> bool:
        return not (tri_masks[i] & blocked)

    def search(blocked: int, current: list[tuple[int, int, int]]):
        nonlocal nodes, best, limit_hit
        if limit_hit:
            return
        nodes += 1
        if step_limit is not None and nodes > step_limit:
            limit_hit = True
            return
        if budget is not None and len(best) >= budget:
            return
        # pick the live vertex with fewest available triangles
        pivot, pivot_tris = -1, None
        covered_mass = 0
        for v, tlist in by_vertex.items():
            if (blocked >> v) & 1:
                continue
            avail = [i for i in tlist if available(i, blocked)]
            if not avail:
                continue
            covered_mass |= 1 << v
            if pivot_tris is None or len(avail) < len(pivot_tris):
                pivot, pivot_tris = v, avail
        if pivot_tris is None:
            if len(current) > len(best):
                best = list(current)
            return
        if len(current) + covered_mass.bit_count() // 3 <= len(best):
            return
        for i in pivot_tris:
            current.append(tris[i])
            search(blocked | tri_masks[i], current)
            current.pop()
            if limit_hit or (budget is not None and len(best) >= budget):
                return
        # pivot left uncovered
        search(blocked | (1 << pivot), current)

    search(0, [])
    if budget is not None and len(best) >= budget:
        return OracleResult(TrianglePacking(best[:budget], host=g), "budget", nodes)
    status = "unknown" if limit_hit else "optimal"
    return OracleResult(TrianglePacking(best, host=g), status, nodes)


def max_bipartite_matching(g: Graph, a: VertexSet, b: VertexSet) -> Matching:
    """Maximum matching on a-b edges by repeated augmenting-path search
    (lowest-index first, deterministic). Iterative DFS so deep alternating
    paths cannot hit the recursion limit."""
    if a & b:
        raise ValueError("sides overlap")
    a_list = list(iter_bits(a))
    match_a = {u: -1 for u in a_list}
    match_b: dict[int, int] = {}

    def try_augment(root: int) -> bool:
        visited_b = 0
        # frames: [a-vertex, unexplored b-neighbour mask, currently chosen b]
        stack = [[root, g.adj[root] & b, -1]]
        while stack:
            frame = stack[-1]
            remaining = frame[1] & ~visited_b
            if not remaining:
                stack.pop()
                continue
            v = (remaining & -remaining).bit_length() - 1
            visited_b |= 1 << v
            frame[1] = remaining ^ (1 << v)
            frame[2] = v
            w = match_b.get(v)
            if w is None:
                for (x, _, y) in stack:
                    match_b[y] = x
                    match_a[x] = y
                return True
            stack.append([w, g.adj[w] & b, -1])
        return False

    for u in a_list:
        try_augment(u)
    edges = sorted((u, v) for u, v in match_a.items() if v != -1)
    return Matching(edges, host=g)


def hall_violator(g: Graph, a: VertexSet, b: VertexSet) -> VertexSet | None:
    """A set S within a with |N(S) ∩ b| < |S|, or None when a matching
    saturates a. Derived from the alternating reachability of the final
    matching: S = a-vertices reachable from unmatched ones."""
    matching = max_bipartite_matching(g, a, b)
    matched_a = {u: v for u, v in matching.edges}
    matched_b = {v: u for u, v in matching.edges}
    unmatched = [u for u in iter_bits(a) if u not in matched_a]
    if not unmatched:
        return None
    reach_a = bits(unmatched)
    reach_b = 0
    frontier = list(unmatched)
    while frontier:
        nxt = []
        for u in frontier:
            for v in iter_bits(g.adj[u] & b & ~reach_b):
                reach_b |= 1 << v
                w = matched_b.get(v)
                if w is not None and not ((reach_a >> w) & 1):
                    reach_a |= 1 << w
                    nxt.append(w)
        frontier = nxt
    assert reach_b.bit_count() < reach_a.bit_count()
    return reach_a
