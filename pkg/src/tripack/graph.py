"""Bitset graphs over vertex indices 0..n-1.

A vertex set is a plain Python int used as a bitmask; adjacency is one bitmask
per vertex. Graphs are immutable after construction: algorithms track used
vertices in separate masks instead of deleting vertices.
"""

from __future__ import annotations

from typing import Iterable, Iterator

VertexSet = int


def bits(vertices: Iterable[int]) -> int:
    """Bitmask of an iterable of vertex indices."""
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def iter_bits(mask: int) -> Iterator[int]:
    """Ascending vertex indices of a bitmask."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


class Graph:
    """Undirected simple graph with bitset adjacency rows."""

    __slots__ = ("n", "adj", "edge_count")

    def __init__(self, n: int, adj, edge_count: int | None = None):
        if len(adj) != n:
            raise ValueError("adjacency length must equal n")
        total = 0
        for v, row in enumerate(adj):
            if row >> n:
                raise ValueError(f"adjacency of {v} mentions vertices >= n")
            if (row >> v) & 1:
                raise ValueError(f"self-loop at vertex {v}")
            total += row.bit_count()
        if total % 2:
            raise ValueError("adjacency is not symmetric (odd popcount sum)")
        self.n = n
        self.adj = tuple(adj)  # frozen: algorithms track used vertices in masks
        self.edge_count = total // 2
        if edge_count is not None and edge_count != self.edge_count:
            raise ValueError("edge_count mismatch")

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, [0] * n)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, adj)

    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degree_into(self, v: int, s: VertexSet) -> int:
        """|N(v) ∩ s|."""
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range")
        return (self.adj[v] & s).bit_count()

    def min_degree(self) -> int:
        if self.n == 0:
            return 0
        return min(row.bit_count() for row in self.adj)

    def max_degree(self) -> int:
        if self.n == 0:
            return 0
        return max(row.bit_count() for row in self.adj)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges (u, v) with u < v, lexicographic."""
        for u in range(self.n):
            higher = self.adj[u] >> (u + 1)
            v = u + 1
            while higher:
                if higher & 1:
                    yield (u, v)
                higher >>= 1
                v += 1

    def edges_within(self, s: VertexSet) -> Iterator[tuple[int, int]]:
        for u in iter_bits(s):
            higher = self.adj[u] & s & ~((1 << (u + 1)) - 1)
            for v in iter_bits(higher):
                yield (u, v)

    def count_edges_between(self, a: VertexSet, b: VertexSet) -> int:
        if a & b:
            raise ValueError("sets overlap")
        return sum((self.adj[u] & b).bit_count() for u in iter_bits(a))

    def count_edges_within(self, s: VertexSet) -> int:
        return sum((self.adj[u] & s).bit_count() for u in iter_bits(s)) // 2

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"


def union(g1: Graph, g2: Graph) -> Graph:
    """Edge-set union of two graphs on the same vertex universe."""
    if g1.n != g2.n:
        raise ValueError(f"vertex count mismatch: {g1.n} != {g2.n}")
    return Graph(g1.n, [a | b for a, b in zip(g1.adj, g2.adj)])


def induced(g: Graph, s: VertexSet) -> tuple[Graph, list[int]]:
    """Subgraph induced by s, relabeled 0..|s|-1, plus the map back to g."""
    if s >> g.n:
        raise ValueError("set mentions vertices outside the graph")
    index_map = list(iter_bits(s))
    pos = {v: i for i, v in enumerate(index_map)}
    adj = [0] * len(index_map)
    for i, v in enumerate(index_map):
        for w in iter_bits(g.adj[v] & s):
            adj[i] |= 1 << pos[w]
    return Graph(len(index_map), adj), index_map


def read_edge_list(path) -> Graph:
    """Read the text format: first line 'n m', then m lines 'u v' with u < v."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("expected header 'n m'")
        n, m = int(header[0]), int(header[1])
        adj = [0] * n
        seen = 0
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"bad edge line: {line!r}")
            u, v = int(parts[0]), int(parts[1])
            if not (0 <= u < v < n):
                raise ValueError(f"edge ({u},{v}) violates 0 <= u < v < n")
            if (adj[u] >> v) & 1:
                raise ValueError(f"duplicate edge ({u},{v})")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
            seen += 1
        if seen != m:
            raise ValueError(f"header says {m} edges, file has {seen}")
    return Graph(n, adj)


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.edge_count}\n")
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")
