"""Constructive triangle-packing procedures.

Every probabilistic pipeline returns a PackResult carrying the packing, the
union of all random edges it revealed, and per-stage diagnostics. Packings are
validated against host-union-revealed before returning, so a PackResult never
contains a phantom triangle. Reveal budgets are honest: within one invocation
the per-pair probability across all reveal rounds never exceeds the caller's p
(rounds use exact splits 1-(1-p)^x with exponents summing to at most 1, or act
on disjoint pair sets).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import Graph, VertexSet, bits, induced, iter_bits, lowest_bit, union
from .oracle import (
    Matching,
    TrianglePacking,
    greedy_triangle_packing,
    max_bipartite_matching,
)
from .regularity import is_super_regular
from .rng import Stream, bernoulli_indices, derive, split_probability, split_probability_weighted
from .stability import find_stable_partition, verify_stability
from .util import as_fraction


@dataclass
class PackResult:
    packing: TrianglePacking
    revealed: Graph
    diagnostics: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.packing.size


@dataclass
class MatchingResult:
    matching: Matching
    revealed: Graph
    diagnostics: dict = field(default_factory=dict)


@dataclass
class StarFamily:
    """Vertex-disjoint stars (center, leaves bitmask) with declared leaf-count
    bounds leaf_lower <= g_K <= leaf_upper."""

    stars: list[tuple[int, VertexSet]]
    host: Graph | None = None
    leaf_lower: float = 2.0
    leaf_upper: float = float("inf")

    @property
    def size(self) -> int:
        return len(self.stars)

    def leaf_total(self) -> int:
        return sum(leaves.bit_count() for _, leaves in self.stars)

    def covered_mask(self) -> int:
        m = 0
        for c, leaves in self.stars:
            m |= (1 << c) | leaves
        return m

    def validate(self, g: Graph | None = None) -> None:
        g = g if g is not None else self.host
        used = 0
        lo = max(2, math.ceil(self.leaf_lower - 1e-9))
        hi = max(lo, math.floor(self.leaf_upper + 1e-9))
        for c, leaves in self.stars:
            if (leaves >> c) & 1:
                raise ValueError(f"center {c} appears among its own leaves")
            smask = (1 << c) | leaves
            if used & smask:
                raise ValueError(f"star at {c} overlaps another star")
            used |= smask
            if g is not None and leaves & ~g.adj[c]:
                raise ValueError(f"star at {c} has a non-adjacent leaf")
            k = leaves.bit_count()
            if not lo <= k <= hi:
                raise ValueError(f"star at {c} has {k} leaves outside [{lo},{hi}]")


@dataclass
class Cherry:
    """Center set v with leaf sets u, w; (v,u) and (v,w) are the worked pairs."""

    u: VertexSet
    v: VertexSet
    w: VertexSet
    host: Graph

    def validate(self) -> None:
        if (self.u & self.v) or (self.u & self.w) or (self.v & self.w):
            raise ValueError("cherry sets overlap")
        if self.u.bit_count() != self.w.bit_count():
            raise ValueError("leaf sets must have equal size")


@dataclass
class AuxH:
    """Bipartite auxiliary graph between matching-edge slots and center
    vertices: slot i is adjacent to v iff both endpoints of edge i see v."""

    graph: Graph
    m_edges: list[tuple[int, int]]
    v_list: list[int]

    def m_side(self) -> VertexSet:
        return (1 << len(self.m_edges)) - 1

    def v_side(self) -> VertexSet:
        return (((1 << len(self.v_list)) - 1) << len(self.m_edges))


def _lowest_edge_within(overlay: Graph, mask: VertexSet) -> tuple[int, int] | None:
    for x in iter_bits(mask):
        rest = overlay.adj[x] & mask & ~((1 << (x + 1)) - 1)
        if rest:
            return x, lowest_bit(rest)
    return None


def _lowest_edge_between(overlay: Graph, xmask: VertexSet, ymask: VertexSet) -> tuple[int, int] | None:
    for x in iter_bits(xmask):
        hit = overlay.adj[x] & ymask
        if hit:
            return x, lowest_bit(hit)
    return None


def _accumulate(rev: list[int], g: Graph) -> None:
    for i, row in enumerate(g.adj):
        rev[i] |= row


def _finish(g: Graph, triples, rev: list[int], diagnostics: dict) -> PackResult:
    revealed = Graph(g.n, rev)
    host = union(g, revealed)
    packing = TrianglePacking(sorted(triples), host=host)
    packing.validate()
    return PackResult(packing, revealed, diagnostics)


# ---------------------------------------------------------------------------
# greedy covering


def greedy_cover(
    g: Graph, targets: VertexSet, pool: VertexSet, overlay: Graph
) -> tuple[TrianglePacking, VertexSet]:
    """Cover each target v by a triangle (v, x, y) with x, y unused pool
    neighbours of v and xy an overlay edge. Returns the packing and the mask
    of targets left uncovered."""
    if targets & pool:
        raise ValueError("targets and pool must be disjoint")
    used = 0
    triples = []
    uncovered = 0
    for v in iter_bits(targets):
        cand = g.adj[v] & pool & ~used
        edge = _lowest_edge_within(overlay, cand)
        if edge is None:
            uncovered |= 1 << v
            continue
        x, y = edge
        triples.append(tuple(sorted((v, x, y))))
        used |= (1 << v) | (1 << x) | (1 << y)
    return TrianglePacking(triples), uncovered


# ---------------------------------------------------------------------------
# star machinery


def _star_window(m: int, eps: float, n: int) -> tuple[int, int]:
    lo = max(2, math.ceil(eps * m - 1e-9))
    hi = max(lo, math.floor(eps * math.sqrt(n) + 1e-9))
    return lo, hi


def find_star_move(
    g: Graph, stars: list[tuple[int, VertexSet]], covered: VertexSet, lo: int, hi: int
):
    """First applicable improving move in type order (grow, extend, recenter),
    lowest-index candidates first. Returns None at local optimality."""
    free = g.vertex_mask() & ~covered
    # (i) grow a new star from an uncovered vertex
    for c in iter_bits(free):
        avail = g.adj[c] & free & ~(1 << c)
        k = avail.bit_count()
        if k >= lo:
            leaves = 0
            take = min(k, hi)
            for leaf in iter_bits(avail):
                leaves |= 1 << leaf
                take -= 1
                if not take:
                    break
            return ("grow", c, leaves)
    # (ii) extend a star below the cap
    order = sorted(range(len(stars)), key=lambda i: stars[i][0])
    for i in order:
        c, leaves = stars[i]
        if leaves.bit_count() < hi:
            cand = g.adj[c] & free
            if cand:
                return ("extend", i, lowest_bit(cand))
    # (iii) recenter: a leaf with enough uncovered neighbours starts its own star
    for i in order:
        c, leaves = stars[i]
        gk = leaves.bit_count()
        for v in iter_bits(leaves):
            avail = g.adj[v] & free
            k = avail.bit_count()
            if gk < hi and min(k, hi) >= gk + 1:
                new_leaves = 0
                take = min(k, hi)
                for leaf in iter_bits(avail):
                    new_leaves |= 1 << leaf
                    take -= 1
                    if not take:
                        break
                return ("dissolve", i, v, new_leaves)
            if gk == hi and gk - 1 >= lo and k >= hi:
                new_leaves = 0
                take = hi
                for leaf in iter_bits(avail):
                    new_leaves |= 1 << leaf
                    take -= 1
                    if not take:
                        break
                return ("detach", i, v, new_leaves)
    return None


def find_star_family(g: Graph, m: int, eps: float, s: int = 8) -> StarFamily:
    """Vertex-disjoint stars with leaf counts in [eps*m, eps*sqrt(n)] by local
    search over the three improving moves; the sum of squared leaf counts
    strictly increases each move, so the loop terminates at a local optimum."""
    n = g.n
    if eps <= 0:
        raise ValueError("eps must be positive")
    if g.min_degree() < m:
        raise ValueError("minimum degree below m")
    if g.max_degree() * 2 >= n and n > 4:
        raise ValueError("maximum degree must be below n/2")
    lo, hi = _star_window(m, eps, n)
    stars: list[tuple[int, VertexSet]] = []
    covered = 0
    sum_sq = 0
    while True:
        move = find_star_move(g, stars, covered, lo, hi)
        if move is None:
            break
        if move[0] == "grow":
            _, c, leaves = move
            stars.append((c, leaves))
            gained = leaves.bit_count() ** 2
            covered |= (1 << c) | leaves
        elif move[0] == "extend":
            _, i, leaf = move
            c, leaves = stars[i]
            gained = (leaves.bit_count() + 1) ** 2 - leaves.bit_count() ** 2
            stars[i] = (c, leaves | (1 << leaf))
            covered |= 1 << leaf
        elif move[0] == "dissolve":
            _, i, v, new_leaves = move
            c, leaves = stars[i]
            gained = new_leaves.bit_count() ** 2 - leaves.bit_count() ** 2
            covered &= ~((1 << c) | leaves)
            stars[i] = (v, new_leaves)
            covered |= (1 << v) | new_leaves
        else:  # detach
            _, i, v, new_leaves = move
            c, leaves = stars[i]
            old = leaves.bit_count()
            stars[i] = (c, leaves & ~(1 << v))
            stars.append((v, new_leaves))
            gained = (old - 1) ** 2 + new_leaves.bit_count() ** 2 - old**2
            covered |= new_leaves | (1 << v)
        if gained <= 0:
            raise AssertionError("star move did not increase the potential")
        sum_sq += gained
    stars.sort()
    fam = StarFamily(stars, host=g, leaf_lower=max(2.0, eps * m), leaf_upper=eps * math.sqrt(n))
    fam.validate()
    return fam


def stars_to_triangles(g: Graph, stars: StarFamily, p: float, seed: int) -> PackResult:
    """Dyadic bucketing completion: truncate the stars of bucket i to exactly
    ceil(2^(i-1) * leaf_lower) leaves, reveal random edges inside each leaf
    set with probability p, and emit one triangle per star whose leaf set got
    an edge."""
    lower = stars.leaf_lower
    rev = [0] * g.n
    triples = []
    bucket_sizes: dict[int, int] = {}
    completed = 0
    for k, (c, leaves) in enumerate(stars.stars):
        gk = leaves.bit_count()
        if gk < 2:
            continue
        i = max(1, math.floor(math.log2(gk / lower + 1e-12)) + 1)
        trunc = max(2, math.ceil(2 ** (i - 1) * lower - 1e-9))
        trunc = min(trunc, gk)
        bucket_sizes[i] = bucket_sizes.get(i, 0) + 1
        kept = []
        for leaf in iter_bits(leaves):
            kept.append(leaf)
            if len(kept) == trunc:
                break
        pairs = [(kept[a], kept[b]) for a in range(len(kept)) for b in range(a + 1, len(kept))]
        hit = bernoulli_indices(derive(seed, "star", k), len(pairs), p)
        if hit.size:
            for h in hit.tolist():
                x, y = pairs[h]
                rev[x] |= 1 << y
                rev[y] |= 1 << x
            x, y = pairs[int(hit[0])]
            triples.append(tuple(sorted((c, x, y))))
            completed += 1
    diagnostics = {"completed": completed, "buckets": bucket_sizes, "p": p}
    return _finish(g, triples, rev, diagnostics)


# ---------------------------------------------------------------------------
# max-cut and the round greedy


def max_cut_bipartition(g: Graph, initial: VertexSet | None = None) -> tuple[VertexSet, VertexSet]:
    """Local-move maximum cut: move any vertex with more same-side than
    cross-side neighbours until none exists. At the fixed point every vertex
    has cross-degree >= deg/2."""
    n = g.n
    full = g.vertex_mask()
    a = initial if initial is not None else bits(range(0, n, 2))
    a &= full
    changed = True
    while changed:
        changed = False
        for v in range(n):
            own = a if (a >> v) & 1 else full & ~a
            cross = (g.adj[v] & ~own).bit_count()
            if 2 * cross < g.degree(v):
                a ^= 1 << v
                changed = True
    return a, full & ~a


def round_greedy_triangles(
    g: Graph, m: int, p: float, seed: int, parts: tuple[VertexSet, VertexSet] | None = None
) -> PackResult:
    """Build triangles in t = ceil(m^2/2n) rounds of s = ceil(2n/m) each: pick
    s uncovered cut-side vertices with disjoint neighbour blocks, reveal
    random edges inside each block at q = p/t, one triangle per block hit."""
    n = g.n
    rev = [0] * n
    diagnostics: dict = {"warnings": []}
    if m <= 0 or n < 9:
        return _finish(g, [], rev, diagnostics)
    if not (math.sqrt(n) <= m <= n / 32):
        diagnostics["warnings"].append("m outside [sqrt(n), n/32]")
    if g.max_degree() >= n / 32:
        diagnostics["warnings"].append("max degree >= n/32")
    a, b = parts if parts is not None else max_cut_bipartition(g)
    if b.bit_count() < a.bit_count():
        a, b = b, a
    s = math.ceil(2 * n / m)
    t = math.ceil(m * m / (2 * n))
    q = min(1.0, p / t)
    blocksize = max(2, math.ceil(m / 16))
    diagnostics.update({"s": s, "t": t, "q": q, "blocksize": blocksize})
    a_used = 0
    b_used = 0
    triples = []
    stopped = False
    for rnd in range(t):
        b_avail = b & ~b_used
        bmax = max(blocksize, b_avail.bit_count() // s)
        selections = []
        block_used = 0
        for _ in range(s):
            pool = b_avail & ~block_used
            pick = None
            for v in iter_bits(a & ~a_used):
                nb = g.adj[v] & pool
                if nb.bit_count() >= blocksize:
                    pick = (v, nb)
                    break
            if pick is None:
                diagnostics["round_shortfall"] = {"round": rnd, "selected": len(selections)}
                stopped = True
                break
            v, nb = pick
            block = 0
            take = min(bmax, nb.bit_count())
            for x in iter_bits(nb):
                block |= 1 << x
                take -= 1
                if not take:
                    break
            selections.append((v, block))
            block_used |= block
            a_used |= 1 << v
        for j, (v, block) in enumerate(selections):
            members = list(iter_bits(block))
            pairs = [
                (members[i1], members[i2])
                for i1 in range(len(members))
                for i2 in range(i1 + 1, len(members))
            ]
            hit = bernoulli_indices(derive(seed, "rg", rnd, j), len(pairs), q)
            if hit.size:
                for h in hit.tolist():
                    x, y = pairs[h]
                    rev[x] |= 1 << y
                    rev[y] |= 1 << x
                x, y = pairs[int(hit[0])]
                triples.append(tuple(sorted((v, x, y))))
                b_used |= (1 << x) | (1 << y)
        if stopped:
            break
    diagnostics["a_used"] = a_used.bit_count()
    diagnostics["b_used"] = b_used.bit_count()
    return _finish(g, triples, rev, diagnostics)


# ---------------------------------------------------------------------------
# sublinear dispatcher


def sublinear_pack(
    g: Graph, m: int, p: float, seed: int, eps: float | None = None, s: int = 8
) -> PackResult:
    """Find m disjoint triangles when m <= n/256: cover high-degree vertices
    greedily, else route the low-degree remainder through overlay harvesting,
    the star machinery, or the round greedy, then top up from the removed
    high-degree vertices."""
    n = g.n
    rev = [0] * n
    diagnostics: dict = {}
    if m <= 0 or n < 9:
        return _finish(g, [], rev, diagnostics)
    q = split_probability(p, 4)
    diagnostics["round_p"] = q
    high = bits(v for v in range(n) if g.degree(v) >= n / 64)
    diagnostics["high_degree"] = high.bit_count()
    triples: list[tuple[int, int, int]] = []
    used = 0

    def cover_from_high(overlay: Graph, budget: int) -> int:
        nonlocal used
        made = 0
        for v in iter_bits(high & ~used):
            if made >= budget:
                break
            cand = g.adj[v] & ~used & ~high & ~(1 << v)
            edge = _lowest_edge_within(overlay, cand)
            if edge is None:
                cand = g.adj[v] & ~used & ~(1 << v)
                edge = _lowest_edge_within(overlay, cand)
            if edge is None:
                continue
            x, y = edge
            triples.append(tuple(sorted((v, x, y))))
            used |= (1 << v) | (1 << x) | (1 << y)
            made += 1
        return made

    overlay1 = None
    if high.bit_count() >= m:
        from .generators import gnp

        overlay1 = gnp(n, q, derive(seed, "sub", 1))
        _accumulate(rev, overlay1)
        made = cover_from_high(overlay1, m)
        diagnostics["route"] = "high-degree greedy"
        diagnostics["greedy_covered"] = made
        return _finish(g, triples, rev, diagnostics)

    rest = g.vertex_mask() & ~high
    n_rest = rest.bit_count()
    m_rest = m - high.bit_count()
    g_rest, back = induced(g, rest)
    route = None
    if m_rest > 0:
        tiny_thr = min(math.log(max(n_rest, 3)) ** 3, math.sqrt(n_rest) / 2)
        if m_rest <= tiny_thr:
            route = "harvest"
            from .generators import gnp

            overlay2 = gnp(n, q, derive(seed, "sub", 2))
            _accumulate(rev, overlay2)
            harvested = greedy_triangle_packing(overlay2, within=rest, limit=m_rest)
            triples.extend(harvested.triples)
            used |= harvested.vertex_mask()
        elif m_rest <= math.sqrt(n_rest):
            route = "stars"
            eps_val = eps if eps is not None else min(0.9, 2.0 / m_rest)
            fam = find_star_family(g_rest, m_rest, eps_val, s)
            sub = stars_to_triangles(g_rest, fam, q, derive(seed, "sub", 3))
            for (x, y, z) in sub.packing.triples:
                triples.append(tuple(sorted((back[x], back[y], back[z]))))
            for i, row in enumerate(sub.revealed.adj):
                for j in iter_bits(row):
                    rev[back[i]] |= 1 << back[j]
            used |= bits(back[v] for v in iter_bits(sub.packing.vertex_mask()))
            diagnostics["stars"] = sub.diagnostics
        else:
            route = "round-greedy"
            sub = round_greedy_triangles(g_rest, m_rest, q, derive(seed, "sub", 4))
            for (x, y, z) in sub.packing.triples:
                triples.append(tuple(sorted((back[x], back[y], back[z]))))
            for i, row in enumerate(sub.revealed.adj):
                for j in iter_bits(row):
                    rev[back[i]] |= 1 << back[j]
            used |= bits(back[v] for v in iter_bits(sub.packing.vertex_mask()))
            diagnostics["round_greedy"] = sub.diagnostics
    diagnostics["route"] = route
    if len(triples) < m and high:
        from .generators import gnp

        if overlay1 is None:
            overlay1 = gnp(n, q, derive(seed, "sub", 1))
            _accumulate(rev, overlay1)
        diagnostics["topped_up"] = cover_from_high(overlay1, m - len(triples))
    diagnostics["achieved"] = len(triples)
    return _finish(g, triples, rev, diagnostics)


# ---------------------------------------------------------------------------
# auxiliary graphs F and H

def _mask_rows_to_matrix(g: Graph, rows: list[int], cols: list[int]) -> np.ndarray:
    """0/1 matrix of adjacency between rows and cols."""
    nbytes = (g.n + 7) // 8
    out = np.zeros((len(rows), g.n), dtype=np.uint8)
    for i, v in enumerate(rows):
        raw = np.frombuffer(g.adj[v].to_bytes(nbytes, "little"), dtype=np.uint8)
        out[i] = np.unpackbits(raw, bitorder="little")[: g.n]
    return out[:, cols]


def build_F(g: Graph, u: VertexSet, w: VertexSet, v: VertexSet, d: float) -> Graph:
    """Good-pair graph: uw is an edge iff u and w share at least d^2*|v|/2
    common neighbours inside v."""
    if (u & w) or (u & v) or (w & v):
        raise ValueError("u, w, v must be pairwise disjoint")
    u_list = list(iter_bits(u))
    w_list = list(iter_bits(w))
    v_list = list(iter_bits(v))
    thr = d * d * len(v_list) / 2
    adj = [0] * g.n
    if u_list and w_list and v_list:
        mat_u = _mask_rows_to_matrix(g, u_list, v_list).astype(np.int32)
        mat_w = _mask_rows_to_matrix(g, w_list, v_list).astype(np.int32)
        common = mat_u @ mat_w.T
        good = common >= thr - 1e-9
        for i, x in enumerate(u_list):
            row = good[i]
            if row.any():
                mask = 0
                for j in np.nonzero(row)[0]:
                    mask |= 1 << w_list[int(j)]
                adj[x] |= mask
                for j in np.nonzero(row)[0]:
                    adj[w_list[int(j)]] |= 1 << x
    return Graph(g.n, adj)


def good_for_x(g: Graph, f: Graph, x: VertexSet, d: float) -> Graph:
    """Subgraph of F keeping the edges uw with at least d^2*|x|/2 common
    neighbours inside x."""
    thr = d * d * x.bit_count() / 2
    adj = [0] * f.n
    for (p_, q_) in f.edges():
        if (g.adj[p_] & g.adj[q_] & x).bit_count() >= thr - 1e-9:
            adj[p_] |= 1 << q_
            adj[q_] |= 1 << p_
    return Graph(f.n, adj)


def build_H(g: Graph, matching: Matching, v: VertexSet) -> AuxH:
    """Auxiliary bipartite graph between matching-edge slots and v."""
    matching.validate(g=None)
    if matching.vertex_mask() & v:
        raise ValueError("matching endpoints must lie outside v")
    v_list = list(iter_bits(v))
    pos = {z: j for j, z in enumerate(v_list)}
    nm = len(matching.edges)
    adj = [0] * (nm + len(v_list))
    for i, (x, y) in enumerate(matching.edges):
        for z in iter_bits(g.adj[x] & g.adj[y] & v):
            j = nm + pos[z]
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return AuxH(Graph(nm + len(v_list), adj), list(matching.edges), v_list)


def random_greedy_matching(f: Graph, reveal_p: float, target: int, seed: int) -> MatchingResult:
    """Reveal each F-edge independently with probability reveal_p, then run
    the uniform random greedy process until `target` edges are chosen or no
    edge remains. Edges are reported in pick order."""
    edges = list(f.edges())
    hit = bernoulli_indices(derive(seed, "reveal"), len(edges), reveal_p)
    revealed_edges = [edges[k] for k in hit.tolist()]
    rev = [0] * f.n
    for (x, y) in revealed_edges:
        rev[x] |= 1 << y
        rev[y] |= 1 << x
    rng = Stream(derive(seed, "pick"))
    avail = revealed_edges
    chosen: list[tuple[int, int]] = []
    used = 0
    while len(chosen) < target and avail:
        x, y = avail[rng.randrange(len(avail))]
        chosen.append((x, y))
        used |= (1 << x) | (1 << y)
        avail = [e for e in avail if not (used & ((1 << e[0]) | (1 << e[1])))]
    diagnostics = {
        "target": target,
        "achieved": len(chosen),
        "revealed_edges": len(revealed_edges),
    }
    return MatchingResult(Matching(chosen), Graph(f.n, rev), diagnostics)


# ---------------------------------------------------------------------------
# cherry factors

BALANCED_LEFTOVER = 2.0 / 3.0  # fraction finished by the Hall stage
BALANCED_SPLIT = (0.15, 0.85)  # reveal-budget exponents (greedy stage, Hall stage)


def _complete_matching_from_revealed(
    mres: MatchingResult, u: VertexSet, w: VertexSet, target: int
) -> Matching:
    """If the random greedy process stalled short of target, extract a maximum
    matching from the edges it already revealed (augmenting paths only; no new
    randomness) and keep its first `target` edges."""
    m = mres.matching
    if m.size >= target:
        return Matching(m.edges[:target])
    full = max_bipartite_matching(mres.revealed, u, w)
    if full.size <= m.size:
        return m
    mres.diagnostics["augmented_to"] = min(full.size, target)
    return Matching(full.edges[:target])


def _triangles_from_h(
    h: AuxH, hm: Matching
) -> tuple[list[tuple[int, int, int]], VertexSet]:
    triples = []
    used_v = 0
    nm = len(h.m_edges)
    for (slot, vpos) in hm.edges:
        x, y = h.m_edges[slot]
        z = h.v_list[vpos - nm]
        triples.append(tuple(sorted((x, y, z))))
        used_v |= 1 << z
    return triples, used_v


def cherry_factor(
    cherry: Cherry,
    p: float,
    mode: str,
    seed: int,
    d: float = 0.5,
    leftover: float = BALANCED_LEFTOVER,
    split: tuple[float, float] = BALANCED_SPLIT,
    delta0: float = 0.5,
    delta: float = 0.0,
) -> PackResult:
    """Triangle factor on a super-regular cherry with random leaf-leaf edges.

    balanced: |U| = |W| = |V|. Two-round reveal between U and W: random greedy
    matching to (1-leftover)|V| (super-regularity of (M,V) in H checked by the
    sampled tester, recorded in diagnostics), Hall-matching of the leftovers
    inside F via a second reveal, then a maximum matching in H over V.

    unbalanced: |U| = |W| < |V| with |U|+|V|+|W| divisible by 3. One reveal
    between U and W builds a matching trimmed to (4|U|-|V|)/3; leftovers are
    covered by triangles with two V-vertices revealed inside V; a perfect
    H-matching finishes.
    """
    cherry.validate()
    g = cherry.host
    n = g.n
    u, v, w = cherry.u, cherry.v, cherry.w
    nu, nv = u.bit_count(), v.bit_count()
    rev = [0] * n
    diagnostics: dict = {"mode": mode, "p": p}
    triples: list[tuple[int, int, int]] = []

    if mode == "balanced":
        if nu != nv:
            raise ValueError("balanced mode needs |U| = |W| = |V|")
        q1, q2 = split_probability_weighted(p, split)
        diagnostics["split"] = {"greedy": q1, "hall": q2}
        f = build_F(g, u, w, v, d)
        target1 = max(0, math.ceil((1.0 - leftover) * nv - 1e-9))
        mres = random_greedy_matching(f, q1, target1, derive(seed, "m1"))
        _accumulate(rev, mres.revealed)
        m1 = _complete_matching_from_revealed(mres, u, w, target1)
        diagnostics["greedy_matching"] = mres.diagnostics
        h1 = build_H(g, m1, v)
        if m1.size:
            sr = is_super_regular(
                h1.graph, h1.m_side(), h1.v_side(), 0.25, d**3 / 32,
                mode="sampled", trials=200, seed=derive(seed, "sr"),
            )
            diagnostics["trireg_check"] = {"ok": sr.ok, "reason": sr.reason}
        mvert = m1.vertex_mask()
        u2, w2 = u & ~mvert, w & ~mvert
        pairs2 = [e for e in f.edges() if ((u2 >> e[0]) & 1 and (w2 >> e[1]) & 1)
                  or ((w2 >> e[0]) & 1 and (u2 >> e[1]) & 1)]
        hit = bernoulli_indices(derive(seed, "m2"), len(pairs2), q2)
        g2adj = [0] * n
        for k in hit.tolist():
            x, y = pairs2[k]
            g2adj[x] |= 1 << y
            g2adj[y] |= 1 << x
            rev[x] |= 1 << y
            rev[y] |= 1 << x
        # round-1 reveals between the leftovers are already paid for; use them
        for x in iter_bits(u2 | w2):
            g2adj[x] |= mres.revealed.adj[x] & (u2 | w2)
        g2 = Graph(n, g2adj)
        m2 = max_bipartite_matching(g2, u2, w2)
        diagnostics["hall_matching"] = {"target": u2.bit_count(), "achieved": m2.size}
        combined = Matching(m1.edges + m2.edges)
        h = build_H(g, combined, v)
        hm = max_bipartite_matching(h.graph, h.m_side(), h.v_side())
        triples, _ = _triangles_from_h(h, hm)
        diagnostics["h_matching"] = {"target": len(combined.edges), "achieved": hm.size}
        diagnostics["full"] = len(triples) == nv
        return _finish(g, triples, rev, diagnostics)

    if mode == "unbalanced":
        if nu >= nv:
            raise ValueError("unbalanced mode needs |U| = |W| < |V|")
        if (nv - nu) % 3:
            raise ValueError("need |U|+|V|+|W| divisible by 3")
        ratio = Fraction(nu, nv)
        if not (1 - as_fraction(delta0)) <= ratio <= (1 - as_fraction(delta)):
            raise ValueError("leaf/center ratio outside the (delta0, delta) window")
        r = (nv - nu) // 3
        m_target = nu - r
        if m_target < 0:
            raise ValueError("center too large: (4|U|-|V|)/3 negative")
        diagnostics["leftover_per_side"] = r
        f = build_F(g, u, w, v, d)
        mres = random_greedy_matching(f, p, m_target, derive(seed, "m1"))
        _accumulate(rev, mres.revealed)
        m1 = _complete_matching_from_revealed(mres, u, w, m_target)
        diagnostics["greedy_matching"] = mres.diagnostics
        from .generators import reveal_within_pairs

        v_list = list(iter_bits(v))
        center_pairs = [
            (v_list[i], v_list[j])
            for i in range(len(v_list))
            for j in range(i + 1, len(v_list))
        ]
        g2 = reveal_within_pairs(n, center_pairs, p, derive(seed, "center"))
        _accumulate(rev, g2)
        mvert = m1.vertex_mask()
        leftovers = (u | w) & ~mvert
        cover, uncovered = greedy_cover(g, leftovers, v, g2)
        triples.extend(cover.triples)
        diagnostics["leftover_cover"] = {
            "target": leftovers.bit_count(),
            "uncovered": uncovered.bit_count(),
        }
        v_rem = v & ~cover.vertex_mask()
        h = build_H(g, m1, v_rem)
        hm = max_bipartite_matching(h.graph, h.m_side(), h.v_side())
        got, _ = _triangles_from_h(h, hm)
        triples.extend(got)
        diagnostics["h_matching"] = {"target": m1.size, "achieved": hm.size}
        diagnostics["full"] = len(triples) == (nv + 2 * nu) // 3
        return _finish(g, triples, rev, diagnostics)

    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class BalanceResult:
    packing: TrianglePacking
    cherry: Cherry
    diagnostics: dict


def balance_cherry(cherry: Cherry, delta0, overlay: Graph) -> BalanceResult:
    """Shrink the leaves relative to the center: remove 2m triangles, each
    with two center vertices and the third alternating U/W, where m is the
    smallest integer with |U| - m >= (1-delta0)(|V| - 4m)."""
    cherry.validate()
    g = cherry.host
    delta0 = as_fraction(delta0)
    nu = cherry.u.bit_count()
    nv = cherry.v.bit_count()
    denom = 4 * (1 - delta0) - 1
    if denom <= 0:
        raise ValueError("delta0 must be below 3/4")
    need = (1 - delta0) * nv - nu
    m = max(0, math.ceil(need / denom))
    diagnostics = {"m": m}
    u, v, w = cherry.u, cherry.v, cherry.w
    triples = []
    used = 0
    short = False
    for i in range(2 * m):
        side = u if i % 2 == 0 else w
        pick = None
        for x in iter_bits(side & ~used):
            cand = g.adj[x] & v & ~used
            edge = _lowest_edge_within(overlay, cand)
            if edge is not None:
                pick = (x, edge)
                break
        if pick is None:
            short = True
            diagnostics["shortfall_at"] = i
            break
        x, (y, z) = pick
        triples.append(tuple(sorted((x, y, z))))
        used |= (1 << x) | (1 << y) | (1 << z)
    new = Cherry(u & ~used, v & ~used, w & ~used, g)
    if not short:
        assert new.u.bit_count() >= (1 - delta0) * new.v.bit_count()
    packing = TrianglePacking(sorted(triples), host=union(g, overlay))
    packing.validate()
    return BalanceResult(packing, new, diagnostics)


# ---------------------------------------------------------------------------
# pair factor

PAIR_DELTA0 = Fraction(1, 6)
PAIR_DELTA = Fraction(1, 12)


def solve_split_probabilities(nu: int, nv: int, delta0=PAIR_DELTA0, delta=PAIR_DELTA) -> tuple[Fraction, Fraction]:
    """Split probabilities (q1 for the V side, q2 for the U side) making the
    expected cherry sizes satisfy E|U_i| = E|W_i| = (1-(delta0+delta)/2) E|V_i|."""
    delta0, delta = as_fraction(delta0), as_fraction(delta)
    c = 1 - (delta0 + delta) / 2
    denom = nu * (1 - 4 * c * c)
    if denom == 0:
        raise ValueError("degenerate split system")
    q2 = (c * nv - 2 * c * c * nu) / denom
    q1 = c * (1 - 2 * q2) * Fraction(nu, nv)
    for q in (q1, q2):
        if not 0 < q < Fraction(1, 2):
            raise ValueError(f"split probability {float(q):.4f} out of (0, 1/2)")
    return q1, q2


def _exact_size_split(items: list[int], sizes: list[int], rng: Stream) -> list[list[int]]:
    shuffled = list(items)
    rng.shuffle(shuffled)
    out = []
    at = 0
    for s_ in sizes:
        out.append(sorted(shuffled[at : at + s_]))
        at += s_
    return out


def pair_factor(
    g: Graph,
    u: VertexSet,
    v: VertexSet,
    p: float,
    seed: int,
    d: float = 0.5,
    delta0=PAIR_DELTA0,
    delta=PAIR_DELTA,
) -> PackResult:
    """Triangle factor on a dense pair (U,V): split into two unbalanced
    cherries (V supplies one center and one pair of leaves, U the other) and
    factor each with the unbalanced cherry machinery."""
    if u & v:
        raise ValueError("u and v overlap")
    nu, nv = u.bit_count(), v.bit_count()
    if not 3 * nv <= 4 * nu or nu > nv:
        raise ValueError("need 3|v|/4 <= |u| <= |v|")
    if (nu + nv) % 3:
        raise ValueError("need |u| + |v| divisible by 3")
    q1, q2 = solve_split_probabilities(nu, nv, delta0, delta)
    delta0f, deltaf = as_fraction(delta0), as_fraction(delta)

    u1_star = round(q2 * nu)
    u2_star = round(q1 * nv)

    def admissible(u1: int, u2: int) -> bool:
        v1 = nv - 2 * u2
        v2 = nu - 2 * u1
        if u1 < 1 or u2 < 1 or v1 < 1 or v2 < 1:
            return False
        if (v1 - u1) % 3 or (v2 - u2) % 3:
            return False
        if not (1 - delta0f) * v1 <= u1 <= (1 - deltaf) * v1:
            return False
        if not (1 - delta0f) * v2 <= u2 <= (1 - deltaf) * v2:
            return False
        return True

    found = None
    for radius in range(0, 13):
        for du in range(-radius, radius + 1):
            for dv in range(-radius, radius + 1):
                if max(abs(du), abs(dv)) != radius:
                    continue
                u1, u2 = u1_star + du, u2_star + dv
                if admissible(u1, u2):
                    found = (u1, u2)
                    break
            if found:
                break
        if found:
            break
    if found is None:
        raise ValueError("no admissible integer split near the expected sizes")
    u1, u2 = found
    v1 = nv - 2 * u2
    v2 = nu - 2 * u1

    rng = Stream(derive(seed, "split"))
    set_u2, set_w2, set_v1 = _exact_size_split(list(iter_bits(v)), [u2, u2, v1], rng)
    set_u1, set_w1, set_v2 = _exact_size_split(list(iter_bits(u)), [u1, u1, v2], rng)
    cherry1 = Cherry(bits(set_u1), bits(set_v1), bits(set_w1), g)
    cherry2 = Cherry(bits(set_u2), bits(set_v2), bits(set_w2), g)

    res1 = cherry_factor(
        cherry1, p, "unbalanced", derive(seed, 1), d=d, delta0=1.0, delta=0.0
    )
    res2 = cherry_factor(
        cherry2, p, "unbalanced", derive(seed, 2), d=d, delta0=1.0, delta=0.0
    )
    rev = [0] * g.n
    _accumulate(rev, res1.revealed)
    _accumulate(rev, res2.revealed)
    triples = list(res1.packing.triples) + list(res2.packing.triples)
    diagnostics = {
        "q1": float(q1),
        "q2": float(q2),
        "cherry1": {"sizes": (u1, v1, u1), **res1.diagnostics},
        "cherry2": {"sizes": (u2, v2, u2), **res2.diagnostics},
        "full": res1.diagnostics.get("full") and res2.diagnostics.get("full"),
    }
    return _finish(g, triples, rev, diagnostics)


# ---------------------------------------------------------------------------
# the extremal pipeline


def _park_by_cut_degree(g: Graph, side: VertexSet, other: VertexSet, count: int) -> VertexSet:
    """Pick `count` vertices of `side` with the smallest cut degrees."""
    ordered = sorted(iter_bits(side), key=lambda x: ((g.adj[x] & other).bit_count(), x))
    return bits(ordered[:count])


def extremal_pack(
    g: Graph,
    a: VertexSet,
    b: VertexSet,
    alpha,
    beta,
    p: float,
    seed: int,
    d: float = 0.5,
) -> PackResult:
    """Packing pipeline for stable partitions: balance |B| to 2|A| (parking or
    packing inside B, or greedy (2A,1B) triangles), cover low-cut-degree
    vertices with (1A,2B) triangles, then run the balanced cherry factor on an
    arbitrary split of the remaining B."""
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    n = g.n
    rev = [0] * n
    diagnostics: dict = {}
    report = verify_stability(g, a, b, alpha, beta)
    diagnostics["stability_holds"] = report.holds
    size_a, size_b = a.bit_count(), b.bit_count()
    ceil_an = math.ceil(alpha * n)
    floor_rest = n - ceil_an
    k3 = n - 3 * ceil_an  # 3*kappa, an integer
    w_park = max(k3, 0)
    delta_g = g.min_degree()
    m0_3 = max(n - 3 * delta_g, n - 3 * math.floor(alpha * n))

    case_excess_b = size_b > floor_rest
    if case_excess_b:
        m_x = size_b - floor_rest
        need_sub = 3 * m_x > m0_3 - k3
        need_greedy_stage1 = False
    else:
        m_x = size_a - ceil_an
        need_sub = False
        need_greedy_stage1 = m_x >= 1

    # conservative upfront estimate of stage-2 needs, before any reveal
    removal_bound = max(0, m0_3) + 3 * max(1, math.ceil(beta * n))
    thr_a = size_b - 7 * beta * n + removal_bound
    thr_b = size_a - 7 * beta * n + removal_bound
    need_greedy_stage2 = any(
        (g.adj[x] & b).bit_count() <= thr_a for x in iter_bits(a)
    ) or any((g.adj[x] & a).bit_count() <= thr_b for x in iter_bits(b))
    need_greedy = need_greedy_stage1 or need_greedy_stage2

    rounds = []
    weights = []
    if need_sub:
        rounds.append("sub")
        weights.append(1.0)
    if need_greedy:
        rounds.append("greedy")
        weights.append(1.0)
    rounds.append("cherry")
    weights.append(2.0)
    qs = dict(zip(rounds, split_probability_weighted(p, weights)))
    diagnostics["rounds"] = {k: float(q) for k, q in qs.items()}

    overlay_greedy = None
    if need_greedy:
        from .generators import gnp

        overlay_greedy = gnp(n, qs["greedy"], derive(seed, "greedy"))
        _accumulate(rev, overlay_greedy)
    else:
        overlay_greedy = Graph.empty(n)

    triples: list[tuple[int, int, int]] = []
    parked = 0

    # ---- stage 1: balance |B1| = 2|A1| + w
    if case_excess_b:
        t1 = 0
        if need_sub:
            t1 = (3 * m_x - (m0_3 - k3)) // 3
            g_b, back = induced(g, b)
            sub = sublinear_pack(g_b, t1, qs["sub"], derive(seed, "sub"))
            for (x, y, z) in sub.packing.triples:
                triples.append(tuple(sorted((back[x], back[y], back[z]))))
            for i, row in enumerate(sub.revealed.adj):
                for j in iter_bits(row):
                    rev[back[i]] |= 1 << back[j]
            diagnostics["stage1_sub"] = {"target": t1, "achieved": sub.size}
            t1 = sub.size
        covered = bits(x for t in triples for x in t)
        park_count = size_b - 3 * t1 - 2 * size_a - w_park
        parked |= _park_by_cut_degree(g, b & ~covered, a, park_count)
    else:
        made = 0
        used_now = 0
        if m_x >= 1:
            for x in iter_bits(b):
                if made >= m_x:
                    break
                if (used_now >> x) & 1:
                    continue
                cand = g.adj[x] & a & ~used_now
                edge = _lowest_edge_within(overlay_greedy, cand)
                if edge is None:
                    continue
                y, z = edge
                triples.append(tuple(sorted((x, y, z))))
                used_now |= (1 << x) | (1 << y) | (1 << z)
                made += 1
            diagnostics["stage1_greedy"] = {"target": m_x, "achieved": made}
        covered = bits(x for t in triples for x in t)
        if k3 < 0:
            parked |= _park_by_cut_degree(g, a & ~covered, b, 1)
            if k3 == -1:
                parked |= _park_by_cut_degree(g, b & ~covered, a, 1)
        if made < m_x:
            # keep |B1| = 2|A1| + w by parking the excess A-vertices unserved
            shortfall = m_x - made
            parked |= _park_by_cut_degree(g, a & ~covered & ~parked, b, 2 * shortfall)
            parked |= _park_by_cut_degree(g, b & ~covered & ~parked, a, shortfall)

    covered = bits(x for t in triples for x in t)
    a1 = a & ~covered & ~parked
    b1 = b & ~covered & ~parked
    n_a1, n_b1 = a1.bit_count(), b1.bit_count()
    diagnostics["stage1"] = {"|A1|": n_a1, "|B1|": n_b1, "parked": parked.bit_count(), "w": w_park}
    if n_b1 != 2 * n_a1 + w_park:
        # trim whichever side is long so the cherry stage still applies
        excess = n_b1 - 2 * n_a1 - w_park
        if excess > 0:
            more = _park_by_cut_degree(g, b1, a1, excess)
            b1 &= ~more
            parked |= more
        else:
            more = _park_by_cut_degree(g, a1, b1, (-excess + 1) // 2)
            a1 &= ~more
            parked |= more
            n_a1, n_b1 = a1.bit_count(), b1.bit_count()
            extra = n_b1 - 2 * n_a1 - w_park
            if extra > 0:
                more = _park_by_cut_degree(g, b1, a1, extra)
                b1 &= ~more
                parked |= more
        n_a1, n_b1 = a1.bit_count(), b1.bit_count()
        diagnostics["stage1"]["rebalanced"] = (n_a1, n_b1)

    # ---- stage 2: cover the low-cut-degree vertices with (1A,2B) triangles
    thr1 = n_b1 - 7 * beta * n
    thr2 = n_a1 - 7 * beta * n
    tilde_a = bits(x for x in iter_bits(a1) if (g.adj[x] & b1).bit_count() <= thr1)
    tilde_b = bits(x for x in iter_bits(b1) if (g.adj[x] & a1).bit_count() <= thr2)
    diagnostics["stage2"] = {"tilde_a": tilde_a.bit_count(), "tilde_b": tilde_b.bit_count()}
    used2 = 0
    if tilde_a:
        cover, uncovered = greedy_cover(g, tilde_a, b1 & ~tilde_b, overlay_greedy)
        triples.extend(cover.triples)
        used2 |= cover.vertex_mask()
        if uncovered:
            diagnostics["stage2"]["uncovered_a"] = uncovered.bit_count()
            parked |= uncovered
            extra = _park_by_cut_degree(
                g, b1 & ~tilde_b & ~used2 & ~parked, a1, 2 * uncovered.bit_count()
            )
            parked |= extra
    if tilde_b:
        un_b = 0
        for x in iter_bits(tilde_b & ~used2):
            ca = g.adj[x] & (a1 & ~tilde_a) & ~used2 & ~parked
            cb = g.adj[x] & (b1 & ~tilde_b) & ~used2 & ~parked
            edge = _lowest_edge_between(overlay_greedy, ca, cb)
            if edge is None:
                un_b |= 1 << x
                continue
            y, z = edge
            triples.append(tuple(sorted((x, y, z))))
            used2 |= (1 << x) | (1 << y) | (1 << z)
        if un_b:
            diagnostics["stage2"]["uncovered_b"] = un_b.bit_count()
            parked |= un_b
            # each parked B-vertex unbalances by one: park sibling pairs
            k = un_b.bit_count()
            park_b = _park_by_cut_degree(g, b1 & ~used2 & ~parked & ~tilde_b, a1, k)
            parked |= park_b
            park_a = _park_by_cut_degree(g, a1 & ~used2 & ~parked & ~tilde_a, b1, k)
            parked |= park_a

    covered = bits(x for t in triples for x in t)
    a2 = a1 & ~covered & ~parked
    b2 = b1 & ~covered & ~parked
    n_a2, n_b2 = a2.bit_count(), b2.bit_count()
    diagnostics["stage2"]["|A2|"] = n_a2
    diagnostics["stage2"]["|B2|"] = n_b2

    # ---- stage 3: split B2 and run the balanced cherry
    if n_a2 > 0 and n_b2 >= 2 * n_a2:
        b2_list = list(iter_bits(b2))
        b2p = bits(b2_list[:n_a2])
        b2pp = bits(b2_list[n_a2 : 2 * n_a2])
        w_prime = bits(b2_list[2 * n_a2 :])
        diagnostics["stage3_wprime"] = w_prime.bit_count()
        cherry = Cherry(b2p, a2, b2pp, g)
        res = cherry_factor(cherry, qs["cherry"], "balanced", derive(seed, "cherry"), d=d)
        _accumulate(rev, res.revealed)
        triples.extend(res.packing.triples)
        diagnostics["stage3"] = res.diagnostics
    diagnostics["achieved"] = len(triples)
    return _finish(g, triples, rev, diagnostics)


# ---------------------------------------------------------------------------
# the top-level portfolio


def perturbed_pack(g: Graph, p: float, seed: int, alpha=None, beta=None) -> PackResult:
    """Find min(delta(G), floor(n/3)) disjoint triangles in g plus random
    edges: sublinear route for small targets, the extremal pipeline behind a
    verified stable partition, and otherwise a portfolio returning the largest
    packing found. The result is validated and may fall short of the target
    (reported in diagnostics)."""
    n = g.n
    delta_g = g.min_degree()
    m = min(delta_g, n // 3)
    if n < 9 or m == 0:
        return _finish(g, [], [0] * n, {"route": "degenerate", "target": m})
    if m <= n / 256:
        res = sublinear_pack(g, m, p, seed)
        res.diagnostics["route"] = "sublinear"
        res.diagnostics["target"] = m
        return res
    alpha = as_fraction(alpha) if alpha is not None else min(Fraction(1, 3), Fraction(m, n))
    beta = as_fraction(beta) if beta is not None else alpha / 8
    part = find_stable_partition(g, alpha, beta)
    if part is not None:
        res = extremal_pack(g, part[0], part[1], alpha, beta, p, seed)
        res.diagnostics["route"] = "extremal"
        res.diagnostics["target"] = m
        return res

    from .generators import gnp

    q = split_probability(p, 3)
    candidates: list[PackResult] = []
    overlay = gnp(n, q, derive(seed, "pf-greedy"))
    host = union(g, overlay)
    greedy = greedy_triangle_packing(host)
    candidates.append(PackResult(greedy, overlay, {"candidate": "greedy"}))
    rg = round_greedy_triangles(g, m, q, derive(seed, "pf-rg"))
    rg.diagnostics["candidate"] = "round-greedy"
    candidates.append(rg)
    cut_a, cut_b = max_cut_bipartition(g)
    small, large = (cut_a, cut_b) if cut_a.bit_count() <= cut_b.bit_count() else (cut_b, cut_a)
    ns, nl = small.bit_count(), large.bit_count()
    if ns >= 3 and nl >= 3 and g.count_edges_between(small, large) >= 0.3 * ns * nl:
        # trim the large side into the admissible pair-factor window
        keep = min(nl, (4 * ns) // 3)
        while keep > ns and (keep + ns) % 3:
            keep -= 1
        if keep >= ns:
            large_list = sorted(
                iter_bits(large), key=lambda x: (-(g.adj[x] & small).bit_count(), x)
            )[:keep]
            try:
                pf = pair_factor(g, small, bits(large_list), q, derive(seed, "pf-pair"))
                pf.diagnostics["candidate"] = "pair-factor"
                candidates.append(pf)
            except ValueError as exc:
                candidates.append(
                    PackResult(TrianglePacking([]), Graph.empty(n), {"candidate": "pair-factor", "error": str(exc)})
                )
    best = max(candidates, key=lambda r: r.size)
    best.diagnostics["route"] = "portfolio"
    best.diagnostics["target"] = m
    best.diagnostics["candidate_sizes"] = [c.size for c in candidates]
    best.packing.validate(union(g, best.revealed))
    return best
