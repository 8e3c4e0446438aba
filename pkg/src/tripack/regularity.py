"""Density, eps-regularity and super-regularity testing at small scale.

Exhaustive modes iterate all qualifying sub-pairs (caps at 16 vertices per
side); sampled modes are one-sided witness searches, so a sampled pass proves
nothing while a sampled witness is always genuine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, VertexSet, bits, iter_bits
from .rng import Stream

EXHAUSTIVE_CAP = 16


@dataclass
class RegularityWitness:
    x: VertexSet
    y: VertexSet
    density: float
    pair_density: float


@dataclass
class PairStats:
    density: float
    min_degree_a: int  # smallest cross-degree on the a side
    min_degree_b: int
    witness: "RegularityWitness | None" = None


@dataclass
class SuperRegularReport:
    ok: bool
    reason: str | None = None
    witness: RegularityWitness | None = None

    def __bool__(self) -> bool:
        return self.ok


def density(g: Graph, a: VertexSet, b: VertexSet) -> float:
    """e(a,b) / (|a| * |b|)."""
    if a & b:
        raise ValueError("sets overlap")
    na, nb = a.bit_count(), b.bit_count()
    if na == 0 or nb == 0:
        raise ValueError("density of an empty side is undefined")
    return g.count_edges_between(a, b) / (na * nb)


def pair_stats(
    g: Graph,
    a: VertexSet,
    b: VertexSet,
    eps: float | None = None,
    mode: str = "exhaustive",
    trials: int = 2000,
    seed: int = 0,
) -> PairStats:
    """Density and per-side minimum cross-degrees of a pair, plus a
    regularity-failure witness when eps is given and one is found."""
    d = density(g, a, b)
    min_a = min((g.adj[v] & b).bit_count() for v in iter_bits(a))
    min_b = min((g.adj[v] & a).bit_count() for v in iter_bits(b))
    witness = None
    if eps is not None:
        witness = regularity_refute(g, a, b, eps, mode=mode, trials=trials, seed=seed)
    return PairStats(d, min_a, min_b, witness)


def _min_qualifying(eps: float, size: int) -> int:
    # smallest integer >= eps*size, guarding float dust
    return max(1, math.ceil(eps * size - 1e-12))


def _popcounts(k: int) -> np.ndarray:
    return np.array([m.bit_count() for m in range(1 << k)], dtype=np.int64)


def _subset_edge_counts(cnt: np.ndarray) -> np.ndarray:
    """sums[mask] = sum of cnt[j] over bits j of mask, for all masks."""
    sums = np.zeros(1, dtype=np.int64)
    for c in cnt:
        sums = np.concatenate([sums, sums + c])
    return sums


def _exhaustive_scan(g, a_list, b_list, eps, predicate):
    """Iterate X over qualifying subsets of a; for each X evaluate the
    predicate on the vector of densities d(X, Y) for every qualifying Y.
    predicate(size_x, sizes_y, dens_y) returns an index into Y-masks or -1."""
    ka, kb = len(a_list), len(b_list)
    min_x = _min_qualifying(eps, ka)
    min_y = _min_qualifying(eps, kb)
    pop_a = _popcounts(ka)
    pop_b = _popcounts(kb)
    y_ok = pop_b >= min_y
    sizes_y = pop_b[y_ok].astype(np.float64)
    for xmask in range(1, 1 << ka):
        if pop_a[xmask] < min_x:
            continue
        xbits = bits(a_list[i] for i in iter_bits(xmask))
        cnt = np.array(
            [(g.adj[w] & xbits).bit_count() for w in b_list], dtype=np.int64
        )
        sums = _subset_edge_counts(cnt)[y_ok].astype(np.float64)
        dens = sums / (pop_a[xmask] * sizes_y)
        hit = predicate(dens)
        if hit >= 0:
            ymask_local = np.nonzero(y_ok)[0][hit]
            ybits = bits(b_list[i] for i in iter_bits(int(ymask_local)))
            return xbits, ybits, float(dens[hit])
    return None


def regularity_refute(
    g: Graph,
    a: VertexSet,
    b: VertexSet,
    eps: float,
    mode: str = "exhaustive",
    trials: int = 2000,
    seed: int = 0,
) -> RegularityWitness | None:
    """Witness (X, Y) with |d(a,b) - d(X,Y)| > eps, or None.

    Exhaustive mode is exact: None proves the pair eps-regular. Sampled mode
    draws uniform subsets of the minimum qualifying sizes and is one-sided."""
    d_ab = density(g, a, b)
    a_list = list(iter_bits(a))
    b_list = list(iter_bits(b))
    if mode == "exhaustive":
        if len(a_list) > EXHAUSTIVE_CAP or len(b_list) > EXHAUSTIVE_CAP:
            raise ValueError(f"exhaustive mode caps sides at {EXHAUSTIVE_CAP}")

        def pred(dens):
            bad = np.nonzero(np.abs(dens - d_ab) > eps + 1e-12)[0]
            return int(bad[0]) if bad.size else -1

        hit = _exhaustive_scan(g, a_list, b_list, eps, pred)
        if hit is None:
            return None
        x, y, dxy = hit
        return RegularityWitness(x, y, dxy, d_ab)
    if mode == "sampled":
        rng = Stream(seed)
        sx = _min_qualifying(eps, len(a_list))
        sy = _min_qualifying(eps, len(b_list))
        for _ in range(trials):
            x = bits(rng.sample(a_list, sx))
            y = bits(rng.sample(b_list, sy))
            dxy = density(g, x, y)
            if abs(dxy - d_ab) > eps + 1e-12:
                return RegularityWitness(x, y, dxy, d_ab)
        return None
    raise ValueError(f"unknown mode {mode!r}")


def is_super_regular(
    g: Graph,
    a: VertexSet,
    b: VertexSet,
    eps: float,
    d: float,
    mode: str = "exhaustive",
    trials: int = 2000,
    seed: int = 0,
) -> SuperRegularReport:
    """Check (eps,d)-super-regularity: every qualifying sub-pair has density
    >= d, and every vertex meets the cross-degree floor d * |other side|."""
    a_list = list(iter_bits(a))
    b_list = list(iter_bits(b))
    na, nb = len(a_list), len(b_list)
    if na == 0 or nb == 0:
        raise ValueError("empty side")
    for v in a_list:
        if (g.adj[v] & b).bit_count() < d * nb - 1e-12:
            return SuperRegularReport(False, f"vertex {v} has cross-degree below d*|b|")
    for v in b_list:
        if (g.adj[v] & a).bit_count() < d * na - 1e-12:
            return SuperRegularReport(False, f"vertex {v} has cross-degree below d*|a|")
    if mode == "exhaustive":
        if na > EXHAUSTIVE_CAP or nb > EXHAUSTIVE_CAP:
            raise ValueError(f"exhaustive mode caps sides at {EXHAUSTIVE_CAP}")

        def pred(dens):
            bad = np.nonzero(dens < d - 1e-12)[0]
            return int(bad[0]) if bad.size else -1

        hit = _exhaustive_scan(g, a_list, b_list, eps, pred)
        if hit is not None:
            x, y, dxy = hit
            return SuperRegularReport(
                False, "sub-pair density below d", RegularityWitness(x, y, dxy, d)
            )
        return SuperRegularReport(True)
    if mode == "sampled":
        rng = Stream(seed)
        sx = _min_qualifying(eps, na)
        sy = _min_qualifying(eps, nb)
        for _ in range(trials):
            x = bits(rng.sample(a_list, sx))
            y = bits(rng.sample(b_list, sy))
            dxy = density(g, x, y)
            if dxy < d - 1e-12:
                return SuperRegularReport(
                    False, "sampled sub-pair density below d",
                    RegularityWitness(x, y, dxy, d),
                )
        return SuperRegularReport(True, "sampled: no witness found (one-sided)")
    raise ValueError(f"unknown mode {mode!r}")


def mdl_count(g: Graph, a: VertexSet, b: VertexSet, eps: float, d: float, y: VertexSet) -> int:
    """Number of a-vertices with degree into y below (d - eps) * |y|."""
    if y & ~b:
        raise ValueError("y must be a subset of b")
    ny = y.bit_count()
    if ny < _min_qualifying(eps, b.bit_count()):
        raise ValueError("y smaller than eps * |b|")
    thr = (d - eps) * ny
    return sum(1 for v in iter_bits(a) if (g.adj[v] & y).bit_count() < thr - 1e-12)


@dataclass
class TrimResult:
    a: VertexSet
    b: VertexSet
    removed_a: VertexSet
    removed_b: VertexSet
    shortfall: bool  # True when a side lost more than an eps fraction


def trim_super_regular(g: Graph, a: VertexSet, b: VertexSet, eps: float, d: float) -> TrimResult:
    """One-pass trim: drop from each side the vertices with cross-degree below
    (d - eps) * (opposite side's original size)."""
    na, nb = a.bit_count(), b.bit_count()
    thr_a = (d - eps) * nb
    thr_b = (d - eps) * na
    removed_a = bits(v for v in iter_bits(a) if (g.adj[v] & b).bit_count() < thr_a - 1e-12)
    removed_b = bits(v for v in iter_bits(b) if (g.adj[v] & a).bit_count() < thr_b - 1e-12)
    a2, b2 = a & ~removed_a, b & ~removed_b
    shortfall = (
        a2.bit_count() < (1 - eps) * na - 1e-12 or b2.bit_count() < (1 - eps) * nb - 1e-12
    )
    return TrimResult(a2, b2, removed_a, removed_b, shortfall)
