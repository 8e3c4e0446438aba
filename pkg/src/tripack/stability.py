"""Stability of a partition: verification and a heuristic search.

A graph is (alpha,beta)-stable when some partition (A,B) has |A| in
(alpha +- beta)n, |B| in (1-alpha +- beta)n, cut minimum degree >= alpha*n/4,
and all but beta*n vertices per side see all but beta*n of the other side.
Verification is exact; the search is one-sided (a returned partition always
verifies, absence proves nothing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import Graph, VertexSet, bits, iter_bits
from .util import as_fraction


@dataclass
class StabilityReport:
    holds: bool
    a: VertexSet
    b: VertexSet
    size_a: int
    size_b: int
    size_a_bounds: tuple[Fraction, Fraction]
    size_b_bounds: tuple[Fraction, Fraction]
    cut_min_degree: int
    cut_threshold: Fraction
    exceptional_a: int
    exceptional_b: int
    exceptional_bound: Fraction
    failures: list[str] = field(default_factory=list)


def verify_stability(g: Graph, a: VertexSet, b: VertexSet, alpha, beta) -> StabilityReport:
    """Check all stability clauses exactly (thresholds as exact rationals)."""
    alpha = as_fraction(alpha)
    beta = as_fraction(beta)
    n = g.n
    full = g.vertex_mask()
    if (a | b) != full or (a & b):
        raise ValueError("a and b must partition the vertex set")
    na, nb = a.bit_count(), b.bit_count()
    failures = []

    lo_a, hi_a = (alpha - beta) * n, (alpha + beta) * n
    lo_b, hi_b = (1 - alpha - beta) * n, (1 - alpha + beta) * n
    if alpha > 0 and na < 1:
        failures.append("A empty while alpha > 0")
    if not lo_a <= na <= hi_a:
        failures.append(f"|A|={na} outside (alpha±beta)n=[{lo_a},{hi_a}]")
    if not lo_b <= nb <= hi_b:
        failures.append(f"|B|={nb} outside (1-alpha±beta)n=[{lo_b},{hi_b}]")

    cut_thr = alpha * n / 4
    cut_min = n  # min over both sides of the cross degree
    for v in iter_bits(a):
        cut_min = min(cut_min, (g.adj[v] & b).bit_count())
    for v in iter_bits(b):
        cut_min = min(cut_min, (g.adj[v] & a).bit_count())
    if na == 0 or nb == 0:
        cut_min = 0
    if cut_min < cut_thr:
        failures.append(f"cut min degree {cut_min} < alpha*n/4 = {cut_thr}")

    exc_bound = beta * n
    exc_a = sum(1 for v in iter_bits(a) if (g.adj[v] & b).bit_count() < nb - exc_bound)
    exc_b = sum(1 for v in iter_bits(b) if (g.adj[v] & a).bit_count() < na - exc_bound)
    if exc_a > exc_bound:
        failures.append(f"{exc_a} A-vertices below |B|-beta*n (allowed {exc_bound})")
    if exc_b > exc_bound:
        failures.append(f"{exc_b} B-vertices below |A|-beta*n (allowed {exc_bound})")

    return StabilityReport(
        holds=not failures,
        a=a,
        b=b,
        size_a=na,
        size_b=nb,
        size_a_bounds=(lo_a, hi_a),
        size_b_bounds=(lo_b, hi_b),
        cut_min_degree=cut_min,
        cut_threshold=cut_thr,
        exceptional_a=exc_a,
        exceptional_b=exc_b,
        exceptional_bound=exc_bound,
        failures=failures,
    )


def find_stable_partition(g: Graph, alpha, beta) -> tuple[VertexSet, VertexSet] | None:
    """Heuristic witness search by degree thresholds.

    Seed B'' from vertices of degree at most (1-alpha-beta)n, keep the
    internally sparse ones (degree into B'' at most sqrt(beta)*n), take A' as
    the vertices with near-full degree into B', and send each leftover
    opposite its majority neighbourhood. The candidate is returned only if
    verify_stability accepts it, so there are no false positives.
    """
    alpha = as_fraction(alpha)
    beta = as_fraction(beta)
    n = g.n
    if n == 0:
        return None
    full = g.vertex_mask()

    seed_thr = (1 - alpha - beta) * n
    b2 = bits(v for v in range(n) if g.degree(v) <= seed_thr)
    if not b2:
        return None
    sparse_thr = math.sqrt(float(beta)) * n
    b1 = bits(v for v in iter_bits(b2) if (g.adj[v] & b2).bit_count() <= sparse_thr)
    if not b1:
        return None
    nb1 = b1.bit_count()
    a1 = bits(
        v for v in range(n) if not ((b1 >> v) & 1)
        and (g.adj[v] & b1).bit_count() >= (1 - beta / 4) * nb1
    )
    a_side, b_side = a1, b1
    leftovers = full & ~(a_side | b_side)
    for v in iter_bits(leftovers):
        to_b1 = (g.adj[v] & b1).bit_count()
        to_a1 = (g.adj[v] & a1).bit_count()
        # opposite the majority: high degree into B' makes v an A-vertex
        if to_b1 >= to_a1:
            a_side |= 1 << v
        else:
            b_side |= 1 << v
    # a few majority-opposite sweeps re-home low-degree vertices the degree
    # seed misplaced (their neighbours decide the side better than their count)
    for _ in range(3):
        moved = False
        for v in range(n):
            vb = 1 << v
            to_a = (g.adj[v] & a_side).bit_count()
            to_b = (g.adj[v] & b_side).bit_count()
            if (b_side & vb) and to_b > to_a:
                b_side &= ~vb
                a_side |= vb
                moved = True
            elif (a_side & vb) and to_a > to_b:
                a_side &= ~vb
                b_side |= vb
                moved = True
        if not moved:
            break
    if not a_side or not b_side:
        return None
    report = verify_stability(g, a_side, b_side, alpha, beta)
    if report.holds:
        return a_side, b_side
    return None
