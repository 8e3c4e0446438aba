"""Monte Carlo harness: threshold sweeps, failure certificates, deficit
experiments, CSV/JSON persistence.

CSV schema (stable, consumed by the plotting frontend):
    first line   '# rule=<rule> model=<model> trials=<trials> base_seed=<seed> algorithm=<algo>'
    header       C,n,trials,successes,success_rate,mean_size
A JSON mirror with full per-trial records is written next to the CSV.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .generators import (
    complete_bipartite,
    complete_multipartite,
    gnp,
    k4_counterexample,
    stable_model,
)
from .graph import Graph, VertexSet, iter_bits, union
from .oracle import (
    count_k4_within,
    count_triangles,
    greedy_triangle_packing,
    max_bipartite_matching,
)
from .packing import (
    PackResult,
    extremal_pack,
    pair_factor,
    perturbed_pack,
    round_greedy_triangles,
    sublinear_pack,
)
from .rng import Stream, bernoulli_indices, derive
from .stability import find_stable_partition

SCALING_RULES = ("logn_over_n", "one_over_n", "fixed")
ALGORITHMS = ("auto", "sublinear", "extremal", "roundgreedy", "greedy", "pair")
MODELS = ("gnp", "bipartite", "multipartite", "k4cx", "stable", "complete")


def scaled_probability(rule: str, c: float, n: int) -> float:
    if rule == "logn_over_n":
        return min(1.0, c * math.log(n) / n)
    if rule == "one_over_n":
        return min(1.0, c / n)
    if rule == "fixed":
        return min(1.0, c)
    raise ValueError(f"unknown scaling rule {rule!r}")


@dataclass
class ExperimentConfig:
    model: str
    model_params: dict
    n_values: list[int]
    rule: str
    c_values: list[float]
    trials: int
    base_seed: int
    algorithm: str = "auto"
    target: int | str | None = None  # None -> min(delta, n//3); "factor" -> n//3
    out: str | None = None

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.rule not in SCALING_RULES:
            raise ValueError(f"rule must be one of {SCALING_RULES}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(c < 0 for c in self.c_values):
            raise ValueError("all C values must be >= 0")
        if not self.n_values:
            raise ValueError("n_values must be nonempty")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        cfg = cls(
            model=raw["model"],
            model_params=raw.get("model_params", {}),
            n_values=list(raw["n_values"]),
            rule=raw["schedule"]["rule"],
            c_values=list(raw["schedule"]["C_values"]),
            trials=int(raw["trials"]),
            base_seed=int(raw["base_seed"]),
            algorithm=raw.get("algorithm", "auto"),
            target=raw.get("target"),
            out=raw.get("out"),
        )
        cfg.validate()
        return cfg


@dataclass
class TrialRecord:
    point_id: str
    n: int
    c: float
    p: float
    seed: int
    target: int
    size: int
    success: bool
    witness: dict = field(default_factory=dict)
    duration: float = 0.0
    error: str | None = None


@dataclass
class FailureWitness:
    isolated_in_b: int
    triangles_in_b: int
    certified_impossible: bool


def build_model(cfg: ExperimentConfig, n: int) -> tuple[Graph, dict]:
    """Base graph for one sweep point; random models are seeded per (base_seed,
    model, n) so all trials of a point share the same base graph."""
    params = cfg.model_params
    seed = derive(cfg.base_seed, "model", n)
    if cfg.model == "gnp":
        return gnp(n, float(params["p"]), seed), {}
    if cfg.model == "bipartite":
        m = int(params["m"]) if "m" in params else round(float(params.get("frac", 1 / 3)) * n)
        g = complete_bipartite(m, n)
        return g, {"a": (1 << m) - 1, "b": ((1 << n) - 1) ^ ((1 << m) - 1)}
    if cfg.model == "multipartite":
        sizes = [int(s) for s in params["sizes"]]
        return complete_multipartite(sizes), {}
    if cfg.model == "k4cx":
        return k4_counterexample(n, int(params["m"])), {}
    if cfg.model == "stable":
        g, a, b = stable_model(
            n,
            params.get("alpha", "1/3"),
            params.get("beta", "1/20"),
            float(params.get("defect", 0.0)),
            seed,
        )
        return g, {"a": a, "b": b}
    if cfg.model == "complete":
        full = (1 << n) - 1
        return Graph(n, [full ^ (1 << v) for v in range(n)]), {}
    raise ValueError(f"unknown model {cfg.model!r}")


def _target_for(cfg: ExperimentConfig, g: Graph) -> int:
    if cfg.target is None:
        return min(g.min_degree(), g.n // 3)
    if cfg.target == "factor":
        return g.n // 3
    return int(cfg.target)


def _run_algorithm(cfg: ExperimentConfig, g: Graph, structure: dict, p: float, seed: int, target: int) -> PackResult:
    if cfg.algorithm == "auto":
        return perturbed_pack(g, p, seed)
    if cfg.algorithm == "sublinear":
        return sublinear_pack(g, target, p, seed)
    if cfg.algorithm == "roundgreedy":
        return round_greedy_triangles(g, target, p, seed)
    if cfg.algorithm == "greedy":
        overlay = gnp(g.n, p, derive(seed, "overlay"))
        packing = greedy_triangle_packing(union(g, overlay))
        return PackResult(packing, overlay, {"route": "greedy"})
    if cfg.algorithm == "extremal":
        if "a" in structure:
            a, b = structure["a"], structure["b"]
        else:
            alpha = min(Fraction(1, 3), Fraction(target, g.n))
            part = find_stable_partition(g, alpha, alpha / 8)
            if part is None:
                raise ValueError("no stable partition found for the extremal algorithm")
            a, b = part
        alpha = min(Fraction(1, 3), Fraction(a.bit_count(), g.n))
        return extremal_pack(g, a, b, alpha, Fraction(1, 20), p, seed)
    if cfg.algorithm == "pair":
        if "a" not in structure:
            raise ValueError("pair algorithm needs a bipartite-structured model")
        a, b = structure["a"], structure["b"]
        return pair_factor(g, a, b, p, seed)
    raise ValueError(f"unknown algorithm {cfg.algorithm!r}")


def run_trial(cfg: ExperimentConfig, n: int, c: float, trial_index: int) -> TrialRecord:
    """One Monte Carlo trial; never fakes success: any generation or
    validation failure produces an error record."""
    p = scaled_probability(cfg.rule, c, n)
    seed = cfg.base_seed + trial_index
    point_id = f"{cfg.model}-n{n}-C{c:g}"
    start = time.perf_counter()
    try:
        g, structure = build_model(cfg, n)
        target = _target_for(cfg, g)
        res = _run_algorithm(cfg, g, structure, p, seed, target)
        res.packing.validate(union(g, res.revealed))
        size = res.size
        success = size >= target
        witness: dict = {"target": target, "size": size}
        if (
            not success
            and cfg.model == "bipartite"
            and cfg.algorithm == "greedy"
            and structure
            and structure["b"].bit_count() == 2 * structure["a"].bit_count()
        ):
            fw = failure_certificate(g, res.revealed, structure["a"], structure["b"])
            witness["failure_certificate"] = asdict(fw)
        return TrialRecord(
            point_id, n, c, p, seed, target, size, success, witness,
            time.perf_counter() - start,
        )
    except Exception as exc:  # error record, never a fake success
        return TrialRecord(
            point_id, n, c, p, seed, -1, 0, False, {}, time.perf_counter() - start,
            error=f"{type(exc).__name__}: {exc}",
        )


@dataclass
class SweepRow:
    c: float
    n: int
    trials: int
    successes: int
    success_rate: float
    mean_size: float


def sweep(cfg: ExperimentConfig, out_path=None) -> tuple[list[SweepRow], list[TrialRecord]]:
    """Run all (n, C) points; rows sorted by (n, C); CSV flushed per row."""
    cfg.validate()
    out_path = out_path or cfg.out
    rows: list[SweepRow] = []
    records: list[TrialRecord] = []
    fh = None
    writer = None
    if out_path:
        fh = open(out_path, "w", newline="")
        fh.write(
            f"# rule={cfg.rule} model={cfg.model} trials={cfg.trials} "
            f"base_seed={cfg.base_seed} algorithm={cfg.algorithm}\n"
        )
        writer = csv.writer(fh)
        writer.writerow(["C", "n", "trials", "successes", "success_rate", "mean_size"])
        fh.flush()
    workers = int(os.environ.get("TRIPACK_WORKERS", "1"))
    try:
        for n in sorted(cfg.n_values):
            for c in sorted(cfg.c_values):
                args = [(cfg, n, c, i) for i in range(cfg.trials)]
                if workers > 1:
                    import multiprocessing

                    with multiprocessing.Pool(workers) as pool:
                        point = pool.starmap(run_trial, args)
                else:
                    point = [run_trial(*a) for a in args]
                records.extend(point)
                successes = sum(1 for r in point if r.success)
                mean_size = sum(r.size for r in point) / len(point)
                row = SweepRow(c, n, cfg.trials, successes, successes / cfg.trials, mean_size)
                rows.append(row)
                if writer:
                    writer.writerow(
                        [row.c, row.n, row.trials, row.successes,
                         f"{row.success_rate:.6f}", f"{row.mean_size:.6f}"]
                    )
                    fh.flush()
    finally:
        if fh:
            fh.close()
    if out_path:
        mirror = os.path.splitext(out_path)[0] + ".json"
        with open(mirror, "w") as jh:
            json.dump([asdict(r) for r in records], jh, indent=1)
    return rows, records


def failure_certificate(g: Graph, overlay: Graph, a: VertexSet, b: VertexSet) -> FailureWitness:
    """Exact impossibility certificate for the bipartite extremal model with
    |B| = 2|A|: a triangle factor forces one all-B triangle per B-vertex that
    has no B-neighbour, so isolated-in-B > triangles-in-B certifies that no
    factor exists in g plus the overlay."""
    na, nb = a.bit_count(), b.bit_count()
    if nb != 2 * na:
        raise ValueError("certificate requires |B| = 2|A|")
    if g.count_edges_within(a) or g.count_edges_within(b):
        raise ValueError("certificate requires A and B independent in g")
    for v in iter_bits(a):
        if (g.adj[v] & b).bit_count() != nb:
            raise ValueError("certificate requires all A-B pairs present")
    isolated = sum(1 for v in iter_bits(b) if not (overlay.adj[v] & b))
    tri_b = count_triangles(overlay, within=b)
    return FailureWitness(isolated, tri_b, isolated > tri_b)


def k4_deficit_experiment(n: int, m: int, p: float, trials: int, seed: int) -> dict:
    """Count K4's inside B of the counterexample graph plus a fresh overlay per
    trial; report the fraction of trials with count < m."""
    g = k4_counterexample(n, m)
    size_a = n // 4 - m
    b_mask = ((1 << n) - 1) ^ ((1 << size_a) - 1)
    counts = []
    for t in range(trials):
        overlay = gnp(n, p, derive(seed, "k4", t))
        host = union(g, overlay)
        counts.append(count_k4_within(host, b_mask))
    below = sum(1 for ct in counts if ct < m)
    return {
        "n": n,
        "m": m,
        "p": p,
        "trials": trials,
        "counts": counts,
        "fraction_below_m": below / trials,
    }


def min_degree_bipartite(n_side: int, degree: int, seed: int) -> Graph:
    """Bipartite base for the matching experiment: circulant rows (vertex i on
    the left joined to degree consecutive right vertices) with a seeded
    relabeling of the right side; both sides have degree exactly `degree`."""
    if degree > n_side:
        raise ValueError("degree exceeds side size")
    perm = list(range(n_side))
    Stream(derive(seed, "relabel")).shuffle(perm)
    edges = []
    for i in range(n_side):
        for j in range(degree):
            edges.append((i, n_side + perm[(i + j) % n_side]))
    return Graph.from_edges(2 * n_side, edges)


def matching_threshold_experiment(
    n_side: int, delta_frac: float, c_list: list[float], trials: int, seed: int
) -> list[dict]:
    """Perfect-matching rate in p-thinned bipartite graphs with min degree
    delta_frac * N per side, at p = C * ln(N) / N."""
    if not delta_frac > 0.5:
        raise ValueError("delta_frac must exceed 1/2")
    degree = math.ceil(delta_frac * n_side)
    base = min_degree_bipartite(n_side, degree, seed)
    edges = list(base.edges())
    a_mask = (1 << n_side) - 1
    b_mask = ((1 << (2 * n_side)) - 1) ^ a_mask
    rows = []
    for c in c_list:
        p = min(1.0, c * math.log(n_side) / n_side)
        hits = 0
        for t in range(trials):
            keep = bernoulli_indices(derive(seed, "thin", f"{c:g}", t), len(edges), p)
            gp = Graph.from_edges(2 * n_side, [edges[k] for k in keep.tolist()])
            matching = max_bipartite_matching(gp, a_mask, b_mask)
            if matching.size == n_side:
                hits += 1
        rows.append({"C": c, "p": p, "trials": trials, "perfect_rate": hits / trials})
    return rows
