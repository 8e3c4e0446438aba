"""Command-line interface: generate, pack, verify, experiment."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .experiments import ExperimentConfig, sweep
from .generators import (
    complete_bipartite,
    complete_multipartite,
    gnp,
    k4_counterexample,
    stable_model,
)
from .graph import Graph, bits, iter_bits, read_edge_list, union, write_edge_list
from .oracle import TrianglePacking, max_triangle_packing_exact
from .packing import (
    Cherry,
    cherry_factor,
    extremal_pack,
    pair_factor,
    perturbed_pack,
    round_greedy_triangles,
    sublinear_pack,
)
from .regularity import is_super_regular
from .stability import find_stable_partition, verify_stability
from .util import as_fraction


def parse_vertex_spec(spec: str) -> int:
    """Comma-separated indices and ranges, e.g. '0-99' or '1,2,5-7'."""
    mask = 0
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-")
            for v in range(int(lo), int(hi) + 1):
                mask |= 1 << v
        else:
            mask |= 1 << int(part)
    return mask


def write_packing(packing: TrianglePacking, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{packing.size}\n")
        for (u, v, w) in packing.triples:
            fh.write(f"{u} {v} {w}\n")


def read_packing(path) -> TrianglePacking:
    with open(path) as fh:
        k = int(fh.readline())
        triples = []
        for _ in range(k):
            u, v, w = (int(x) for x in fh.readline().split())
            triples.append(tuple(sorted((u, v, w))))
    return TrianglePacking(triples)


def _load_parts(path) -> dict:
    with open(path) as fh:
        raw = json.load(fh)
    return {k: bits(v) for k, v in raw.items()}


def cmd_generate(args) -> int:
    if args.model == "gnp":
        g = gnp(args.n, args.p, args.seed)
    elif args.model == "bipartite":
        g = complete_bipartite(args.m, args.n)
    elif args.model == "multipartite":
        sizes = [int(s) for s in args.sizes.split(",")]
        g = complete_multipartite(sizes)
    elif args.model == "k4cx":
        g = k4_counterexample(args.n, args.m)
    elif args.model == "stable":
        g, a, b = stable_model(args.n, args.alpha, args.beta, args.defect, args.seed)
        if args.parts_out:
            with open(args.parts_out, "w") as fh:
                json.dump({"a": list(iter_bits(a)), "b": list(iter_bits(b))}, fh)
    elif args.model == "complete":
        full = (1 << args.n) - 1
        g = Graph(args.n, [full ^ (1 << v) for v in range(args.n)])
    else:
        raise ValueError(f"unknown model {args.model}")
    write_edge_list(g, args.out)
    print(f"wrote {g.n} vertices, {g.edge_count} edges to {args.out}")
    return 0


def cmd_pack(args) -> int:
    g = read_edge_list(args.graph)
    m = args.m if args.m is not None else min(g.min_degree(), g.n // 3)
    if args.algo == "auto":
        res = perturbed_pack(g, args.p, args.seed)
    elif args.algo == "sublinear":
        res = sublinear_pack(g, m, args.p, args.seed)
    elif args.algo == "roundgreedy":
        res = round_greedy_triangles(g, m, args.p, args.seed)
    elif args.algo == "extremal":
        alpha = as_fraction(args.alpha) if args.alpha else min(Fraction(1, 3), Fraction(m, g.n))
        beta = as_fraction(args.beta) if args.beta else alpha / 8
        if args.parts:
            parts = _load_parts(args.parts)
            a, b = parts["a"], parts["b"]
        else:
            found = find_stable_partition(g, alpha, beta)
            if found is None:
                print("no stable partition found; use --parts or --algo auto", file=sys.stderr)
                return 1
            a, b = found
        res = extremal_pack(g, a, b, alpha, beta, args.p, args.seed)
    elif args.algo == "cherry":
        parts = _load_parts(args.parts)
        cherry = Cherry(parts["u"], parts["v"], parts["w"], g)
        mode = "balanced" if parts["u"].bit_count() == parts["v"].bit_count() else "unbalanced"
        res = cherry_factor(cherry, args.p, mode, args.seed, d=args.d)
    elif args.algo == "pair":
        parts = _load_parts(args.parts)
        res = pair_factor(g, parts["u"], parts["v"], args.p, args.seed, d=args.d)
    else:
        raise ValueError(f"unknown algo {args.algo}")
    res.packing.validate(union(g, res.revealed))
    if args.out:
        write_packing(res.packing, args.out)
    if args.revealed_out:
        write_edge_list(res.revealed, args.revealed_out)
    print(f"packing size {res.size}" + (f" -> {args.out}" if args.out else ""))
    if args.diagnostics:
        print(json.dumps(res.diagnostics, default=str, indent=1))
    return 0


def cmd_verify(args) -> int:
    if args.what == "packing":
        g = read_edge_list(args.graph)
        if args.overlay:
            g = union(g, read_edge_list(args.overlay))
        packing = read_packing(args.packing)
        try:
            packing.validate(g)
        except ValueError as exc:
            print(f"INVALID: {exc}")
            return 1
        print(f"valid packing of size {packing.size}")
        return 0
    if args.what == "factor":
        g = read_edge_list(args.graph)
        if g.n > 30:
            print("exact oracle is exponential; refusing n > 30", file=sys.stderr)
            return 1
        res = max_triangle_packing_exact(g)
        print(f"max packing size {res.size} ({res.status})")
        return 0
    if args.what == "regular":
        g = read_edge_list(args.graph)
        a = parse_vertex_spec(args.a)
        b = parse_vertex_spec(args.b)
        mode = "exhaustive" if args.exhaustive else "sampled"
        report = is_super_regular(g, a, b, args.eps, args.d, mode=mode, seed=args.seed)
        print(f"super-regular: {report.ok}" + (f" ({report.reason})" if report.reason else ""))
        return 0 if report.ok else 1
    if args.what == "stable":
        g = read_edge_list(args.graph)
        if args.parts:
            parts = _load_parts(args.parts)
            report = verify_stability(g, parts["a"], parts["b"], args.alpha, args.beta)
            print(f"stable: {report.holds}")
            for f in report.failures:
                print(f"  {f}")
            return 0 if report.holds else 1
        found = find_stable_partition(g, args.alpha, args.beta)
        if found is None:
            print("no stable partition witness found")
            return 1
        print(f"stable partition found: |A|={found[0].bit_count()} |B|={found[1].bit_count()}")
        return 0
    raise ValueError(f"unknown verify target {args.what}")


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    out = args.out or cfg.out
    if not out:
        print("no output path (config 'out' or --out)", file=sys.stderr)
        return 1
    rows, records = sweep(cfg, out)
    errors = [r for r in records if r.error]
    for row in rows:
        print(
            f"n={row.n} C={row.c:g}: {row.successes}/{row.trials} "
            f"(rate {row.success_rate:.3f}, mean size {row.mean_size:.1f})"
        )
    if errors:
        print(f"{len(errors)} trial(s) errored; first: {errors[0].error}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tripack")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a model graph as an edge list")
    gen.add_argument("--model", required=True,
                     choices=["gnp", "bipartite", "multipartite", "k4cx", "stable", "complete"])
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--n", type=int)
    gen.add_argument("--p", type=float, default=0.5)
    gen.add_argument("--m", type=int)
    gen.add_argument("--sizes", type=str, help="comma list for multipartite")
    gen.add_argument("--alpha", type=str, default="1/3")
    gen.add_argument("--beta", type=str, default="1/20")
    gen.add_argument("--defect", type=float, default=0.0)
    gen.add_argument("--parts-out", dest="parts_out")
    gen.set_defaults(func=cmd_generate)

    pack = sub.add_parser("pack", help="run a packing pipeline")
    pack.add_argument("--graph", required=True)
    pack.add_argument("--p", type=float, required=True)
    pack.add_argument("--seed", type=int, default=0)
    pack.add_argument("--algo", default="auto",
                      choices=["auto", "sublinear", "extremal", "roundgreedy", "cherry", "pair"])
    pack.add_argument("--out")
    pack.add_argument("--m", type=int)
    pack.add_argument("--alpha", type=str)
    pack.add_argument("--beta", type=str)
    pack.add_argument("--d", type=float, default=0.5)
    pack.add_argument("--parts", help="JSON file with vertex lists (u/v/w or a/b)")
    pack.add_argument("--revealed-out", dest="revealed_out",
                      help="write the revealed random edges as an edge list")
    pack.add_argument("--diagnostics", action="store_true")
    pack.set_defaults(func=cmd_pack)

    ver = sub.add_parser("verify", help="verify packings, regularity, stability")
    vsub = ver.add_subparsers(dest="what", required=True)
    vp = vsub.add_parser("packing")
    vp.add_argument("graph")
    vp.add_argument("packing")
    vp.add_argument("--overlay", help="edge list of revealed random edges to union in")
    vf = vsub.add_parser("factor")
    vf.add_argument("graph")
    vr = vsub.add_parser("regular")
    vr.add_argument("graph")
    vr.add_argument("--a", required=True)
    vr.add_argument("--b", required=True)
    vr.add_argument("--eps", type=float, required=True)
    vr.add_argument("--d", type=float, required=True)
    vr.add_argument("--exhaustive", action="store_true")
    vr.add_argument("--seed", type=int, default=0)
    vs = vsub.add_parser("stable")
    vs.add_argument("graph")
    vs.add_argument("--alpha", type=str, required=True)
    vs.add_argument("--beta", type=str, required=True)
    vs.add_argument("--parts")
    for p_ in (vp, vf, vr, vs):
        p_.set_defaults(func=cmd_verify)

    exp = sub.add_parser("experiment", help="run a config-driven sweep")
    exp.add_argument("--config", required=True)
    exp.add_argument("--out")
    exp.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
