"""Command-line front end: ``generate``, ``simulate``, ``bench`` and ``fit``."""

from __future__ import annotations

import argparse
import json
import sys

from . import campaign as cp
from .graph import GenSpec, export_edge_list


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _words(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _initiator(text: str) -> tuple[float, ...]:
    vals = _floats(text)
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("initiator needs four comma-separated values a,b,c,d")
    return tuple(vals)


def _graph_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("graph")
    g.add_argument("--graph", choices=["uniform", "kronecker", "file"], default="uniform")
    g.add_argument("--n", type=_ints, default=[1000], help="vertex count(s), comma-separated")
    g.add_argument("--p", type=float, default=None, help="edge probability for uniform graphs")
    g.add_argument("--degree", type=float, default=None, help="expected out-degree; sets p = degree / (n - 1)")
    g.add_argument("--k", type=_ints, default=[10], help="Kronecker exponent(s), comma-separated")
    g.add_argument("--initiator", type=_initiator, default=None, help="Kronecker initiator a,b,c,d")
    g.add_argument("--scale", type=float, default=2.5, help="initiator multiplier")
    g.add_argument("--input", default=None, help="edge-list file for --graph file")
    g.add_argument("--keep-ids", action="store_true", help="use file vertex ids as-is instead of compacting them")
    g.add_argument("--symmetrize", action="store_true")
    g.add_argument("--weights", choices=["uniform01", "keep"], default="uniform01")
    g.add_argument("--seed", type=int, default=0)


def _specs(args) -> list[GenSpec]:
    common = {"symmetrize": args.symmetrize, "weight_mode": args.weights, "seed": args.seed}
    if args.graph == "file":
        if not args.input:
            raise SystemExit("--graph file needs --input PATH")
        return [GenSpec("file", path=args.input, relabel=not args.keep_ids, **common).validate()]
    if args.graph == "kronecker":
        extra = {"initiator": args.initiator} if args.initiator else {}
        return [GenSpec("kronecker", k=k, scale=args.scale, **extra, **common).validate() for k in args.k]
    if args.p is not None and args.degree is not None:
        raise SystemExit("give either --p or --degree, not both")
    out = []
    for n in args.n:
        if args.p is not None:
            p = args.p
        else:
            deg = 10.0 if args.degree is None else args.degree
            p = min(1.0, deg / (n - 1)) if n > 1 else 0.0
        out.append(GenSpec("uniform", n=n, p=p, **common).validate())
    return out


def cmd_generate(args) -> int:
    specs = _specs(args)
    if len(specs) != 1:
        raise SystemExit("generate writes one graph; give a single --n or --k")
    g = specs[0].build()
    export_edge_list(g, args.out)
    print(f"wrote {g.n} vertices, {g.m} edges to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    if args.campaign:
        camp = cp.Campaign.load(args.campaign)
        if args.out:
            camp.out = args.out
    else:
        camp = cp.Campaign(
            graphs=_specs(args), criteria=_words(args.criteria), reps=args.reps, seed=args.seed,
            source=args.source, out=args.out,
        )
    if not camp.out:
        raise SystemExit("simulate needs --out PATH (or an 'out' entry in the campaign)")
    rows, agg, meta = cp.simulate(camp)
    cp.write_csv(camp.out, rows, cp.SUMMARY_FIELDS)
    cp.write_csv(cp.sidecar(camp.out, "_agg.csv"), agg, cp.AGG_FIELDS)
    cp.sidecar(camp.out, "_meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    for r in agg:
        print(f"{r['graph']:>10} n={r['n']:<7} {r['criterion']:<12} phases={r['mean_phases']:.2f} "
              f"sum_fringe={r['mean_sum_fringe']:.1f}")
    return 0


def cmd_bench(args) -> int:
    plan = cp.BenchPlan(
        graphs=_specs(args), algos=_words(args.algos), threads=args.threads, deltas=args.delta,
        queue=args.queue, reps=args.reps, seed=args.seed,
    )
    rows, speed, meta = cp.bench(plan)
    cp.write_csv(args.out, rows, cp.TIMING_FIELDS)
    cp.write_csv(cp.sidecar(args.out, "_speedup.csv"), speed, cp.SPEEDUP_FIELDS)
    cp.sidecar(args.out, "_meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    for r in speed:
        tag = r["algo"] + (f" delta={r['delta']}" if r["delta"] != "" else "")
        print(f"{tag:<28} p={r['threads']:<3} median={r['median_ms']:.2f} ms  speedup={r['speedup']:.2f}")
    return 0


def cmd_fit(args) -> int:
    rows = cp.read_csv(args.input)
    if not rows:
        raise SystemExit(f"{args.input} has no rows")
    table = cp.fit_table(rows, args.metric)
    if args.out:
        cp.write_csv(args.out, table, cp.FIT_FIELDS)
    for r in table:
        mark = "*" if r["best"] else " "
        c = f" c={r['c']:.3f}" if r["c"] != "" else ""
        print(f"{mark} {r['criterion']:<12} {r['model']:<12} b={r['b']:.3f}{c} residual={r['residual']:.4g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="phasedsssp", description="Phased shortest-path experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated graph as an edge list")
    _graph_args(g)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("simulate", help="phase counts and fringe sums per criterion")
    _graph_args(s)
    s.add_argument("--criteria", default="dijk,oracle,static_or,simple_or,full_or")
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--source", choices=cp.SOURCE_RULES, default="zero")
    s.add_argument("--campaign", default=None, help="JSON campaign file; overrides graph flags")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="wall-clock timings and speedups")
    _graph_args(b)
    b.add_argument("--algos", default="dijkstra,phased-both,delta", help=f"subset of {','.join(cp.ALGOS)}")
    b.add_argument("--threads", type=_ints, default=[1])
    b.add_argument("--delta", type=_floats, default=None)
    b.add_argument("--queue", choices=["heap", "array"], default="array")
    b.add_argument("--reps", type=int, default=10)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("fit", help="fit power and logarithmic models to a simulate CSV")
    f.add_argument("--input", required=True)
    f.add_argument("--metric", choices=["phases", "sum_fringe"], default="phases")
    f.add_argument("--out", default=None)
    f.set_defaults(func=cmd_fit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
