"""Experiment campaigns: phase-count sweeps, timing benchmarks and curve fits.

A campaign is a list of graph specs (sweep points), a list of criteria and a
repetition count. Repetition ``r`` of every point uses seed ``seed + r``. If
the source has no outgoing edge the instance is redrawn with a derived seed;
the seed actually used is the one written to the output rows.
"""

from __future__ import annotations

import csv
import json
import statistics
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .criteria import parse_criterion, run_phased
from .delta import default_delta, delta_record, delta_stepping
from .fitting import fit_curves
from .graph import GenSpec, Graph, build_reverse, compute_minima
from .parallel import RunConfig, parallel_sssp, run_record
from .sssp import dijkstra

SUMMARY_FIELDS = ["graph", "n", "m", "criterion", "seed", "phases", "sum_fringe", "relaxations"]
AGG_FIELDS = [
    "graph", "n", "criterion", "reps", "mean_m", "mean_phases", "std_phases", "mean_sum_fringe", "std_sum_fringe",
]
TIMING_FIELDS = [
    "algo", "criterion", "queue_mode", "delta", "threads", "n", "m", "seed",
    "phases", "buckets_processed", "light_iterations", "wall_ms", "preprocess_ms",
]
SPEEDUP_FIELDS = ["algo", "criterion", "queue_mode", "delta", "threads", "median_ms", "speedup"]
FIT_FIELDS = ["criterion", "metric", "model", "b", "c", "residual", "n_points", "best"]
ALGOS = ("dijkstra", "phased-in", "phased-out", "phased-both", "delta")
SOURCE_RULES = ("zero", "random")
MAX_RESAMPLES = 100


@dataclass
class Campaign:
    graphs: list[GenSpec]
    criteria: list[str]
    reps: int = 1
    seed: int = 0
    source: str = "zero"
    out: str | None = None

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.criteria:
            raise ValueError("a campaign needs at least one criterion")
        if not self.graphs:
            raise ValueError("a campaign needs at least one graph")
        if self.source not in SOURCE_RULES:
            raise ValueError(f"source rule must be one of {SOURCE_RULES}")
        for c in self.criteria:
            parse_criterion(c)
        for g in self.graphs:
            g.validate()

    @classmethod
    def from_dict(cls, data: dict) -> "Campaign":
        data = dict(data)
        graphs = []
        for item in data.pop("graphs"):
            item = dict(item)
            if "initiator" in item:
                item["initiator"] = tuple(item["initiator"])
            graphs.append(GenSpec(**item))
        return cls(graphs=graphs, **data)

    @classmethod
    def load(cls, path) -> "Campaign":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {**asdict(self), "graphs": [asdict(g) for g in self.graphs]}


@dataclass
class Instance:
    spec: GenSpec
    graph: Graph
    source: int
    resampled: int = 0


def _alt_seed(seed: int, attempt: int) -> int:
    return int(np.random.SeedSequence([seed, attempt]).generate_state(1, np.uint64)[0])


def draw_instance(spec: GenSpec, source_rule: str = "zero") -> Instance:
    """Build ``spec``, redrawing generated graphs whose source has no out-edge."""
    base = spec.seed
    for attempt in range(MAX_RESAMPLES + 1):
        cur = spec if attempt == 0 else spec.with_seed(_alt_seed(base, attempt))
        g = cur.build()
        deg = g.out_degree()
        if source_rule == "random":
            live = np.flatnonzero(deg > 0)
            if live.size == 0 and spec.kind != "file":
                continue
            pool = live if live.size else np.arange(g.n)
            s = int(np.random.default_rng(cur.seed).choice(pool))
        else:
            s = 0
        if deg[s] > 0 or spec.kind == "file":
            return Instance(cur, g, s, attempt)
    raise RuntimeError(f"no instance with a usable source after {MAX_RESAMPLES} redraws of {spec}")


# ----------------------------------------------------------------------------
# simulation


def simulate(campaign: Campaign, progress=None) -> tuple[list[dict], list[dict], dict]:
    """Run every (point, rep, criterion); returns (rows, aggregate rows, metadata)."""
    crits = [parse_criterion(c) for c in campaign.criteria]
    rows, agg = [], []
    meta = {"source_rule": campaign.source, "resampled": []}
    for spec in campaign.graphs:
        per_crit: dict[str, list[dict]] = {str(c): [] for c in crits}
        for r in range(campaign.reps):
            inst = draw_instance(spec.with_seed(campaign.seed + r), campaign.source)
            if inst.resampled:
                meta["resampled"].append({"requested": campaign.seed + r, "used": inst.spec.seed})
            g = build_reverse(inst.graph)
            minima = compute_minima(g)
            oracle = dijkstra(g, inst.source).dist
            for c in crits:
                _, tr = run_phased(g, inst.source, c, minima=minima, oracle_dist=oracle)
                row = {
                    "graph": spec.label(),
                    "n": g.n,
                    "m": g.m,
                    "criterion": str(c),
                    "seed": inst.spec.seed,
                    "phases": tr.phases,
                    "sum_fringe": tr.sum_fringe,
                    "relaxations": tr.relaxations,
                }
                rows.append(row)
                per_crit[str(c)].append(row)
            if progress:
                progress(spec, r)
        for c, rs in per_crit.items():
            agg.append(_aggregate(rs, c))
    return rows, agg, meta


def _aggregate(rows: list[dict], crit: str) -> dict:
    ph = [r["phases"] for r in rows]
    sf = [r["sum_fringe"] for r in rows]
    sd = statistics.stdev if len(rows) > 1 else (lambda _: 0.0)
    return {
        "graph": rows[0]["graph"],
        "n": rows[0]["n"],
        "criterion": crit,
        "reps": len(rows),
        "mean_m": statistics.fmean(r["m"] for r in rows),
        "mean_phases": statistics.fmean(ph),
        "std_phases": sd(ph),
        "mean_sum_fringe": statistics.fmean(sf),
        "std_sum_fringe": sd(sf),
    }


# ----------------------------------------------------------------------------
# timing benchmarks


@dataclass
class BenchPlan:
    graphs: list[GenSpec]
    algos: list[str] = field(default_factory=lambda: ["dijkstra", "phased-both", "delta"])
    threads: list[int] = field(default_factory=lambda: [1])
    deltas: list[float] | None = None
    queue: str = "array"
    reps: int = 10
    seed: int = 0

    def __post_init__(self):
        for a in self.algos:
            if a not in ALGOS:
                raise ValueError(f"unknown algorithm {a!r}; choose from {ALGOS}")
        if any(t < 1 for t in self.threads):
            raise ValueError("thread counts must be >= 1")
        if self.deltas is not None and any(not d > 0 for d in self.deltas):
            raise ValueError("delta must be positive")
        if self.queue not in ("heap", "array"):
            raise ValueError("queue must be 'heap' or 'array'")
        if self.reps < 1:
            raise ValueError("repetitions must be >= 1")


def _mismatch(ref: np.ndarray, got: np.ndarray) -> bool:
    return not np.array_equal(ref, got)


def bench(plan: BenchPlan) -> tuple[list[dict], list[dict], dict]:
    """Time every cell on ``reps`` seeded instances; returns (rows, speedups, metadata).

    Every run is checked against the Dijkstra distances of the same instance.
    """
    queue_mode = "addressable_heap" if plan.queue == "heap" else "linear_array"
    rows: list[dict] = []
    meta: dict = {"source_rule": "zero", "resampled": []}
    for spec in plan.graphs:
        for r in range(plan.reps):
            inst = draw_instance(spec.with_seed(plan.seed + r))
            if inst.resampled:
                meta["resampled"].append({"requested": plan.seed + r, "used": inst.spec.seed})
            g, s, seed = build_reverse(inst.graph), inst.source, inst.spec.seed
            t0 = time.perf_counter()
            ref = dijkstra(g, s)
            dt = 1000.0 * (time.perf_counter() - t0)
            rows.append(_row("dijkstra", g, seed, threads=1, wall_ms=round(dt, 3)))
            for algo in plan.algos:
                if algo == "dijkstra":
                    continue
                for p in plan.threads:
                    if algo == "delta":
                        for d in plan.deltas or [default_delta(g)]:
                            run = delta_stepping(g, s, d, p)
                            if _mismatch(ref.dist, run.result.dist):
                                raise AssertionError(f"delta-stepping distances differ (delta={d}, p={p})")
                            rows.append(_row(**delta_record(g, d, p, run, seed)))
                    else:
                        cfg = RunConfig(threads=p, criterion=_PHASED[algo], queue_mode=queue_mode)
                        run = parallel_sssp(g, s, cfg)
                        if _mismatch(ref.dist, run.result.dist):
                            raise AssertionError(f"phased distances differ ({algo}, p={p})")
                        rows.append(_row(**run_record(g, cfg, run, seed)))
    speed = speedup_table(rows)
    meta["best_delta"] = best_delta(speed)
    return rows, speed, meta


_PHASED = {"phased-in": "in_static", "phased-out": "out_static", "phased-both": "both"}


def _row(algo, g=None, seed=None, **kw) -> dict:
    row = dict.fromkeys(TIMING_FIELDS, "")
    row["algo"] = algo
    if g is not None:
        row["n"], row["m"] = g.n, g.m
    if seed is not None:
        row["seed"] = seed
    if algo == "phased":
        row["algo"] = {v: k for k, v in _PHASED.items()}[kw["criterion"]]
    for k, v in kw.items():
        row[k] = v
    return row


def speedup_table(rows: list[dict]) -> list[dict]:
    """Median wall time per cell and speedup against the Dijkstra median.

    The Dijkstra baseline row always comes first with speedup 1.0.
    """
    cells: dict[tuple, list[float]] = {}
    for r in rows:
        key = (r["algo"], r["criterion"], r["queue_mode"], r["delta"], r["threads"])
        cells.setdefault(key, []).append(float(r["wall_ms"]))
    base_key = next(k for k in cells if k[0] == "dijkstra")
    base = statistics.median(cells[base_key])
    out = [dict(zip(SPEEDUP_FIELDS, (*base_key, base, 1.0)))]
    for key, times in cells.items():
        if key == base_key:
            continue
        med = statistics.median(times)
        out.append(dict(zip(SPEEDUP_FIELDS, (*key, med, base / med if med > 0 else float("inf")))))
    return out


def best_delta(speed: list[dict]) -> dict:
    """Fastest delta per thread count (string keys, for JSON)."""
    best: dict = {}
    for r in speed:
        if r["algo"] != "delta":
            continue
        t = str(r["threads"])
        if t not in best or r["median_ms"] < best[t]["median_ms"]:
            best[t] = {"delta": r["delta"], "median_ms": r["median_ms"]}
    return best


# ----------------------------------------------------------------------------
# fits


def fit_table(rows: list[dict], metric: str = "phases") -> list[dict]:
    """Fit both models per criterion to the per-n means of ``metric``.

    ``rows`` may be summary rows (``phases``/``sum_fringe``) or aggregate rows
    (``mean_phases``/``mean_sum_fringe``).
    """
    col = metric if metric in rows[0] else f"mean_{metric}"
    if col not in rows[0]:
        raise ValueError(f"no column for metric {metric!r}")
    by_crit: dict[str, dict[float, list[float]]] = {}
    for r in rows:
        by_crit.setdefault(r["criterion"], {}).setdefault(float(r["n"]), []).append(float(r[col]))
    out = []
    for crit, pts in by_crit.items():
        points = [(n, statistics.fmean(v)) for n, v in sorted(pts.items())]
        res = fit_curves(points)
        for m in (res.power, res.logarithmic):
            out.append({
                "criterion": crit,
                "metric": metric,
                "model": m.model,
                "b": m.b,
                "c": "" if m.c is None else m.c,
                "residual": m.residual,
                "n_points": m.n_points,
                "best": int(m is res.best),
            })
    return out


# ----------------------------------------------------------------------------
# CSV helpers


def write_csv(path, rows: list[dict], fields: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r[k]) for k in fields})


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def sidecar(path, suffix: str) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}{suffix}")
