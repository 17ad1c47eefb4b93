"""Parallel Delta-stepping with owner-local buckets.

Bucket ``i`` of an owner holds its queued vertices with tentative distance in
``[i * delta, (i + 1) * delta)``. Edges cheaper than ``delta`` are light and
are relaxed repeatedly while the current bucket refills; edges of cost
``>= delta`` are heavy and are relaxed once, when the bucket is done. Remote
relaxations use the same inbox and approximate-distance filter as the phased
solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .criteria import csr_gather
from .graph import Graph
from .runtime import DEFAULT_CHUNK, ChunkedBuffer, Team, block_owner, min_per_target
from .sssp import SsspResult, check_source


class DeltaBuckets:
    """Owner-local bucket array with lazy removal.

    ``bucket_of[v]`` is the authoritative bucket of a queued vertex (-1 when
    not queued). Bucket lists may hold stale entries, which are filtered out
    when a bucket is taken.
    """

    def __init__(self, bucket_of: np.ndarray, delta: float):
        self.bucket_of = bucket_of
        self.delta = delta
        self.lists: list[list[np.ndarray]] = []
        self.counts: list[int] = []
        self.first = 0

    def index(self, dist: np.ndarray) -> np.ndarray:
        return np.floor(dist / self.delta).astype(np.int64)

    def put(self, verts: np.ndarray, dist: np.ndarray) -> None:
        if verts.size == 0:
            return
        idx = self.index(dist)
        old = self.bucket_of[verts]
        for b in old[old >= 0].tolist():
            self.counts[b] -= 1
        self.bucket_of[verts] = idx
        top = int(idx.max())
        while len(self.lists) <= top:
            self.lists.append([])
            self.counts.append(0)
        order = np.argsort(idx, kind="stable")
        idx_s, v_s = idx[order], verts[order]
        cuts = np.flatnonzero(np.diff(idx_s)) + 1
        for part_v, part_i in zip(np.split(v_s, cuts), np.split(idx_s, cuts)):
            b = int(part_i[0])
            self.lists[b].append(part_v)
            self.counts[b] += part_v.size
        self.first = min(self.first, int(idx.min()))

    def first_nonempty(self) -> float:
        while self.first < len(self.counts) and self.counts[self.first] == 0:
            self.lists[self.first] = []
            self.first += 1
        return float(self.first) if self.first < len(self.counts) else math.inf

    def nonempty(self, b: int) -> bool:
        return b < len(self.counts) and self.counts[b] > 0

    def take(self, b: int) -> np.ndarray:
        if b >= len(self.lists) or not self.lists[b]:
            return np.zeros(0, dtype=np.int64)
        cand = np.unique(np.concatenate(self.lists[b]))
        cand = cand[self.bucket_of[cand] == b]
        self.lists[b] = []
        self.counts[b] = 0
        self.bucket_of[cand] = -1
        return cand


@dataclass
class DeltaRun:
    result: SsspResult
    buckets_processed: int
    light_iterations: int
    thread_seconds: list[float]
    settle_log: dict = field(default_factory=dict)

    @property
    def wall_ms(self) -> float:
        return 1000.0 * max(self.thread_seconds)

    def __iter__(self):
        yield self.result
        yield {
            "buckets_processed": self.buckets_processed,
            "light_iterations": self.light_iterations,
            "wall_ms": self.wall_ms,
        }


def default_delta(g: Graph) -> float:
    """1 / average out-degree (1.0 for edgeless graphs)."""
    return 1.0 / (g.m / g.n) if g.m else 1.0


def delta_stepping(
    g: Graph,
    s: int,
    delta: float | None = None,
    p: int = 1,
    *,
    chunk_capacity: int = DEFAULT_CHUNK,
    monitor: bool = False,
) -> DeltaRun:
    """Delta-stepping from ``s`` with ``p`` worker threads.

    With ``monitor`` the distance each vertex had when its bucket was emptied
    for the last time is recorded in ``settle_log`` (vertex -> distance).
    """
    s = check_source(g, s)
    if delta is None:
        delta = default_delta(g)
    if not delta > 0:
        raise ValueError("delta must be positive")
    team = Team(p)
    bounds, owner = block_owner(g.n, p)
    d = np.full(g.n, np.inf)
    approx = np.full(g.n, np.inf)
    bucket_of = np.full(g.n, -1, dtype=np.int64)
    indeg = np.bincount(g.fwd_targets, minlength=g.n)
    inboxes = [ChunkedBuffer(max(1, int(indeg[bounds[t] : bounds[t + 1]].sum())), chunk_capacity) for t in range(p)]
    light = g.fwd_costs < delta
    stats = {"buckets": 0, "light": 0}
    relaxations = [0] * p
    logs: list[dict] = [dict() for _ in range(p)]

    def body(tid: int) -> None:
        lo, hi = int(bounds[tid]), int(bounds[tid + 1])
        buckets = DeltaBuckets(bucket_of, delta)

        def apply(targets, dists):
            targets, dists = min_per_target(targets, dists)
            better = dists < d[targets]
            targets, dists = targets[better], dists[better]
            if targets.size:
                d[targets] = dists
                approx[targets] = np.minimum(approx[targets], dists)
                buckets.put(targets, dists)

        def relax(X, want_light):
            eids, own = csr_gather(g.fwd_offsets, X)
            sel = light[eids] if want_light else ~light[eids]
            eids, own = eids[sel], own[sel]
            relaxations[tid] += eids.size
            if eids.size == 0:
                return
            t = g.fwd_targets[eids]
            nd = d[X][own] + g.fwd_costs[eids]
            dest = owner[t]
            mine = dest == tid
            apply(t[mine], nd[mine])
            rt, rd, rdest = t[~mine], nd[~mine], dest[~mine]
            useful = rd < approx[rt]
            rt, rd, rdest = rt[useful], rd[useful], rdest[useful]
            if rt.size:
                approx[rt] = np.minimum(approx[rt], rd)
                order = np.argsort(rdest, kind="stable")
                rt, rd, rdest = rt[order], rd[order], rdest[order]
                cuts = np.searchsorted(rdest, np.arange(p + 1))
                for q in range(p):
                    if cuts[q + 1] > cuts[q]:
                        inboxes[q].extend(rt[cuts[q] : cuts[q + 1]], rd[cuts[q] : cuts[q + 1]])

        def exchange():
            team.wait()
            t, nd = inboxes[tid].drain()
            if t.size:
                apply(t, nd)
            team.wait()

        if lo <= s < hi:
            apply(np.array([s]), np.array([0.0]))
        team.wait()
        while True:
            (b,) = team.allreduce(tid, (buckets.first_nonempty(),))
            if b == math.inf:
                break
            b = int(b)
            removed = []
            while True:
                X = buckets.take(b)
                removed.append(X)
                relax(X, True)
                exchange()
                if tid == 0:
                    stats["light"] += 1
                (again,) = team.allreduce(tid, (), (1.0 if buckets.nonempty(b) else 0.0,))
                if again == 0:
                    break
            R = np.unique(np.concatenate(removed))
            if monitor:
                logs[tid].update(zip(R.tolist(), d[R].tolist()))
            relax(R, False)
            exchange()
            if tid == 0:
                stats["buckets"] += 1

    _, seconds = team.run(body)
    settle_log = {}
    for log in logs:
        settle_log.update(log)
    reach = int(np.isfinite(d).sum())
    result = SsspResult(d.copy(), None, sum(relaxations), reach)
    return DeltaRun(result, stats["buckets"], stats["light"], seconds, settle_log)


def delta_record(g: Graph, delta: float, threads: int, run: DeltaRun, seed) -> dict:
    """One output row: ``algo,delta,threads,n,m,seed,buckets_processed,light_iterations,wall_ms``."""
    return {
        "algo": "delta",
        "delta": delta,
        "threads": threads,
        "n": g.n,
        "m": g.m,
        "seed": seed,
        "buckets_processed": run.buckets_processed,
        "light_iterations": run.light_iterations,
        "wall_ms": round(run.wall_ms, 3),
    }
