"""Shared-memory phased SSSP with the static IN/OUT criteria.

Vertices are statically partitioned over ``p`` worker threads. Each phase:

1. every owner reports the minimum tentative distance of its fringe and the
   minimum of ``d[v] + min_out[v]``; a min-reduction makes both global;
2. owners pick, among their own fringe vertices, those meeting
   ``d[v] <= min_d + min_in[v]`` (IN) and/or ``d[v] <= min(d + min_out)``
   (OUT);
3. owners relax the out-edges of the picked vertices. Relaxations of owned
   targets are applied at once; the rest are appended to the destination
   owner's inbox, unless the shared approximate-distance array shows they
   cannot help;
4. after a barrier every owner drains its inbox.

The run ends when the reduction reports an empty global fringe.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .criteria import F, S, U, Crit, LabelSettingViolation, PhaseTrace, csr_gather
from .graph import Graph
from .heap import AddressableHeap
from .runtime import (
    DEFAULT_CHUNK,
    AtomicMinArray,
    ChunkedBuffer,
    Team,
    block_owner,
    cyclic_owner,
    min_per_target,
)
from .sssp import SsspResult, check_source

CRITERIA = ("in_static", "out_static", "both")
QUEUE_MODES = ("addressable_heap", "linear_array")


@dataclass(frozen=True)
class RunConfig:
    threads: int = 1
    criterion: str = "both"
    queue_mode: str = "linear_array"
    chunk_capacity: int = DEFAULT_CHUNK
    partition: str = "block"
    debug_checks: bool = False

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.chunk_capacity < 1:
            raise ValueError("chunk_capacity must be >= 1")
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")
        if self.queue_mode not in QUEUE_MODES:
            raise ValueError(f"queue_mode must be one of {QUEUE_MODES}")
        if self.partition not in ("block", "cyclic"):
            raise ValueError("partition must be 'block' or 'cyclic'")

    @property
    def use_in(self) -> bool:
        return self.criterion in ("in_static", "both")

    @property
    def use_out(self) -> bool:
        return self.criterion in ("out_static", "both")

    def sim_criterion(self):
        from .criteria import STATIC_OR

        return {"in_static": Crit.IN_STATIC, "out_static": Crit.OUT_STATIC, "both": STATIC_OR}[self.criterion]


class RelaxMsg(NamedTuple):
    target: int
    new_dist: float


class _Shared:
    """State visible to every owner. Only ``approx`` and the inboxes are
    written by threads other than a vertex's owner."""

    def __init__(self, g: Graph, s: int, cfg: RunConfig):
        p = cfg.threads
        self.g = g
        self.cfg = cfg
        self.d = np.full(g.n, np.inf)
        self.label = np.zeros(g.n, dtype=np.int8)
        self.approx = np.full(g.n, np.inf)
        self.min_in = AtomicMinArray(g.n)
        self.min_out = np.full(g.n, np.inf)
        if cfg.partition == "block":
            bounds, owner = block_owner(g.n, p)
            self.owned = [np.arange(bounds[t], bounds[t + 1], dtype=np.int64) for t in range(p)]
        else:
            owner = cyclic_owner(g.n, p)
            self.owned = [np.arange(t, g.n, p, dtype=np.int64) for t in range(p)]
        self.owner = owner
        self.local = np.zeros(g.n, dtype=np.int64)
        for ids in self.owned:
            self.local[ids] = np.arange(ids.size)
        indeg = np.bincount(g.fwd_targets, minlength=g.n)
        self.inboxes = [
            ChunkedBuffer(max(1, int(indeg[ids].sum())), cfg.chunk_capacity) for ids in self.owned
        ]
        self.source = s


class OwnerState:
    """Per-thread view: owned vertices, fringe priority structures, inbox.

    The three keys of an owned fringe vertex are ``d``, ``d - min_in`` and
    ``d + min_out``. In ``linear_array`` mode they live in plain arrays that
    are scanned for minima; in ``addressable_heap`` mode in three heaps.
    """

    def __init__(self, tid: int, shared: _Shared):
        self.tid = tid
        self.sh = shared
        self.owned = shared.owned[tid]
        self.inbox = shared.inboxes[tid]
        self.heap_mode = shared.cfg.queue_mode == "addressable_heap"
        k = self.owned.size
        if self.heap_mode:
            self.h_d = AddressableHeap(k)
            self.h_in = AddressableHeap(k)
            self.h_out = AddressableHeap(k)
        else:
            self.key_d = np.full(k, np.inf)
            self.key_out = np.full(k, np.inf)
        self.fringe_count = 0
        self.relaxations = 0
        self.min_in_local = None
        self.min_out_local = None

    # -- preprocessing -------------------------------------------------
    def preprocess(self) -> None:
        g, sh = self.sh.g, self.sh
        eids, owner = csr_gather(g.fwd_offsets, self.owned)
        mo = np.full(self.owned.size, np.inf)
        np.minimum.at(mo, owner, g.fwd_costs[eids])
        sh.min_out[self.owned] = mo
        sh.min_in.update(g.fwd_targets[eids], g.fwd_costs[eids])

    def load_minima(self) -> None:
        self.min_in_local = self.sh.min_in.values[self.owned]
        self.min_out_local = self.sh.min_out[self.owned]

    # -- fringe structure ----------------------------------------------
    def _set_keys(self, loc: np.ndarray, dist: np.ndarray) -> None:
        if self.heap_mode:
            mi, mo = self.min_in_local, self.min_out_local
            for i, dv in zip(loc.tolist(), dist.tolist()):
                self.h_d.push(i, dv)
                self.h_in.push(i, dv - mi[i])
                self.h_out.push(i, dv + mo[i])
        else:
            self.key_d[loc] = dist
            self.key_out[loc] = dist + self.min_out_local[loc]

    def _drop_keys(self, loc: np.ndarray) -> None:
        if self.heap_mode:
            for i in loc.tolist():
                self.h_d.remove(i)
                self.h_in.remove(i)
                self.h_out.remove(i)
        else:
            self.key_d[loc] = np.inf
            self.key_out[loc] = np.inf

    def local_minima(self) -> tuple[float, float]:
        if self.heap_mode:
            return self.h_d.min_key(), self.h_out.min_key()
        if self.owned.size == 0:
            return np.inf, np.inf
        return float(self.key_d.min()), float(self.key_out.min())

    def brute_minima(self) -> tuple[float, float]:
        mask = self.sh.label[self.owned] == F
        d = self.sh.d[self.owned][mask]
        if d.size == 0:
            return np.inf, np.inf
        return float(d.min()), float((d + self.min_out_local[mask]).min())

    def apply(self, targets: np.ndarray, dists: np.ndarray) -> None:
        """Lower tentative distances of owned ``targets`` (owner only)."""
        sh = self.sh
        targets, dists = min_per_target(targets, dists)
        lab = sh.label[targets]
        settled = lab == S
        if settled.any():
            bad = dists[settled] < sh.d[targets[settled]]
            if bad.any():
                v = int(targets[settled][np.argmax(bad)])
                raise LabelSettingViolation(f"relaxation would lower settled vertex {v}")
            targets, dists, lab = targets[~settled], dists[~settled], lab[~settled]
        better = dists < sh.d[targets]
        targets, dists, lab = targets[better], dists[better], lab[better]
        if targets.size == 0:
            return
        sh.d[targets] = dists
        sh.approx[targets] = np.minimum(sh.approx[targets], dists)
        fresh = lab == U
        sh.label[targets[fresh]] = F
        self.fringe_count += int(fresh.sum())
        self._set_keys(sh.local[targets], dists)

    # -- phase steps -----------------------------------------------------
    def identify(self, gmin: float, gout: float) -> np.ndarray:
        """Owned fringe vertices meeting the configured criterion; removes them."""
        cfg = self.sh.cfg
        if self.heap_mode:
            loc = self._identify_heap(gmin, gout, cfg.use_in, cfg.use_out)
        else:
            fr = self.key_d < np.inf
            sel = np.zeros(self.owned.size, dtype=bool)
            if cfg.use_in:
                sel |= self.key_d <= gmin + self.min_in_local
            if cfg.use_out:
                sel |= self.key_d <= gout
            loc = np.nonzero(sel & fr)[0]
            self._drop_keys(loc)
        self.fringe_count -= loc.size
        return self.owned[loc]

    def _identify_heap(self, gmin, gout, use_in, use_out) -> np.ndarray:
        picked: list[int] = []
        if use_out:
            while self.h_d and self.h_d.min_key() <= gout:
                _, i = self.h_d.pop()
                self.h_in.remove(i)
                self.h_out.remove(i)
                picked.append(i)
        if use_in:
            # heap keys are d - min_in; confirm with the additive test
            slack = 1e-9 * (1.0 + abs(gmin))
            mi = self.min_in_local
            held = []
            while self.h_in and self.h_in.min_key() <= gmin + slack:
                key, i = self.h_in.pop()
                if self.h_d.key(i) <= gmin + mi[i]:
                    self.h_d.remove(i)
                    self.h_out.remove(i)
                    picked.append(i)
                else:
                    held.append((i, key))
            for i, key in held:
                self.h_in.push(i, key)
        return np.array(sorted(picked), dtype=np.int64)

    def settle(self, X: np.ndarray) -> None:
        """Relax out-edges of ``X``: owned targets now, others via inboxes."""
        sh, g = self.sh, self.sh.g
        sh.label[X] = S
        eids, owner = csr_gather(g.fwd_offsets, X)
        self.relaxations += eids.size
        if eids.size == 0:
            return
        t = g.fwd_targets[eids]
        nd = sh.d[X][owner] + g.fwd_costs[eids]
        dest = sh.owner[t]
        mine = dest == self.tid
        if mine.any():
            self.apply(t[mine], nd[mine])
        rt, rd, rdest = t[~mine], nd[~mine], dest[~mine]
        useful = rd < sh.approx[rt]
        rt, rd, rdest = rt[useful], rd[useful], rdest[useful]
        if rt.size == 0:
            return
        # racy plain store; the array only filters messages
        sh.approx[rt] = np.minimum(sh.approx[rt], rd)
        order = np.argsort(rdest, kind="stable")
        rt, rd, rdest = rt[order], rd[order], rdest[order]
        cuts = np.searchsorted(rdest, np.arange(sh.cfg.threads + 1))
        for q in range(sh.cfg.threads):
            lo, hi = cuts[q], cuts[q + 1]
            if hi > lo:
                sh.inboxes[q].extend(rt[lo:hi], rd[lo:hi])

    def exchange_and_apply(self) -> int:
        """Drain this owner's inbox into its tentative distances."""
        targets, dists = self.inbox.drain()
        if targets.size:
            self.apply(targets, dists)
        return targets.size


def identify_phase(state: OwnerState, global_min: float, global_out: float) -> np.ndarray:
    return state.identify(global_min, global_out)


def exchange_and_apply(state: OwnerState) -> int:
    return state.exchange_and_apply()


@dataclass
class ParallelRun:
    result: SsspResult
    trace: PhaseTrace
    thread_seconds: list[float]
    preprocess_seconds: list[float]

    @property
    def wall_ms(self) -> float:
        return 1000.0 * max(self.thread_seconds)

    @property
    def preprocess_ms(self) -> float:
        return 1000.0 * max(self.preprocess_seconds)

    def __iter__(self):
        yield self.result
        yield self.trace
        yield {"thread_seconds": self.thread_seconds, "wall_ms": self.wall_ms, "preprocess_ms": self.preprocess_ms}


def parallel_sssp(g: Graph, s: int, cfg: RunConfig | None = None) -> ParallelRun:
    """Phased SSSP with ``cfg.threads`` workers; see the module docstring."""
    cfg = cfg or RunConfig()
    s = check_source(g, s)
    team = Team(cfg.threads)
    sh = _Shared(g, s, cfg)
    owners = [OwnerState(t, sh) for t in range(cfg.threads)]
    trace = PhaseTrace()
    prep = [0.0] * cfg.threads

    def body(tid: int) -> None:
        me = owners[tid]
        t0 = time.perf_counter()
        me.preprocess()
        team.wait()
        me.load_minima()
        prep[tid] = time.perf_counter() - t0
        if sh.owner[s] == tid:
            me.apply(np.array([s]), np.array([0.0]))
        team.wait()
        it = 0
        settled_last = 0
        while True:
            lmin, lout = me.local_minima()
            gmin, gout, fringe, settled = team.allreduce(tid, (lmin, lout), (me.fringe_count, settled_last))
            # iteration 0 settles the source alone and is not a counted phase
            if tid == 0 and it >= 2:
                trace.settled.append(int(settled))
            if gmin == np.inf:
                break
            if tid == 0 and it >= 1:
                trace.fringe_before.append(int(fringe))
            if cfg.debug_checks:
                _check_owner(me, lmin, lout)
            X = me.identify(gmin, gout)
            settled_last = X.size
            me.settle(X)
            team.wait()
            me.exchange_and_apply()
            if cfg.debug_checks:
                _check_approx(me)
            it += 1
            team.wait()

    _, seconds = team.run(body)
    relax = sum(o.relaxations for o in owners)
    trace.relaxations = relax
    trace.settled_total = int((sh.label == S).sum())
    result = SsspResult(sh.d.copy(), None, relax, trace.settled_total)
    return ParallelRun(result, trace, seconds, prep)


def _check_owner(me: OwnerState, lmin: float, lout: float) -> None:
    bmin, bout = me.brute_minima()
    if (lmin, lout) != (bmin, bout):
        raise AssertionError(f"owner {me.tid}: queue minima {(lmin, lout)} != brute force {(bmin, bout)}")


def _check_approx(me: OwnerState) -> None:
    ids = me.owned
    if np.any(me.sh.approx[ids] < me.sh.d[ids]):
        raise AssertionError(f"owner {me.tid}: approximate distance below tentative distance")


def run_record(g: Graph, cfg: RunConfig, run: ParallelRun, seed) -> dict:
    """One output row: ``algo,criterion,queue_mode,threads,n,m,seed,phases,wall_ms,preprocess_ms``."""
    return {
        "algo": "phased",
        "criterion": cfg.criterion,
        "queue_mode": cfg.queue_mode,
        "threads": cfg.threads,
        "n": g.n,
        "m": g.m,
        "seed": seed,
        "phases": run.trace.phases,
        "wall_ms": round(run.wall_ms, 3),
        "preprocess_ms": round(run.preprocess_ms, 3),
    }
