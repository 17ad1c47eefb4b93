"""Generic phased SSSP driven by vertex-correctness criteria.

Every phase evaluates the chosen criterion on all fringe vertices against the
state at the start of the phase, settles *all* vertices that satisfy it and
relaxes their outgoing edges. Criteria are written in additive form,
``d[v] <= min_F d + m`` rather than ``d[v] - m <= min_F d``, which keeps them
sound under floating point rounding.

The source is settled during initialization; the recorded trace starts with
the first phase after that, so a path of L edges takes L phases under ORACLE.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, GraphMinima, build_reverse, compute_minima
from .sssp import SsspResult, check_source, dijkstra

U, F, S = 0, 1, 2


class Crit(enum.Enum):
    DIJK = "dijk"
    ORACLE = "oracle"
    IN_STATIC = "in_static"
    OUT_STATIC = "out_static"
    IN_SIMPLE = "in_simple"
    OUT_SIMPLE = "out_simple"
    IN_FULL = "in_full"
    OUT_WEAK = "out_weak"
    OUT_FULL = "out_full"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AnyOf:
    """Disjunction of base criteria."""

    kinds: tuple[Crit, ...]

    def __post_init__(self):
        if not self.kinds:
            raise ValueError("a disjunction needs at least one criterion")
        if len(set(self.kinds)) != len(self.kinds):
            raise ValueError("duplicate criterion in disjunction")
        if not all(isinstance(k, Crit) for k in self.kinds):
            raise TypeError("disjunctions combine base criteria only")

    def __str__(self) -> str:
        for alias, value in ALIASES.items():
            if value == self:
                return alias
        return "+".join(k.value for k in self.kinds)


Criterion = Crit | AnyOf

STATIC_OR = AnyOf((Crit.IN_STATIC, Crit.OUT_STATIC))
SIMPLE_OR = AnyOf((Crit.IN_SIMPLE, Crit.OUT_SIMPLE))
FULL_OR = AnyOf((Crit.IN_FULL, Crit.OUT_FULL))
ALIASES = {"static_or": STATIC_OR, "simple_or": SIMPLE_OR, "full_or": FULL_OR}

IN_FAMILY = {Crit.IN_STATIC, Crit.IN_SIMPLE, Crit.IN_FULL}
DYNAMIC = {Crit.IN_SIMPLE, Crit.IN_FULL, Crit.OUT_SIMPLE, Crit.OUT_WEAK, Crit.OUT_FULL}


def parse_criterion(text: str) -> Criterion:
    """Parse ``in_static``, ``static-or`` or ``in_static+out_static`` style names."""
    key = text.strip().lower().replace("-", "_")
    if key in ALIASES:
        return ALIASES[key]
    parts = [p for p in key.replace("|", "+").split("+") if p]
    try:
        kinds = tuple(Crit(p) for p in parts)
    except ValueError:
        raise ValueError(f"unknown criterion {text!r}") from None
    if len(kinds) == 1:
        return kinds[0]
    return AnyOf(kinds)


def kinds_of(crit: Criterion) -> tuple[Crit, ...]:
    return crit.kinds if isinstance(crit, AnyOf) else (crit,)


class CriterionViolation(RuntimeError):
    """A complete criterion selected no vertex, or an invariant broke."""


class LabelSettingViolation(RuntimeError):
    """A relaxation would lower the distance of a settled vertex."""


def csr_gather(offsets: np.ndarray, verts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Edge ids of all CSR rows in ``verts`` and the position in ``verts`` owning each."""
    lo = offsets[verts]
    deg = offsets[verts + 1] - lo
    total = int(deg.sum())
    if total == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    owner = np.repeat(np.arange(verts.size, dtype=np.int64), deg)
    starts = np.cumsum(deg) - deg
    eids = np.arange(total, dtype=np.int64) - starts[owner] + lo[owner]
    return eids, owner


class SortedAdjacency:
    """Per-vertex edge lists presorted by key, with lazily advanced heads.

    An entry is permanently dead once the label of its other endpoint reaches
    ``dead_from`` (labels only grow U -> F -> S). ``first`` moves heads past
    dead entries and returns the smallest live key.
    """

    def __init__(self, offsets: np.ndarray, other: np.ndarray, keys: np.ndarray, dead_from: int):
        n = offsets.shape[0] - 1
        row = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
        order = np.lexsort((keys, row))
        self.offsets = offsets
        self.other = other[order]
        self.keys = keys[order]
        self.dead_from = dead_from
        self.head = offsets[:-1].copy()

    def first(self, verts: np.ndarray, label: np.ndarray, only: int | None = None) -> np.ndarray:
        """Smallest live key for each of the (unique) ``verts``.

        With ``only`` the search continues past live entries whose other
        endpoint does not carry that label, without moving the heads.
        """
        end = self.offsets[verts + 1]
        head = self.head[verts]
        idx = np.arange(verts.size)
        while idx.size:
            pos = head[idx]
            live = pos < end[idx]
            idx, pos = idx[live], pos[live]
            idx = idx[label[self.other[pos]] >= self.dead_from]
            head[idx] += 1
        self.head[verts] = head
        if only is not None:
            head = head.copy()
            idx = np.arange(verts.size)
            while idx.size:
                pos = head[idx]
                live = pos < end[idx]
                idx, pos = idx[live], pos[live]
                idx = idx[label[self.other[pos]] != only]
                head[idx] += 1
        out = np.full(verts.size, np.inf)
        ok = head < end
        out[ok] = self.keys[head[ok]]
        return out


class DynamicMinima:
    """Criterion minima restricted to the current fringe and unexplored sets.

    ``in_f(v)``  = min c(w, v), w in F          ``in_u(v)``  = min c(w, v) + M'(w), w in U
    ``out_f(v)`` = min c(v, w), w in F          ``out_u(v)`` = min c(v, w) + M(w), w in U
    ``in_live(v)`` / ``out_live(v)`` range over all non-settled neighbours.
    """

    def __init__(self, g: Graph, minima: GraphMinima, *, need_in: bool, need_out: bool):
        self.need_in = need_in
        self.need_out = need_out
        if need_in:
            g = build_reverse(g)
            self._in_cost = SortedAdjacency(g.rev_offsets, g.rev_sources, g.rev_costs, S)
            two = g.rev_costs + minima.min_in[g.rev_sources]
            self._in_two = SortedAdjacency(g.rev_offsets, g.rev_sources, two, F)
        if need_out:
            self._out_cost = SortedAdjacency(g.fwd_offsets, g.fwd_targets, g.fwd_costs, S)
            two = g.fwd_costs + minima.min_out[g.fwd_targets]
            self._out_two = SortedAdjacency(g.fwd_offsets, g.fwd_targets, two, F)

    def in_live(self, verts, label):
        return self._in_cost.first(verts, label)

    def in_f(self, verts, label):
        return self._in_cost.first(verts, label, only=F)

    def in_u(self, verts, label):
        return self._in_two.first(verts, label)

    def out_live(self, verts, label):
        return self._out_cost.first(verts, label)

    def out_f(self, verts, label):
        return self._out_cost.first(verts, label, only=F)

    def out_u(self, verts, label):
        return self._out_two.first(verts, label)


@dataclass
class PhaseTrace:
    settled: list[int] = field(default_factory=list)
    fringe_before: list[int] = field(default_factory=list)
    relaxations: int = 0
    settled_total: int = 0

    @property
    def phases(self) -> int:
        return len(self.settled)

    @property
    def sum_fringe(self) -> int:
        return int(sum(self.fringe_before))

    def record(self, settled: int, fringe: int) -> None:
        self.settled.append(settled)
        self.fringe_before.append(fringe)

    def rows(self):
        for i, (k, f) in enumerate(zip(self.settled, self.fringe_before), start=1):
            yield {"phase": i, "settled": k, "fringe_before": f}

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["phase", "settled", "fringe_before"])
            w.writeheader()
            w.writerows(self.rows())


class SimState:
    """Partition S/F/U, tentative distances and criterion data for one run.

    ``fringe`` holds the ids of F in insertion order. Use :meth:`satisfying`
    to evaluate criteria on the current state and :meth:`settle` to finish a
    phase.
    """

    def __init__(
        self,
        g: Graph,
        s: int,
        *,
        minima: GraphMinima | None = None,
        oracle_dist: np.ndarray | None = None,
        dynamic: tuple[bool, bool] = (True, True),
    ):
        s = check_source(g, s)
        self.g = g
        self.s = s
        self.minima = minima if minima is not None else compute_minima(g)
        self.oracle_dist = oracle_dist
        need_in, need_out = dynamic
        self.dyn = DynamicMinima(g, self.minima, need_in=need_in, need_out=need_out) if (need_in or need_out) else None
        self.label = np.zeros(g.n, dtype=np.int8)
        self.d = np.full(g.n, np.inf)
        self.parent = np.full(g.n, -1, dtype=np.int64)
        self.label[s] = F
        self.d[s] = 0.0
        self.fringe = np.array([s], dtype=np.int64)
        self.relaxations = 0
        self.settled_count = 0
        self._cache: dict = {}

    # ------------------------------------------------------------------
    @property
    def fringe_min(self) -> float:
        return float(self.d[self.fringe].min()) if self.fringe.size else np.inf

    def _dyn(self):
        if self.dyn is None:
            raise RuntimeError("dynamic minima were not enabled for this state")
        return self.dyn

    def _get(self, name, fn):
        if name not in self._cache:
            self._cache[name] = fn()
        return self._cache[name]

    def out_threshold(self, kind: Crit) -> float:
        """Right-hand side of an OUT-family criterion, shared by all of F."""
        return self._get(("out", kind), lambda: self._out_threshold(kind))

    def _out_threshold(self, kind: Crit) -> float:
        Fv, label = self.fringe, self.label
        dF = self.d[Fv]
        if kind is Crit.OUT_STATIC:
            m = self.minima.min_out[Fv]
        elif kind is Crit.OUT_SIMPLE:
            m = self._dyn().out_live(Fv, label)
        elif kind is Crit.OUT_WEAK:
            dyn = self._dyn()
            m = np.minimum(dyn.out_f(Fv, label), dyn.out_u(Fv, label))
        elif kind is Crit.OUT_FULL:
            m = np.minimum(self._dyn().out_f(Fv, label), self.out_u_full(Fv))
        else:
            raise ValueError(kind)
        return float(np.min(dF + m)) if Fv.size else np.inf

    def out_u_full(self, verts: np.ndarray) -> np.ndarray:
        """min over (v, w), w in U, (w, w') with w' not settled of c(v, w) + c(w, w')."""
        g = self.g
        eids, owner = csr_gather(g.fwd_offsets, verts)
        out = np.full(verts.size, np.inf)
        if eids.size:
            w = g.fwd_targets[eids]
            sel = self.label[w] == U
            if sel.any():
                eids, owner, w = eids[sel], owner[sel], w[sel]
                uw, inv = np.unique(w, return_inverse=True)
                second = self._dyn().out_live(uw, self.label)[inv]
                np.minimum.at(out, owner, g.fwd_costs[eids] + second)
        return out

    def in_minimum(self, kind: Crit, verts: np.ndarray) -> np.ndarray:
        """Subtrahend of an IN-family criterion for each of ``verts``."""
        label = self.label
        if kind is Crit.IN_STATIC:
            return self.minima.min_in[verts]
        dyn = self._dyn()
        if kind is Crit.IN_SIMPLE:
            return dyn.in_live(verts, label)
        if kind is Crit.IN_FULL:
            return np.minimum(dyn.in_f(verts, label), dyn.in_u(verts, label))
        raise ValueError(kind)

    def satisfying(self, crit: Criterion) -> np.ndarray:
        """Boolean mask over ``self.fringe`` of vertices meeting ``crit`` now."""
        mask = np.zeros(self.fringe.size, dtype=bool)
        for kind in kinds_of(crit):
            mask |= self._get(("sat", kind), lambda: self._satisfying(kind))
        return mask

    def _satisfying(self, kind: Crit) -> np.ndarray:
        Fv = self.fringe
        dF = self.d[Fv]
        if kind is Crit.DIJK:
            return dF == self.fringe_min
        if kind is Crit.ORACLE:
            if self.oracle_dist is None:
                raise ValueError("ORACLE needs exact distances")
            return dF == self.oracle_dist[Fv]
        if kind in IN_FAMILY:
            return dF <= self.fringe_min + self.in_minimum(kind, Fv)
        return dF <= self.out_threshold(kind)

    def satisfies(self, crit: Criterion, v: int) -> bool:
        hit = np.nonzero(self.fringe == v)[0]
        if hit.size == 0:
            raise ValueError(f"vertex {v} is not in the fringe")
        return bool(self.satisfying(crit)[hit[0]])

    # ------------------------------------------------------------------
    def settle(self, mask: np.ndarray) -> np.ndarray:
        """Settle ``fringe[mask]``, relax their edges and return the settled ids.

        All relaxations see distances from before the phase, so the result
        does not depend on the order in which settled vertices are processed.
        """
        g = self.g
        X = self.fringe[mask]
        self.fringe = self.fringe[~mask]
        self.label[X] = S
        self.settled_count += X.size
        self._cache.clear()
        eids, owner = csr_gather(g.fwd_offsets, X)
        self.relaxations += eids.size
        if eids.size == 0:
            return X
        t = g.fwd_targets[eids]
        src = X[owner]
        nd = self.d[src] + g.fwd_costs[eids]
        into_s = self.label[t] == S
        if into_s.any():
            bad = nd[into_s] < self.d[t[into_s]]
            if bad.any():
                i = np.nonzero(into_s)[0][np.argmax(bad)]
                raise LabelSettingViolation(
                    f"edge {int(src[i])}->{int(t[i])} would lower settled distance "
                    f"{self.d[t[i]]!r} to {nd[i]!r}"
                )
            keep = ~into_s
            t, src, nd = t[keep], src[keep], nd[keep]
        order = np.lexsort((src, nd, t))
        t, src, nd = t[order], src[order], nd[order]
        first = np.ones(t.size, dtype=bool)
        first[1:] = t[1:] != t[:-1]
        t, src, nd = t[first], src[first], nd[first]
        better = nd < self.d[t]
        t, src, nd = t[better], src[better], nd[better]
        fresh = t[self.label[t] == U]
        self.d[t] = nd
        self.parent[t] = src
        self.label[fresh] = F
        self.fringe = np.concatenate([self.fringe, fresh])
        return X

    def dump(self) -> str:
        Fv = self.fringe
        return (
            f"|S|={self.settled_count} |F|={Fv.size} min_F d={self.fringe_min!r} "
            f"fringe={Fv[:20].tolist()} d={self.d[Fv[:20]].tolist()}"
        )

    def result(self) -> SsspResult:
        parent = self.parent.copy()
        return SsspResult(self.d.copy(), parent, self.relaxations, self.settled_count)


def _dynamic_needs(crit: Criterion) -> tuple[bool, bool]:
    kinds = kinds_of(crit)
    need_in = any(k in (Crit.IN_SIMPLE, Crit.IN_FULL) for k in kinds)
    need_out = any(k in (Crit.OUT_SIMPLE, Crit.OUT_WEAK, Crit.OUT_FULL) for k in kinds)
    return need_in, need_out


def run_phased(
    g: Graph,
    s: int,
    crit: Criterion,
    *,
    minima: GraphMinima | None = None,
    oracle_dist: np.ndarray | None = None,
    verify_dist: np.ndarray | None = None,
    observer=None,
    dynamic: tuple[bool, bool] | None = None,
) -> tuple[SsspResult, PhaseTrace]:
    """Run the phased algorithm with ``crit`` from source ``s``.

    ORACLE distances are computed with :func:`dijkstra` when not supplied.
    With ``verify_dist`` every settled vertex is checked against the exact
    distances at the moment it is settled. ``observer(state)`` is called at
    the start of every counted phase, before anything is settled.
    ``dynamic`` forces the (IN, OUT) dynamic minima on or off; by default they
    are built only when ``crit`` needs them.
    """
    check_source(g, s)
    if any(k is Crit.ORACLE for k in kinds_of(crit)) and oracle_dist is None:
        oracle_dist = dijkstra(g, s).dist
    state = SimState(g, s, minima=minima, oracle_dist=oracle_dist, dynamic=dynamic or _dynamic_needs(crit))
    trace = PhaseTrace()
    state.settle(np.ones(1, dtype=bool))
    while state.fringe.size:
        if observer is not None:
            observer(state)
        mask = state.satisfying(crit)
        chosen = int(mask.sum())
        if chosen == 0:
            raise CriterionViolation(f"criterion {crit} settled no vertex: {state.dump()}")
        trace.record(chosen, int(state.fringe.size))
        if verify_dist is not None:
            X = state.fringe[mask]
            wrong = state.d[X] != verify_dist[X]
            if wrong.any():
                v = int(X[np.argmax(wrong)])
                raise CriterionViolation(
                    f"criterion {crit} settled vertex {v} with d={state.d[v]!r}, true {verify_dist[v]!r}"
                )
        state.settle(mask)
    trace.relaxations = state.relaxations
    trace.settled_total = state.settled_count
    return state.result(), trace


def settle_set(state: SimState, settled) -> np.ndarray:
    """Settle the given fringe vertices in one phase (see :meth:`SimState.settle`)."""
    ids = np.asarray(settled, dtype=np.int64)
    if ids.size and np.any(state.label[ids] != F):
        raise ValueError("only fringe vertices can be settled")
    return state.settle(np.isin(state.fringe, ids))


def eval_criterion(state: SimState, crit: Criterion, v: int) -> bool:
    """Whether fringe vertex ``v`` meets ``crit`` in the current state."""
    return state.satisfies(crit, v)


def oracle_phase_bound(g: Graph, s: int, dist: np.ndarray | None = None) -> int:
    """Largest, over reachable vertices, minimum edge count among shortest paths.

    Computed by breadth-first search over the subgraph of tight edges
    ``dist[u] + c(u, v) == dist[v]``.
    """
    check_source(g, s)
    if dist is None:
        dist = dijkstra(g, s).dist
    src, dst, cost = g.edges()
    tight = np.isfinite(dist[src]) & (dist[src] + cost == dist[dst])
    tg = _subgraph(g.n, src[tight], dst[tight])
    seen = np.zeros(g.n, dtype=bool)
    seen[s] = True
    frontier = np.array([s], dtype=np.int64)
    hops = 0
    while True:
        eids, _ = csr_gather(tg[0], frontier)
        nxt = np.unique(tg[1][eids])
        nxt = nxt[~seen[nxt]]
        if nxt.size == 0:
            return hops
        seen[nxt] = True
        frontier = nxt
        hops += 1


def _subgraph(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(src, kind="stable")
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
    return offsets, dst[order]
