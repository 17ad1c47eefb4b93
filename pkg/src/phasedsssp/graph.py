"""CSR graphs, random generators and SNAP-style edge-list I/O.

All generators draw from numpy's PCG64 through a ``SeedSequence`` keyed by the
user seed. The structure and the edge weights use two independent child
streams, so the topology of a graph does not depend on the weight mode.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

WeightMode = Literal["uniform01", "keep"]

#: Largest Kronecker exponent accepted; vertex ids must fit in a signed 32-bit int.
MAX_KRONECKER_EXPONENT = 31

GRAPH500_INITIATOR = (0.57, 0.19, 0.19, 0.05)


class GraphSizeError(ValueError):
    """Requested graph is too large to represent."""


class EdgeListParseError(ValueError):
    def __init__(self, path, lineno: int, line: str, reason: str):
        super().__init__(f"{path}:{lineno}: {reason}: {line.rstrip()!r}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable directed graph in compressed sparse row form.

    ``rev_*`` arrays hold the transposed graph and are ``None`` until
    :func:`build_reverse` is called. ``rev_edge`` maps each reverse entry back
    to its forward edge index.
    """

    n: int
    fwd_offsets: np.ndarray
    fwd_targets: np.ndarray
    fwd_costs: np.ndarray
    rev_offsets: np.ndarray | None = None
    rev_sources: np.ndarray | None = None
    rev_costs: np.ndarray | None = None
    rev_edge: np.ndarray | None = None
    name: str = field(default="graph", compare=False)

    def __post_init__(self):
        for arr in (self.fwd_offsets, self.fwd_targets, self.fwd_costs):
            arr.setflags(write=False)
        if self.rev_offsets is not None:
            for arr in (self.rev_offsets, self.rev_sources, self.rev_costs, self.rev_edge):
                arr.setflags(write=False)

    @property
    def m(self) -> int:
        return int(self.fwd_targets.shape[0])

    @property
    def has_reverse(self) -> bool:
        return self.rev_offsets is not None

    def out_degree(self) -> np.ndarray:
        return np.diff(self.fwd_offsets)

    def sources(self) -> np.ndarray:
        """Source vertex of every forward edge, aligned with ``fwd_targets``."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.out_degree())

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.sources(), self.fwd_targets, self.fwd_costs

    def out_edges(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.fwd_offsets[v], self.fwd_offsets[v + 1]
        return self.fwd_targets[lo:hi], self.fwd_costs[lo:hi]

    def in_edges(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        if not self.has_reverse:
            raise ValueError("reverse adjacency not built; call build_reverse()")
        lo, hi = self.rev_offsets[v], self.rev_offsets[v + 1]
        return self.rev_sources[lo:hi], self.rev_costs[lo:hi]

    def check(self) -> None:
        """Validate the structural invariants, raising ``ValueError``."""
        off = self.fwd_offsets
        if off.shape != (self.n + 1,) or off[0] != 0 or off[-1] != self.m:
            raise ValueError("bad offsets array")
        if np.any(np.diff(off) < 0):
            raise ValueError("offsets must be non-decreasing")
        if self.m and (self.fwd_targets.min() < 0 or self.fwd_targets.max() >= self.n):
            raise ValueError("edge target out of range")
        if not np.all(np.isfinite(self.fwd_costs)) or np.any(self.fwd_costs < 0):
            raise ValueError("edge costs must be finite and non-negative")


def from_edges(n: int, src, dst, cost, *, name: str = "graph") -> Graph:
    """Build a graph from parallel edge arrays.

    Edges are grouped by source with a stable sort, so edges of one vertex
    keep their input order.
    """
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    cost = np.asarray(cost, dtype=np.float64)
    if not (src.shape == dst.shape == cost.shape):
        raise ValueError("edge arrays must have equal length")
    if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
        raise ValueError("vertex id out of range")
    if cost.size and (not np.all(np.isfinite(cost)) or cost.min() < 0):
        raise ValueError("edge costs must be finite and non-negative")
    order = np.argsort(src, kind="stable")
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
    return Graph(n, offsets, dst[order].copy(), cost[order].copy(), name=name)


def build_reverse(g: Graph) -> Graph:
    """Return ``g`` with the transposed CSR populated (no-op if present)."""
    if g.has_reverse:
        return g
    src = g.sources()
    order = np.argsort(g.fwd_targets, kind="stable")
    offsets = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(g.fwd_targets, minlength=g.n), out=offsets[1:])
    return Graph(
        g.n,
        g.fwd_offsets,
        g.fwd_targets,
        g.fwd_costs,
        rev_offsets=offsets,
        rev_sources=src[order],
        rev_costs=g.fwd_costs[order],
        rev_edge=order.astype(np.int64),
        name=g.name,
    )


@dataclass(frozen=True, eq=False)
class GraphMinima:
    """Cheapest outgoing (``min_out``) and incoming (``min_in``) edge per vertex."""

    min_out: np.ndarray
    min_in: np.ndarray


def segment_min(offsets: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Minimum of ``values`` over each CSR segment; ``inf`` for empty segments."""
    n = offsets.shape[0] - 1
    out = np.full(n, np.inf)
    nonempty = offsets[1:] > offsets[:-1]
    if values.size:
        out[nonempty] = np.minimum.reduceat(values, offsets[:-1][nonempty])
    return out


def compute_minima(g: Graph) -> GraphMinima:
    min_out = segment_min(g.fwd_offsets, g.fwd_costs)
    min_in = np.full(g.n, np.inf)
    np.minimum.at(min_in, g.fwd_targets, g.fwd_costs)
    return GraphMinima(min_out, min_in)


# --------------------------------------------------------------------------
# generators


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    structure, weights = np.random.SeedSequence(int(seed) & (2**64 - 1)).spawn(2)
    return np.random.default_rng(structure), np.random.default_rng(weights)


def _weights(rng: np.random.Generator, m: int) -> np.ndarray:
    return rng.random(m)


def gen_uniform(n: int, p: float, seed: int, *, weight_mode: WeightMode = "uniform01") -> Graph:
    """Sample the directed G(n, p) graph without self-loops.

    Ordered pairs (u, v), u != v, are enumerated as ``u * (n - 1) + j`` and
    selected by geometric skipping, which costs O(m) expected time.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    srng, wrng = _streams(seed)
    total = n * (n - 1)
    if total == 0 or p == 0.0:
        picks = np.zeros(0, dtype=np.int64)
    elif p == 1.0:
        picks = np.arange(total, dtype=np.int64)
    else:
        chunks = []
        pos = -1
        batch = max(16, int(total * p * 1.1) + 16)
        while True:
            gaps = srng.geometric(p, size=batch)
            idx = pos + np.cumsum(gaps, dtype=np.int64)
            chunks.append(idx[idx < total])
            if idx[-1] >= total:
                break
            pos = int(idx[-1])
            batch = max(16, int((total - pos) * p * 1.1) + 16)
        picks = np.concatenate(chunks)
    src = picks // (n - 1) if n > 1 else picks
    j = picks - src * (n - 1)
    dst = j + (j >= src)
    if weight_mode == "uniform01":
        cost = _weights(wrng, picks.size)
    else:
        cost = np.ones(picks.size)
    return Graph(
        n,
        np.searchsorted(src, np.arange(n + 1)).astype(np.int64),
        dst.astype(np.int64),
        cost,
        name=f"uniform(n={n},p={p:g},seed={seed})",
    )


def _check_initiator(initiator) -> np.ndarray:
    init = np.asarray(initiator, dtype=np.float64).reshape(-1)
    if init.shape != (4,):
        raise ValueError("initiator must have four entries (2x2 matrix)")
    if np.any(~np.isfinite(init)) or np.any(init <= 0):
        raise ValueError("initiator entries must be positive")
    return init


def kronecker_draw_count(initiator, k: int) -> int:
    """Number of edge draws: the expected edge count round((sum initiator)^k)."""
    init = _check_initiator(initiator)
    total = float(init.sum()) ** k
    if not math.isfinite(total) or total > 2**40:
        raise GraphSizeError(f"Kronecker graph with k={k} would need {total:.3g} edge draws")
    return int(round(total))


def kronecker_quadrants(initiator, k: int, draws: int, rng: np.random.Generator) -> np.ndarray:
    """Quadrant choices (0..3, row-major) per draw and recursion level."""
    init = _check_initiator(initiator)
    return rng.choice(4, size=(draws, k), p=init / init.sum())


def gen_kronecker(initiator, k: int, seed: int, *, weight_mode: WeightMode = "uniform01") -> Graph:
    """Sample a Kronecker graph on 2**k vertices by recursive quadrant descent.

    Each draw picks, level by level, one of the four initiator cells with
    probability proportional to its entry. Self-loops and repeated edges are
    dropped, so the realized edge count can fall short of the draw count.
    """
    if k < 1:
        raise ValueError("Kronecker exponent must be >= 1")
    if k > MAX_KRONECKER_EXPONENT:
        raise GraphSizeError(f"2**{k} vertices exceeds the supported maximum 2**{MAX_KRONECKER_EXPONENT}")
    draws = kronecker_draw_count(initiator, k)
    srng, wrng = _streams(seed)
    quad = kronecker_quadrants(initiator, k, draws, srng)
    bits = np.int64(1) << np.arange(k - 1, -1, -1, dtype=np.int64)
    src = (quad >> 1).astype(np.int64) @ bits
    dst = (quad & 1).astype(np.int64) @ bits
    n = 1 << k
    keep = src != dst
    key = src[keep] * n + dst[keep]
    _, first = np.unique(key, return_index=True)
    first.sort()
    src, dst = src[keep][first], dst[keep][first]
    if weight_mode == "uniform01":
        cost = _weights(wrng, src.size)
    else:
        cost = np.ones(src.size)
    return from_edges(n, src, dst, cost, name=f"kronecker(k={k},seed={seed})")


# --------------------------------------------------------------------------
# file I/O

_NODES_RE = re.compile(r"#\s*Nodes:\s*(\d+)")


def load_edge_list(
    path,
    symmetrize: bool = False,
    weight_mode: WeightMode = "uniform01",
    seed: int = 0,
    *,
    relabel: bool = True,
) -> Graph:
    """Read a SNAP-style edge list.

    Lines starting with ``#`` are comments. Each other non-blank line is
    ``src dst`` with an optional third ``cost`` column, which is only used
    when ``weight_mode == "keep"``. With ``relabel`` (the default) vertex ids
    are compacted to ``0..n-1`` in order of first appearance; otherwise ids are
    kept and ``n`` is taken from a ``# Nodes: N`` header or the largest id.

    With ``symmetrize`` every edge (a, b) is followed by (b, a). Under
    ``uniform01`` each stored directed edge then receives its own weight,
    drawn in stored order from one stream of ``seed``.
    """
    path = Path(path)
    srcs: list[int] = []
    dsts: list[int] = []
    costs: list[float] = []
    declared_n = None
    with path.open("r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                hit = _NODES_RE.match(stripped)
                if hit and declared_n is None:
                    declared_n = int(hit.group(1))
                continue
            parts = stripped.split()
            if len(parts) not in (2, 3):
                raise EdgeListParseError(path, lineno, line, "expected 'src dst [cost]'")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(path, lineno, line, "vertex ids must be integers") from None
            if u < 0 or v < 0:
                raise EdgeListParseError(path, lineno, line, "vertex ids must be non-negative")
            if weight_mode == "keep":
                if len(parts) != 3:
                    raise EdgeListParseError(path, lineno, line, "weight mode 'keep' needs a cost column")
                try:
                    c = float(parts[2])
                except ValueError:
                    raise EdgeListParseError(path, lineno, line, "cost is not a number") from None
                if not (math.isfinite(c) and c >= 0):
                    raise EdgeListParseError(path, lineno, line, "cost must be finite and >= 0")
                costs.append(c)
            srcs.append(u)
            dsts.append(v)

    src = np.asarray(srcs, dtype=np.int64)
    dst = np.asarray(dsts, dtype=np.int64)
    if relabel:
        ids = np.empty(2 * src.size, dtype=np.int64)
        ids[0::2] = src
        ids[1::2] = dst
        uniq, first, inverse = np.unique(ids, return_index=True, return_inverse=True)
        rank = np.empty(uniq.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(uniq.size)
        compact = rank[inverse]
        src, dst = compact[0::2], compact[1::2]
        n = int(uniq.size)
    else:
        n = int(max(src.max(initial=-1), dst.max(initial=-1)) + 1)
        if declared_n is not None:
            n = max(n, declared_n)

    cost = np.asarray(costs, dtype=np.float64) if weight_mode == "keep" else None
    if symmetrize:
        src, dst = np.stack([src, dst], axis=1).reshape(-1), np.stack([dst, src], axis=1).reshape(-1)
        if cost is not None:
            cost = np.repeat(cost, 2)
    if cost is None:
        _, wrng = _streams(seed)
        cost = _weights(wrng, src.size)
    return from_edges(n, src, dst, cost, name=path.stem)


def export_edge_list(g: Graph, path) -> None:
    """Write ``g`` as ``src dst cost`` lines with a SNAP-style header.

    Costs are written with ``repr`` so reloading with ``weight_mode="keep"``
    reproduces them bit for bit.
    """
    src, dst, cost = g.edges()
    with Path(path).open("w", encoding="ascii") as fh:
        fh.write(f"# {g.name}\n# Nodes: {g.n} Edges: {g.m}\n# FromNodeId\tToNodeId\tCost\n")
        fh.writelines(f"{u}\t{v}\t{c!r}\n" for u, v, c in zip(src.tolist(), dst.tolist(), cost.tolist()))


# --------------------------------------------------------------------------
# generation specs


@dataclass(frozen=True)
class GenSpec:
    """Declarative description of a graph instance.

    ``kind`` is ``"uniform"``, ``"kronecker"`` or ``"file"``; the fields that
    matter depend on it. ``scale`` multiplies the Kronecker initiator.
    """

    kind: str
    n: int = 0
    p: float = 0.0
    initiator: tuple[float, float, float, float] = GRAPH500_INITIATOR
    scale: float = 2.5
    k: int = 0
    path: str | None = None
    symmetrize: bool = False
    weight_mode: WeightMode = "uniform01"
    seed: int = 0
    relabel: bool = True

    def validate(self) -> "GenSpec":
        if self.weight_mode not in ("uniform01", "keep"):
            raise ValueError(f"unknown weight mode {self.weight_mode!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.kind == "uniform":
            if self.n < 1:
                raise ValueError("uniform graph needs n >= 1")
            if not 0.0 <= self.p <= 1.0:
                raise ValueError(f"p must lie in [0, 1], got {self.p}")
        elif self.kind == "kronecker":
            _check_initiator(self.scaled_initiator())
            if self.k < 1:
                raise ValueError("Kronecker exponent must be >= 1")
            if self.k > MAX_KRONECKER_EXPONENT:
                raise GraphSizeError(f"2**{self.k} vertices exceeds the supported maximum")
        elif self.kind == "file":
            if not self.path:
                raise ValueError("file graph needs a path")
        else:
            raise ValueError(f"unknown graph kind {self.kind!r}")
        return self

    def scaled_initiator(self) -> tuple[float, ...]:
        return tuple(self.scale * x for x in self.initiator)

    def with_seed(self, seed: int) -> "GenSpec":
        return GenSpec(**{**self.__dict__, "seed": seed})

    def label(self) -> str:
        if self.kind == "uniform":
            return "uniform"
        if self.kind == "kronecker":
            return "kronecker"
        return Path(self.path).stem

    def build(self) -> Graph:
        self.validate()
        if self.kind == "uniform":
            return gen_uniform(self.n, self.p, self.seed, weight_mode=self.weight_mode)
        if self.kind == "kronecker":
            return gen_kronecker(self.scaled_initiator(), self.k, self.seed, weight_mode=self.weight_mode)
        return load_edge_list(self.path, self.symmetrize, self.weight_mode, self.seed, relabel=self.relabel)
