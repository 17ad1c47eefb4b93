"""Sequential reference SSSP: Dijkstra with an addressable heap and a
Bellman-Ford fixpoint used as a test oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .heap import AddressableHeap


@dataclass
class SsspResult:
    """Distances from one source; ``inf`` marks unreachable vertices.

    ``parent[v]`` is ``-1`` for the source and for unreachable vertices.
    """

    dist: np.ndarray
    parent: np.ndarray | None = None
    relaxations: int = 0
    settled: int = 0

    def reachable(self) -> np.ndarray:
        return np.isfinite(self.dist)


def check_source(g: Graph, s: int) -> int:
    if not 0 <= s < g.n:
        raise IndexError(f"source {s} out of range for graph with {g.n} vertices")
    return int(s)


def dijkstra(g: Graph, s: int) -> SsspResult:
    s = check_source(g, s)
    offsets = g.fwd_offsets.tolist()
    targets = g.fwd_targets.tolist()
    costs = g.fwd_costs.tolist()
    inf = float("inf")
    dist = [inf] * g.n
    parent = [-1] * g.n
    done = [False] * g.n
    heap = AddressableHeap(g.n)
    dist[s] = 0.0
    heap.push(s, 0.0)
    relaxations = settled = 0
    while heap:
        du, u = heap.pop()
        done[u] = True
        settled += 1
        for e in range(offsets[u], offsets[u + 1]):
            relaxations += 1
            v = targets[e]
            if done[v]:
                continue
            nd = du + costs[e]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heap.decrease_key(v, nd)
    return SsspResult(np.array(dist), np.array(parent, dtype=np.int64), relaxations, settled)


def bellman_ford_oracle(g: Graph, s: int) -> SsspResult:
    """Relax every edge until nothing changes; O(n m) worst case."""
    s = check_source(g, s)
    src, dst, cost = g.edges()
    dist = np.full(g.n, np.inf)
    dist[s] = 0.0
    for _ in range(max(g.n, 1)):
        cand = dist[src] + cost
        new = dist.copy()
        np.minimum.at(new, dst, cand)
        if np.array_equal(new, dist):
            break
        dist = new
    parent = np.full(g.n, -1, dtype=np.int64)
    if g.m:
        tight = np.isfinite(dist[src]) & (dist[src] + cost == dist[dst]) & (dst != s)
        # first tight predecessor in edge order
        parent[dst[tight][::-1]] = src[tight][::-1]
    return SsspResult(dist, parent, 0, int(np.isfinite(dist).sum()))
