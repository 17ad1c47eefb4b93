"""Thread-team plumbing shared by the parallel solvers.

Python exposes no hardware atomics, so the read-modify-write primitives below
are emulated with short critical sections. They keep the same contracts:
a counter hands out disjoint index ranges, min-cells only ever decrease, and
an append into a relaxation buffer is one counter increment plus a plain
store once the target chunk exists.
"""

from __future__ import annotations

import threading
import time
from typing import Callable

import numpy as np

DEFAULT_CHUNK = 1024 * 1024
MAX_THREADS = 256


class CapacityError(RuntimeError):
    """A relaxation buffer ran out of chunk slots."""


class AtomicCounter:
    __slots__ = ("_value", "_lock")

    def __init__(self, value: int = 0):
        self._value = value
        self._lock = threading.Lock()

    def fetch_add(self, k: int = 1) -> int:
        with self._lock:
            old = self._value
            self._value = old + k
            return old

    def load(self) -> int:
        return self._value

    def store(self, value: int) -> None:
        with self._lock:
            self._value = value


class AtomicMinArray:
    """Array of floats whose cells only decrease (compare-and-swap-min)."""

    def __init__(self, n: int, fill: float = np.inf):
        self.values = np.full(n, fill)
        self._lock = threading.Lock()

    def update(self, index: np.ndarray, value: np.ndarray) -> None:
        with self._lock:
            np.minimum.at(self.values, index, value)


class ChunkedBuffer:
    """Append-only buffer of (target, new_dist) relaxation messages.

    Storage is a directory of fixed-size chunks allocated on first touch. A
    writer reserves slots with one fetch-and-add on the cursor, installs the
    chunk if it is missing (first installer wins) and writes its items.
    Only the owning thread drains the buffer, after a barrier.
    """

    def __init__(self, max_items: int, chunk_capacity: int = DEFAULT_CHUNK):
        if chunk_capacity < 1:
            raise ValueError("chunk capacity must be >= 1")
        self.chunk_capacity = chunk_capacity
        self.max_chunks = max(1, -(-max_items // chunk_capacity))
        self._targets: list[np.ndarray | None] = [None] * self.max_chunks
        self._dists: list[np.ndarray | None] = [None] * self.max_chunks
        self.cursor = AtomicCounter()
        self._install_lock = threading.Lock()

    def _chunk(self, c: int) -> tuple[np.ndarray, np.ndarray]:
        if c >= self.max_chunks:
            raise CapacityError(
                f"relaxation buffer overflow: chunk {c} requested, directory holds {self.max_chunks} "
                f"chunks of {self.chunk_capacity} items"
            )
        if self._targets[c] is None:
            tgt = np.empty(self.chunk_capacity, dtype=np.int64)
            dst = np.empty(self.chunk_capacity)
            with self._install_lock:
                if self._targets[c] is None:
                    self._dists[c] = dst
                    self._targets[c] = tgt
        return self._targets[c], self._dists[c]

    def append(self, target: int, new_dist: float) -> None:
        i = self.cursor.fetch_add(1)
        tgt, dst = self._chunk(i // self.chunk_capacity)
        j = i % self.chunk_capacity
        tgt[j] = target
        dst[j] = new_dist

    def extend(self, targets: np.ndarray, new_dists: np.ndarray) -> None:
        k = targets.size
        if k == 0:
            return
        start = self.cursor.fetch_add(k)
        cap = self.chunk_capacity
        done = 0
        while done < k:
            i = start + done
            c, j = divmod(i, cap)
            take = min(cap - j, k - done)
            tgt, dst = self._chunk(c)
            tgt[j : j + take] = targets[done : done + take]
            dst[j : j + take] = new_dists[done : done + take]
            done += take

    def __len__(self) -> int:
        return self.cursor.load()

    def drain(self) -> tuple[np.ndarray, np.ndarray]:
        """Return all buffered messages and reset the cursor (owner only)."""
        total = self.cursor.load()
        cap = self.chunk_capacity
        ts, ds = [], []
        for c in range(-(-total // cap)):
            hi = min(cap, total - c * cap)
            ts.append(self._targets[c][:hi].copy())
            ds.append(self._dists[c][:hi].copy())
        self.cursor.store(0)
        if not ts:
            return np.zeros(0, dtype=np.int64), np.zeros(0)
        return np.concatenate(ts), np.concatenate(ds)


class Team:
    """A fixed group of worker threads with a barrier and min-reductions."""

    def __init__(self, p: int):
        if p < 1:
            raise ValueError("thread count must be >= 1")
        if p > MAX_THREADS:
            raise ValueError(f"thread count {p} exceeds the hard cap {MAX_THREADS}")
        self.p = p
        self.barrier = threading.Barrier(p)
        self._slots = np.full((2, p, 8), np.inf)
        self._gen = [0] * p

    def wait(self) -> None:
        self.barrier.wait()

    def allreduce(self, tid: int, mins=(), sums=()) -> tuple[float, ...]:
        """Combine per-thread scalars; every thread receives the same tuple.

        Slots alternate between two rows, so a fast thread entering the next
        reduction cannot overwrite values a slow thread is still reading.
        """
        row = self._gen[tid] & 1
        self._gen[tid] += 1
        k = len(mins)
        slots = self._slots[row]
        slots[tid, :k] = mins
        slots[tid, k : k + len(sums)] = sums
        self.barrier.wait()
        out = [float(slots[:, i].min()) for i in range(k)]
        out += [float(slots[:, k + i].sum()) for i in range(len(sums))]
        return tuple(out)

    def allreduce_min(self, tid: int, value: float) -> float:
        return self.allreduce(tid, (value,))[0]

    def run(self, body: Callable[[int], object]) -> tuple[list, list[float]]:
        """Run ``body(tid)`` on every thread; returns results and per-thread seconds."""
        results: list = [None] * self.p
        seconds = [0.0] * self.p
        errors: list[BaseException] = []

        def worker(tid: int) -> None:
            t0 = time.perf_counter()
            try:
                results[tid] = body(tid)
            except threading.BrokenBarrierError:
                pass
            except BaseException as exc:  # noqa: BLE001 - re-raised in the caller
                errors.append(exc)
                self.barrier.abort()
            finally:
                seconds[tid] = time.perf_counter() - t0

        if self.p == 1:
            worker(0)
        else:
            threads = [threading.Thread(target=worker, args=(t,), daemon=True) for t in range(self.p)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
        if errors:
            raise errors[0]
        return results, seconds


def block_owner(n: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Contiguous ownership: (bounds, owner-of-vertex)."""
    bounds = np.array([(i * n) // p for i in range(p + 1)], dtype=np.int64)
    owner = np.repeat(np.arange(p, dtype=np.int64), np.diff(bounds))
    return bounds, owner


def cyclic_owner(n: int, p: int) -> np.ndarray:
    return np.arange(n, dtype=np.int64) % p


def min_per_target(targets: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse (target, value) pairs to the minimum value per distinct target."""
    if targets.size == 0:
        return targets, values
    order = np.lexsort((values, targets))
    targets, values = targets[order], values[order]
    first = np.ones(targets.size, dtype=bool)
    first[1:] = targets[1:] != targets[:-1]
    return targets[first], values[first]
