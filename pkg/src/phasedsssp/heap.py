"""Addressable binary min-heap over integer items with decrease-key.

Priorities are floats; ties are broken by the smaller item, so pop order is a
deterministic function of the contents.
"""

from __future__ import annotations

import math


class AddressableHeap:
    __slots__ = ("_heap", "_pos", "_key")

    def __init__(self, capacity: int):
        self._heap: list[int] = []
        self._pos = [-1] * capacity
        self._key = [math.inf] * capacity

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)

    def __contains__(self, item: int) -> bool:
        return self._pos[item] >= 0

    def key(self, item: int) -> float:
        return self._key[item]

    def peek(self) -> tuple[float, int]:
        item = self._heap[0]
        return self._key[item], item

    def min_key(self) -> float:
        return self._key[self._heap[0]] if self._heap else math.inf

    def push(self, item: int, key: float) -> None:
        """Insert ``item`` or change its key (up or down)."""
        pos = self._pos[item]
        if pos < 0:
            self._key[item] = key
            self._heap.append(item)
            self._pos[item] = len(self._heap) - 1
            self._sift_up(len(self._heap) - 1)
            return
        old = self._key[item]
        self._key[item] = key
        if key <= old:
            self._sift_up(pos)
        else:
            self._sift_down(pos)

    def decrease_key(self, item: int, key: float) -> bool:
        """Insert or lower the key of ``item``; returns whether anything changed."""
        pos = self._pos[item]
        if pos >= 0 and key >= self._key[item]:
            return False
        self.push(item, key)
        return True

    def pop(self) -> tuple[float, int]:
        heap = self._heap
        item = heap[0]
        last = heap.pop()
        self._pos[item] = -1
        if heap:
            heap[0] = last
            self._pos[last] = 0
            self._sift_down(0)
        return self._key[item], item

    def remove(self, item: int) -> None:
        pos = self._pos[item]
        if pos < 0:
            return
        heap = self._heap
        last = heap.pop()
        self._pos[item] = -1
        if pos < len(heap):
            heap[pos] = last
            self._pos[last] = pos
            self._sift_up(pos)
            self._sift_down(self._pos[last])

    def _less(self, a: int, b: int) -> bool:
        ka, kb = self._key[a], self._key[b]
        return ka < kb or (ka == kb and a < b)

    def _sift_up(self, pos: int) -> None:
        heap, poss = self._heap, self._pos
        item = heap[pos]
        while pos > 0:
            parent = (pos - 1) >> 1
            other = heap[parent]
            if not self._less(item, other):
                break
            heap[pos] = other
            poss[other] = pos
            pos = parent
        heap[pos] = item
        poss[item] = pos

    def _sift_down(self, pos: int) -> None:
        heap, poss = self._heap, self._pos
        size = len(heap)
        item = heap[pos]
        while True:
            child = 2 * pos + 1
            if child >= size:
                break
            right = child + 1
            if right < size and self._less(heap[right], heap[child]):
                child = right
            other = heap[child]
            if not self._less(other, item):
                break
            heap[pos] = other
            poss[other] = pos
            pos = child
        heap[pos] = item
        poss[item] = pos
