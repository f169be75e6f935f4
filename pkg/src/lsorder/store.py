"""Per-ordering ordered sets of points with adjacency-change tracking.

Each store keeps the points of one ordering in a balanced tree keyed by
(comparator, id) and reports, for every insert or delete, which adjacent
pairs appeared and disappeared.  A shared CandidatePairSet accumulates those
pairs across all orderings with reference counts and a min-by-distance view.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass

from .family import Ordering, OrderingFamily, compare_with_ids
from .fixedpoint import Point, sq_dist


@dataclass(frozen=True, slots=True)
class StoreEntry:
    point: Point
    payload: object = None


@dataclass(frozen=True, slots=True)
class AdjacencyDelta:
    """Adjacent-pair changes caused by one update; pairs are (min id, max id)."""

    removed: frozenset
    added: frozenset


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class _Node:
    __slots__ = ("entry", "prio", "left", "right")

    def __init__(self, entry, prio):
        self.entry = entry
        self.prio = prio
        self.left = None
        self.right = None


class OrderedStore:
    """Balanced ordered set of points under one ordering (ties by id).

    A treap: expected O(log n) comparator calls per operation.  Single
    writer; reads may not overlap mutation.
    """

    def __init__(self, family: OrderingFamily, ordering: Ordering, seed: int = 0):
        self.family = family
        self.ordering = ordering
        self._root = None
        self._by_id: dict[int, StoreEntry] = {}
        self._rng = random.Random(seed ^ 0x5EED)

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, point_id: int) -> bool:
        return point_id in self._by_id

    def _cmp(self, p: Point, q: Point) -> int:
        return compare_with_ids(self.ordering, self.family, p, q)

    def insert(self, entry: StoreEntry) -> AdjacencyDelta:
        pid = entry.point.id
        if pid in self._by_id:
            raise ValueError(f"duplicate id {pid}")
        self._by_id[pid] = entry
        self._root = self._insert(self._root, _Node(entry, self._rng.random()))
        pred = self.predecessor(entry.point)
        succ = self.successor(entry.point)
        removed = set()
        added = set()
        if pred is not None:
            added.add(_pair(pred.point.id, pid))
        if succ is not None:
            added.add(_pair(pid, succ.point.id))
        if pred is not None and succ is not None:
            removed.add(_pair(pred.point.id, succ.point.id))
        return AdjacencyDelta(frozenset(removed), frozenset(added))

    def delete(self, point_id: int) -> AdjacencyDelta:
        entry = self._by_id.get(point_id)
        if entry is None:
            raise KeyError(f"id {point_id} not in store")
        pred = self.predecessor(entry.point)
        succ = self.successor(entry.point)
        self._root = self._delete(self._root, entry.point)
        del self._by_id[point_id]
        removed = set()
        added = set()
        if pred is not None:
            removed.add(_pair(pred.point.id, point_id))
        if succ is not None:
            removed.add(_pair(point_id, succ.point.id))
        if pred is not None and succ is not None:
            added.add(_pair(pred.point.id, succ.point.id))
        return AdjacencyDelta(frozenset(removed), frozenset(added))

    def predecessor(self, probe: Point) -> StoreEntry | None:
        """Nearest stored entry strictly before the probe in (order, id)."""
        node = self._root
        best = None
        while node is not None:
            if self._cmp(node.entry.point, probe) < 0:
                best = node.entry
                node = node.right
            else:
                node = node.left
        return best

    def successor(self, probe: Point) -> StoreEntry | None:
        node = self._root
        best = None
        while node is not None:
            if self._cmp(node.entry.point, probe) > 0:
                best = node.entry
                node = node.left
            else:
                node = node.right
        return best

    def neighbors(self, probe: Point, depth: int) -> tuple[list[int], list[int]]:
        """Ids of up to `depth` strict predecessors and successors of the probe,
        nearest first."""
        preds, succs = [], []
        cur = probe
        for _ in range(depth):
            e = self.predecessor(cur)
            if e is None:
                break
            preds.append(e.point.id)
            cur = e.point
        cur = probe
        for _ in range(depth):
            e = self.successor(cur)
            if e is None:
                break
            succs.append(e.point.id)
            cur = e.point
        return preds, succs

    def entries(self) -> list[StoreEntry]:
        """All entries in (order, id) order."""
        out = []

        def walk(node):
            if node is None:
                return
            walk(node.left)
            out.append(node.entry)
            walk(node.right)

        walk(self._root)
        return out

    def _insert(self, node, fresh):
        if node is None:
            return fresh
        if self._cmp(fresh.entry.point, node.entry.point) < 0:
            node.left = self._insert(node.left, fresh)
            if node.left.prio < node.prio:
                node = self._rotate_right(node)
        else:
            node.right = self._insert(node.right, fresh)
            if node.right.prio < node.prio:
                node = self._rotate_left(node)
        return node

    def _delete(self, node, point):
        if node is None:
            raise RuntimeError("point missing from tree")
        c = self._cmp(point, node.entry.point)
        if c < 0:
            node.left = self._delete(node.left, point)
        elif c > 0:
            node.right = self._delete(node.right, point)
        else:
            if node.left is None:
                return node.right
            if node.right is None:
                return node.left
            if node.left.prio < node.right.prio:
                node = self._rotate_right(node)
                node.right = self._delete(node.right, point)
            else:
                node = self._rotate_left(node)
                node.left = self._delete(node.left, point)
        return node

    @staticmethod
    def _rotate_right(node):
        top = node.left
        node.left = top.right
        top.right = node
        return top

    @staticmethod
    def _rotate_left(node):
        top = node.right
        node.right = top.left
        top.left = node
        return top


class CandidatePairSet:
    """Reference-counted pair set with a min view by exact squared distance.

    One shared instance serves all orderings: a pair's multiplicity is the
    number of (ordering, position) witnesses currently backing it.
    """

    def __init__(self):
        self._active: dict[tuple[int, int], list] = {}  # pair -> [sq, mult]
        self._heap: list[tuple[int, int, int]] = []  # (sq, u, v)

    def __len__(self) -> int:
        return len(self._active)

    def multiplicity(self, u: int, v: int) -> int:
        rec = self._active.get(_pair(u, v))
        return rec[1] if rec else 0

    def add(self, u: int, v: int, sq: int, count: int = 1) -> None:
        key = _pair(u, v)
        rec = self._active.get(key)
        if rec is None:
            self._active[key] = [sq, count]
            heapq.heappush(self._heap, (sq, key[0], key[1]))
        else:
            rec[1] += count

    def remove(self, u: int, v: int, count: int = 1) -> None:
        key = _pair(u, v)
        rec = self._active.get(key)
        if rec is None or rec[1] < count:
            raise RuntimeError(f"pair {key} multiplicity underflow")
        rec[1] -= count
        if rec[1] == 0:
            del self._active[key]

    def min_pair(self):
        """Smallest active pair as (u, v, squared distance), or None."""
        while self._heap:
            sq, u, v = self._heap[0]
            rec = self._active.get((u, v))
            if rec is not None and rec[0] == sq:
                return u, v, sq
            heapq.heappop(self._heap)
        return None

    def pairs(self):
        return {k: rec[0] for k, rec in self._active.items()}


def pairs_apply(cps: CandidatePairSet, delta: AdjacencyDelta, keep, points) -> None:
    """Fold one adjacency delta into the pair set.

    `keep(u, v)` filters pairs (bichromatic selection for closest-pair use,
    always-true for monochromatic structures); `points` maps id -> Point for
    exact distance computation.  Removing a pair that is not active fails
    fast: it indicates an internal inconsistency.
    """
    for u, v in delta.removed:
        if keep(u, v):
            cps.remove(u, v)
    for u, v in delta.added:
        if keep(u, v):
            cps.add(u, v, sq_dist(points[u], points[v]))
