"""Dynamic (1+eps)-spanners, vertex-fault-tolerant variants, and approximate MST.

The spanner edge set joins every point to its k+1 nearest predecessors and
successors in each ordering (k = 0 for the plain spanner).  Edges carry
reference counts over their (ordering, offset) witnesses, so updates emit
exact edge deltas and the structure never rebuilds.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import (
    decode_pair,
    make_engine,
    neighbor_pair_changes,
    static_adjacency_counts,
)
from .family import OrderingFamily, build_family
from .fixedpoint import Point, dist_value, quantize, sq_dist


@dataclass(frozen=True, slots=True)
class EdgeDelta:
    """Edges that appeared/disappeared in one update, as (u, v, length)."""

    added: tuple
    removed: tuple


class DynamicSpanner:
    """Spanner over live points; k >= 1 adds vertex-fault tolerance.

    Single writer; `edges` iteration must not overlap updates.
    """

    def __init__(
        self,
        family: OrderingFamily,
        k: int = 0,
        engine: str = "auto",
        track_deltas: bool = True,
    ):
        if k < 0:
            raise ValueError(f"fault tolerance k must be >= 0, got {k}")
        self.family = family
        self.k = k
        self._engine = make_engine(family, depth=k + 1, engine=engine)
        self.points: dict[int, Point] = {}
        self._edges: dict[tuple[int, int], list] = {}  # pair -> [sq, mult]
        self._degree: dict[int, int] = {}
        self.delta_log: list[EdgeDelta] = [] if track_deltas else None
        self._next_id = 0

    def __len__(self) -> int:
        return len(self.points)

    def add(self, values) -> int:
        pid = self._next_id
        self.insert(quantize(values, self.family.frac_bits, pid))
        return pid

    def insert(self, point: Point) -> EdgeDelta:
        pid = point.id
        if pid in self.points:
            raise ValueError(f"duplicate id {pid}")
        preds, succs = self._engine.insert(point)
        if pid >= self._next_id:
            self._next_id = pid + 1
        self.points[pid] = point
        self._degree[pid] = 0
        opened, closed = neighbor_pair_changes(pid, preds, succs, closing=False)
        return self._commit(opened, closed)

    def delete(self, point_id: int) -> EdgeDelta:
        point = self.points.get(point_id)
        if point is None:
            raise KeyError(f"id {point_id} not present")
        preds, succs = self._engine.delete(point)
        opened, closed = neighbor_pair_changes(point_id, preds, succs, closing=True)
        delta = self._commit(opened, closed)
        del self.points[point_id]
        del self._degree[point_id]
        return delta

    def _commit(self, opened, closed) -> EdgeDelta:
        w = self.family.frac_bits
        added = []
        removed = []
        codes, counts = closed
        for code, cnt in zip(codes.tolist(), counts.tolist()):
            key = decode_pair(code)
            rec = self._edges.get(key)
            if rec is None or rec[1] < cnt:
                raise RuntimeError(f"edge {key} witness underflow")
            rec[1] -= cnt
            if rec[1] == 0:
                removed.append((key[0], key[1], dist_value(rec[0], w)))
                del self._edges[key]
                self._degree[key[0]] -= 1
                self._degree[key[1]] -= 1
        codes, counts = opened
        for code, cnt in zip(codes.tolist(), counts.tolist()):
            key = decode_pair(code)
            rec = self._edges.get(key)
            if rec is None:
                sq = sq_dist(self.points[key[0]], self.points[key[1]])
                self._edges[key] = [sq, cnt]
                added.append((key[0], key[1], dist_value(sq, w)))
                self._degree[key[0]] += 1
                self._degree[key[1]] += 1
            else:
                rec[1] += cnt
        delta = EdgeDelta(tuple(added), tuple(removed))
        if self.delta_log is not None:
            self.delta_log.append(delta)
        return delta

    def edges(self):
        """All distinct edges once, as (u, v, length), sorted by (u, v)."""
        w = self.family.frac_bits
        for (u, v) in sorted(self._edges):
            yield u, v, dist_value(self._edges[(u, v)][0], w)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def max_degree(self) -> int:
        return max(self._degree.values(), default=0)

    def degree(self, point_id: int) -> int:
        return self._degree[point_id]

    def multiplicity_map(self) -> dict[tuple[int, int], int]:
        """Pair -> witness count; comparable against a from-scratch rebuild."""
        return {k: rec[1] for k, rec in self._edges.items()}


def static_spanner_edges(family: OrderingFamily, points, k: int = 0):
    """Edge map of the static spanner: pair -> (exact squared length, witnesses).

    Built from scratch by sorting every ordering once; equals the edge set an
    update sequence inserting the same points would maintain.
    """
    pts = {p.id: p for p in points}
    codes, counts = static_adjacency_counts(family, pts.values(), depth=k + 1)
    out = {}
    for code, cnt in zip(codes.tolist(), counts.tolist()):
        u, v = decode_pair(code)
        out[(u, v)] = (sq_dist(pts[u], pts[v]), int(cnt))
    return out


class _UnionFind:
    def __init__(self, ids):
        self.parent = {i: i for i in ids}

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[rx] = ry
        return True


def approx_mst(points, eps_target: float, frac_bits: int | None = None):
    """(1+eps)-approximate Euclidean MST via the static spanner.

    Returns (edges, total_weight) where edges is a list of (u, v, length)
    spanning all points.  Runs the standard greedy tree algorithm on the
    spanner's edge set; the spanner's stretch bound carries over to the
    tree weight.
    """
    pts = list(points)
    n = len(pts)
    if n <= 1:
        return [], 0.0
    if frac_bits is None:
        frac_bits = 32
    family = build_family(len(pts[0].coords), eps_target, frac_bits)
    edge_map = static_spanner_edges(family, pts, k=0)
    ranked = sorted((sq, u, v) for (u, v), (sq, _) in edge_map.items())
    uf = _UnionFind([p.id for p in pts])
    tree = []
    total = 0.0
    for sq, u, v in ranked:
        if uf.union(u, v):
            d = dist_value(sq, frac_bits)
            tree.append((u, v, d))
            total += d
            if len(tree) == n - 1:
                break
    if len(tree) != n - 1:
        raise RuntimeError("spanner failed to span the point set")
    return tree, total
