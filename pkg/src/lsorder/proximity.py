"""Dynamic approximate bichromatic closest pair and nearest-neighbor search.

Both structures keep the live points positioned in every ordering of a
family.  Candidate pairs are the points adjacent in some ordering; the
family's locality property guarantees that the closest candidate is within
the target approximation factor of the true optimum.
"""

from __future__ import annotations

import enum

import numpy as np

from .engine import PROBE_ID, make_engine, decode_pair, neighbor_pair_changes
from .family import OrderingFamily
from .fixedpoint import Point, dist_value, quantize, sq_dist
from .store import CandidatePairSet


class Color(enum.Enum):
    RED = "R"
    BLUE = "B"


class BcpState:
    """Maintains a (1+eps)-approximate closest red-blue pair under updates.

    With monochromatic=True colors are ignored and every candidate pair
    counts, turning the structure into an approximate closest-pair tracker
    for a single point set.
    """

    def __init__(
        self, family: OrderingFamily, engine: str = "auto", monochromatic: bool = False
    ):
        self.family = family
        self.monochromatic = monochromatic
        self._engine = make_engine(family, depth=1, engine=engine)
        self.points: dict[int, Point] = {}
        self.colors: dict[int, Color] = {}
        self.pairs = CandidatePairSet()
        self._next_id = 0

    def __len__(self) -> int:
        return len(self.points)

    def add(self, values, color: Color | None = None) -> int:
        """Quantize real coordinates, assign the next id, insert."""
        pid = self._next_id
        self.insert(quantize(values, self.family.frac_bits, pid), color)
        return pid

    def insert(self, point: Point, color: Color | None = None) -> None:
        pid = point.id
        if pid in self.points:
            raise ValueError(f"duplicate id {pid}")
        if color is None and not self.monochromatic:
            raise ValueError("bichromatic state requires a color")
        preds, succs = self._engine.insert(point)
        if pid >= self._next_id:
            self._next_id = pid + 1
        self.points[pid] = point
        self.colors[pid] = color
        opened, closed = neighbor_pair_changes(pid, preds, succs, closing=False)
        self._apply(closed, remove=True)
        self._apply(opened, remove=False)

    def delete(self, point_id: int) -> None:
        point = self.points.get(point_id)
        if point is None:
            raise KeyError(f"id {point_id} not present")
        preds, succs = self._engine.delete(point)
        opened, closed = neighbor_pair_changes(point_id, preds, succs, closing=True)
        self._apply(closed, remove=True)
        self._apply(opened, remove=False)
        del self.points[point_id]
        del self.colors[point_id]

    def _apply(self, agg, remove: bool) -> None:
        codes, counts = agg
        for code, cnt in zip(codes.tolist(), counts.tolist()):
            u, v = decode_pair(code)
            if not self.monochromatic and self.colors[u] is self.colors[v]:
                continue
            if remove:
                self.pairs.remove(u, v, cnt)
            else:
                self.pairs.add(u, v, sq_dist(self.points[u], self.points[v]), cnt)

    def current(self):
        """(red id, blue id, distance) of the best candidate pair, or None.

        In monochromatic mode the ids come back in ascending order instead
        of red-first.
        """
        best = self.pairs.min_pair()
        if best is None:
            return None
        u, v, sq = best
        if not self.monochromatic and self.colors[u] is not Color.RED:
            u, v = v, u
        return u, v, dist_value(sq, self.family.frac_bits)

    def current_sq(self):
        """The best candidate pair with its exact squared distance, or None."""
        return self.pairs.min_pair()


class AnnState:
    """Dynamic (1+eps)-approximate nearest-neighbor search."""

    def __init__(self, family: OrderingFamily, engine: str = "auto"):
        self.family = family
        self._engine = make_engine(family, depth=1, engine=engine)
        self.points: dict[int, Point] = {}
        self._next_id = 0

    def __len__(self) -> int:
        return len(self.points)

    def add(self, values) -> int:
        pid = self._next_id
        self.insert(quantize(values, self.family.frac_bits, pid))
        return pid

    def insert(self, point: Point) -> None:
        if point.id in self.points:
            raise ValueError(f"duplicate id {point.id}")
        self._engine.insert(point)
        if point.id >= self._next_id:
            self._next_id = point.id + 1
        self.points[point.id] = point

    def delete(self, point_id: int) -> None:
        point = self.points.get(point_id)
        if point is None:
            raise KeyError(f"id {point_id} not present")
        self._engine.delete(point)
        del self.points[point_id]

    def query_candidates(self, probe: Point) -> list[int]:
        """Ids of the (at most 2 per ordering) points adjacent to the probe."""
        if len(probe.coords) != self.family.dim:
            raise ValueError("probe dimension does not match the family")
        preds, succs = self._engine.query(probe, probe_id=PROBE_ID)
        cand = np.unique(np.concatenate([preds.ravel(), succs.ravel()]))
        return [int(c) for c in cand if c >= 0]

    def query(self, probe: Point):
        """(id, distance) of an approximate nearest neighbor, or None if empty.

        The probe is positioned in every ordering (sorting after any stored
        point with identical coordinates); the closest adjacent point wins,
        ties by id.
        """
        if not self.points:
            return None
        best = None
        for pid in self.query_candidates(probe):
            cand = (sq_dist(self.points[pid], probe), pid)
            if best is None or cand < best:
                best = cand
        sq, pid = best
        return pid, dist_value(sq, self.family.frac_bits)

    def query_values(self, values):
        return self.query(quantize(values, self.family.frac_bits))
