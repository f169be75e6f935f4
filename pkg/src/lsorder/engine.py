"""Neighbour-maintenance engines spanning every ordering of a family.

Two interchangeable engines keep the live point set sorted under all
orderings at once and report, per ordering, the points adjacent to an
inserted, deleted or probed point:

* OrderBank packs each ordering's sort key (the per-block path ranks
  followed by a 32-bit id) into 128 bits and keeps one sorted row per
  ordering inside two big uint64 matrices, updated by compiled kernels.
* TreapEngine drives one OrderedStore per ordering through the plain
  comparator; it is the reference implementation the bank is checked
  against, and the fallback when keys do not fit 128 bits.

Both return (preds, succs) int64 arrays of shape (#orderings, depth) whose
row order matches family.orderings; -1 marks a missing neighbour.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .family import OrderingFamily, child_sequence
from .fixedpoint import Point
from .store import OrderedStore, StoreEntry

# Probe id used for pure queries: sorts after every live point with equal
# coordinates.  Live ids must stay strictly below it.
PROBE_ID = (1 << 32) - 1

_ID_MASK = np.uint64(0xFFFFFFFF)


@njit(cache=True)
def _key_of(cs_row, k, B, LV, pid):
    one = np.uint64(1)
    ncells = one << np.uint64(B)
    mask = ncells - one
    half = ncells >> one
    uB = np.uint64(B)
    u64B = np.uint64(64 - B)
    u32 = np.uint64(32)
    vh = np.uint64(0)
    vl = np.uint64(0)
    for l in range(LV):
        dd = (cs_row[l] + ncells - k) & mask
        if dd == np.uint64(0):
            rk = np.uint64(0)
        elif dd <= half:
            rk = (dd << one) - one
        else:
            rk = (ncells - dd) << one
        vh = (vh << uB) | (vl >> u64B)
        vl = (vl << uB) | rk
    vh = (vh << u32) | (vl >> u32)
    vl = (vl << u32) | pid
    return vh, vl


@njit(cache=True)
def _k_insert(hi, lo, count, cs, K, B, LV, pid, preds, succs):
    R = hi.shape[0]
    depth = preds.shape[1]
    for r in range(R):
        vh, vl = _key_of(cs[r // K], np.uint64(r % K), B, LV, pid)
        h = hi[r]
        l = lo[r]
        a, b = 0, count
        while a < b:
            m = (a + b) >> 1
            if h[m] < vh or (h[m] == vh and l[m] < vl):
                a = m + 1
            else:
                b = m
        for t in range(depth):
            s = a - 1 - t
            preds[r, t] = np.int64(l[s] & _ID_MASK) if s >= 0 else -1
            s = a + t
            succs[r, t] = np.int64(l[s] & _ID_MASK) if s < count else -1
        for t in range(count, a, -1):
            h[t] = h[t - 1]
            l[t] = l[t - 1]
        h[a] = vh
        l[a] = vl


@njit(cache=True)
def _k_delete(hi, lo, count, cs, K, B, LV, pid, preds, succs):
    R = hi.shape[0]
    depth = preds.shape[1]
    bad = 0
    for r in range(R):
        vh, vl = _key_of(cs[r // K], np.uint64(r % K), B, LV, pid)
        h = hi[r]
        l = lo[r]
        a, b = 0, count
        while a < b:
            m = (a + b) >> 1
            if h[m] < vh or (h[m] == vh and l[m] < vl):
                a = m + 1
            else:
                b = m
        if a >= count or (l[a] & _ID_MASK) != pid or h[a] != vh or l[a] != vl:
            bad += 1
            continue
        for t in range(depth):
            s = a - 1 - t
            preds[r, t] = np.int64(l[s] & _ID_MASK) if s >= 0 else -1
            s = a + 1 + t
            succs[r, t] = np.int64(l[s] & _ID_MASK) if s < count else -1
        for t in range(a, count - 1):
            h[t] = h[t + 1]
            l[t] = l[t + 1]
    return bad


@njit(cache=True)
def _k_query(hi, lo, count, cs, K, B, LV, pid, preds, succs):
    R = hi.shape[0]
    depth = preds.shape[1]
    for r in range(R):
        vh, vl = _key_of(cs[r // K], np.uint64(r % K), B, LV, pid)
        h = hi[r]
        l = lo[r]
        a, b = 0, count
        while a < b:
            m = (a + b) >> 1
            if h[m] < vh or (h[m] == vh and l[m] < vl):
                a = m + 1
            else:
                b = m
        for t in range(depth):
            s = a - 1 - t
            preds[r, t] = np.int64(l[s] & _ID_MASK) if s >= 0 else -1
            s = a + t
            succs[r, t] = np.int64(l[s] & _ID_MASK) if s < count else -1


class OrderBank:
    """Sorted rows over all orderings, backed by packed 128-bit keys."""

    def __init__(self, family: OrderingFamily, depth: int = 1, capacity: int = 64):
        bits = family.key_bits()
        if bits > 128:
            raise ValueError(
                f"packed keys need {bits} bits (> 128); use the treap engine"
            )
        self.family = family
        self.depth = depth
        self.K = family.num_perms
        self.B = family.level_bits * family.dim
        self.LV = family.max_blocks
        self.rows = family.size
        cap = max(capacity, 4)
        self._hi = np.zeros((self.rows, cap), dtype=np.uint64)
        self._lo = np.zeros((self.rows, cap), dtype=np.uint64)
        self.count = 0

    def _grow(self):
        cap = self._hi.shape[1]
        if self.count < cap:
            return
        new_cap = cap * 2
        for name in ("_hi", "_lo"):
            old = getattr(self, name)
            fresh = np.zeros((self.rows, new_cap), dtype=np.uint64)
            fresh[:, :cap] = old
            setattr(self, name, fresh)

    def _cs(self, point: Point) -> np.ndarray:
        fam = self.family
        if len(point.coords) != fam.dim:
            raise ValueError(
                f"point has {len(point.coords)} coords, family expects {fam.dim}"
            )
        rows = []
        for i in range(fam.shift_count + 1):
            s = fam.shift_table.shifts[i]
            shifted = tuple(r + s for r in point.coords)
            for j in range(fam.level_bits):
                rows.append(child_sequence(fam, shifted, j))
        return np.array(rows, dtype=np.uint64)

    @staticmethod
    def _check_id(pid: int):
        if not 0 <= pid < PROBE_ID:
            raise ValueError(f"point id {pid} outside [0, {PROBE_ID})")

    def _buffers(self):
        preds = np.empty((self.rows, self.depth), dtype=np.int64)
        succs = np.empty((self.rows, self.depth), dtype=np.int64)
        return preds, succs

    def insert(self, point: Point):
        self._check_id(point.id)
        self._grow()
        preds, succs = self._buffers()
        _k_insert(
            self._hi, self._lo, self.count, self._cs(point),
            self.K, self.B, self.LV, np.uint64(point.id), preds, succs,
        )
        self.count += 1
        return preds, succs

    def delete(self, point: Point):
        self._check_id(point.id)
        preds, succs = self._buffers()
        bad = _k_delete(
            self._hi, self._lo, self.count, self._cs(point),
            self.K, self.B, self.LV, np.uint64(point.id), preds, succs,
        )
        if bad:
            raise RuntimeError(f"id {point.id} missing from {bad} ordering rows")
        self.count -= 1
        return preds, succs

    def query(self, point: Point, probe_id: int = PROBE_ID):
        preds, succs = self._buffers()
        _k_query(
            self._hi, self._lo, self.count, self._cs(point),
            self.K, self.B, self.LV, np.uint64(probe_id), preds, succs,
        )
        return preds, succs


class TreapEngine:
    """One comparator-driven ordered store per ordering; the reference engine."""

    def __init__(self, family: OrderingFamily, depth: int = 1):
        self.family = family
        self.depth = depth
        self.rows = family.size
        self.stores = [OrderedStore(family, o) for o in family.orderings]
        self.count = 0

    def _collect(self, fn):
        preds = np.full((self.rows, self.depth), -1, dtype=np.int64)
        succs = np.full((self.rows, self.depth), -1, dtype=np.int64)
        for r, st in enumerate(self.stores):
            ps, ss = fn(st)
            preds[r, : len(ps)] = ps
            succs[r, : len(ss)] = ss
        return preds, succs

    def insert(self, point: Point):
        def fn(st):
            st.insert(StoreEntry(point))
            return st.neighbors(point, self.depth)

        out = self._collect(fn)
        self.count += 1
        return out

    def delete(self, point: Point):
        def fn(st):
            out = st.neighbors(point, self.depth)
            st.delete(point.id)
            return out

        out = self._collect(fn)
        self.count -= 1
        return out

    def query(self, point: Point, probe_id: int = PROBE_ID):
        probe = point.with_id(probe_id)
        return self._collect(lambda st: st.neighbors(probe, self.depth))


def make_engine(family: OrderingFamily, depth: int = 1, engine: str = "auto"):
    if engine == "auto":
        if family.key_bits() <= 128:
            engine = "bank"
        elif family.size <= 100_000:
            engine = "treap"
        else:
            raise ValueError(
                f"family of {family.size} orderings with {family.key_bits()}-bit "
                f"keys is too large for the dynamic engines; reduce frac_bits or "
                f"the dimension"
            )
    if engine == "bank":
        return OrderBank(family, depth)
    if engine == "treap":
        return TreapEngine(family, depth)
    raise ValueError(f"unknown engine {engine!r}")


def _encode_pairs(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    a = np.minimum(u, v).astype(np.uint64)
    b = np.maximum(u, v).astype(np.uint64)
    return (a << np.uint64(32)) | b


def decode_pair(code: int) -> tuple[int, int]:
    return int(code) >> 32, int(code) & 0xFFFFFFFF


def _aggregate(chunks) -> tuple[np.ndarray, np.ndarray]:
    if not chunks:
        return np.empty(0, dtype=np.uint64), np.empty(0, dtype=np.int64)
    enc = np.concatenate(chunks)
    pairs, counts = np.unique(enc, return_counts=True)
    return pairs, counts.astype(np.int64)


def neighbor_pair_changes(pid: int, preds: np.ndarray, succs: np.ndarray, closing: bool):
    """Unique pair deltas implied by one update's per-ordering neighbours.

    For an update with window depth k+1, the point's own pairs are those to
    its up-to-k+1 predecessors and successors per ordering; pairs between a
    t-th predecessor and s-th successor with t+s = k+2 cross the window
    boundary and flip state.  With closing=False (insert) the point's pairs
    open and the crossing pairs close; with closing=True (delete) the
    reverse.  Returns ((opened, counts), (closed, counts)) as encoded pairs.
    """
    depth = preds.shape[1]
    own = []
    for t in range(depth):
        for col in (preds[:, t], succs[:, t]):
            nb = col[col >= 0]
            if nb.size:
                own.append(_encode_pairs(np.full(nb.size, pid, dtype=np.int64), nb))
    crossing = []
    for t in range(depth):
        u = preds[:, t]
        v = succs[:, depth - 1 - t]
        mask = (u >= 0) & (v >= 0)
        if mask.any():
            crossing.append(_encode_pairs(u[mask], v[mask]))
    own_agg = _aggregate(own)
    cross_agg = _aggregate(crossing)
    if closing:
        return cross_agg, own_agg
    return own_agg, cross_agg


def static_adjacency_counts(family: OrderingFamily, points, depth: int = 1):
    """Pair multiplicities across all orderings, built from scratch.

    Sorts every ordering independently (vectorised) and counts, for each
    unordered id pair, the (ordering, offset) windows of width <= depth that
    join them.  This is the rebuild oracle for the incremental engines and
    the construction path for static builds.
    """
    pts = list(points)
    n = len(pts)
    if n <= 1:
        return np.empty(0, dtype=np.uint64), np.empty(0, dtype=np.int64)
    fam = family
    e, w, d = fam.level_bits, fam.frac_bits, fam.dim
    K = fam.num_perms
    B = e * d
    ncells = np.uint64(fam.n_cells)
    mask = ncells - np.uint64(1)
    half = ncells >> np.uint64(1)
    uB, u64B, u32 = np.uint64(B), np.uint64(64 - B), np.uint64(32)
    ids = np.array([p.id for p in pts], dtype=np.int64)
    raws = np.array([p.coords for p in pts], dtype=np.int64)
    kk = np.arange(K, dtype=np.uint64)[:, None]
    row_key = np.repeat(np.arange(K), n)
    chunks = []
    for i in range(fam.shift_count + 1):
        shifted = raws + fam.shift_table.shifts[i]
        for j in range(e):
            cells = _cell_matrix(shifted, j, e, w, fam.max_blocks)
            hi = np.zeros((K, n), dtype=np.uint64)
            lo = np.zeros((K, n), dtype=np.uint64)
            for l in range(fam.max_blocks):
                dd = (cells[l][None, :] + ncells - kk) & mask
                rk = np.where(
                    dd == 0,
                    np.uint64(0),
                    np.where(dd <= half, 2 * dd - np.uint64(1), 2 * (ncells - dd)),
                ).astype(np.uint64)
                hi = (hi << uB) | (lo >> u64B)
                lo = (lo << uB) | rk
            hi = (hi << u32) | (lo >> u32)
            lo = (lo << u32) | ids.astype(np.uint64)[None, :]
            order = np.lexsort((lo.ravel(), hi.ravel(), row_key))
            sorted_ids = ids[order % n].reshape(K, n)
            for off in range(1, min(depth, n - 1) + 1):
                u = sorted_ids[:, :-off].ravel()
                v = sorted_ids[:, off:].ravel()
                chunks.append(_encode_pairs(u, v))
    return _aggregate(chunks)


def _cell_matrix(shifted: np.ndarray, tree_j: int, e: int, w: int, max_blocks: int):
    """Per-block cell indices for every point: list of (n,) uint64 arrays."""
    n, d = shifted.shape
    emask = (1 << e) - 1
    out = []
    for block in range(max_blocks):
        c = np.zeros(n, dtype=np.uint64)
        for t in range(d):
            col = shifted[:, t]
            if block == 0:
                part = col >> (w - tree_j)
            else:
                bottom = tree_j + block * e
                if bottom <= w:
                    part = (col >> (w - bottom)) & emask
                else:
                    part = (col << (bottom - w)) & emask
            c |= part.astype(np.uint64) << np.uint64(e * t)
        out.append(c)
    return out
