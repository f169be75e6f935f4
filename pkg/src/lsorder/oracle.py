"""Brute-force reference implementations used by tests and verification.

Everything here favours being obviously correct over being fast: exact
integer or rational arithmetic throughout, straight-line scans, explicit
tree construction.  Intended for desk-scale inputs only.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key

import numpy as np

from .family import (
    ChildPermutation,
    OrderingFamily,
    adjacent_perm_index,
    block_of_depth,
    cell_at_block,
    compare_with_ids,
)
from .fixedpoint import Point, dist_value, sq_dist


def exact_bcp(reds, blues):
    """Exact bichromatic closest pair by full scan.

    Returns ((red_id, blue_id), squared_distance) or None if either side is
    empty.  Ties break by (squared distance, red id, blue id); the squared
    distance is an exact integer in raw units.
    """
    best = None
    for r in reds:
        for b in blues:
            cand = (sq_dist(r, b), r.id, b.id)
            if best is None or cand < best:
                best = cand
    if best is None:
        return None
    sq, rid, bid = best
    return (rid, bid), sq


def exact_nn(points, q: Point):
    """Exact nearest neighbour of q by linear scan.

    Returns (id, squared_distance) with an exact integer square, or None for
    an empty point set.  Ties break by id.
    """
    best = None
    for p in points:
        cand = (sq_dist(p, q), p.id)
        if best is None or cand < best:
            best = cand
    if best is None:
        return None
    sq, pid = best
    return pid, sq


def exact_mst_weight(points, frac_bits: int) -> float:
    """Weight of the exact Euclidean MST of the complete graph on the points."""
    pts = list(points)
    n = len(pts)
    if n <= 1:
        return 0.0
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            edges.append((sq_dist(pts[i], pts[j]), i, j))
    edges.sort()
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    total = 0.0
    used = 0
    for sq, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            total += dist_value(sq, frac_bits)
            used += 1
            if used == n - 1:
                break
    return total


def dilation(graph, points, frac_bits: int, exclude=frozenset()) -> float:
    """Exact dilation of a spanner graph over the given points.

    Maximum over point pairs of (shortest-path length / Euclidean distance);
    +inf if the graph is disconnected.  ``exclude`` removes vertices (and
    their edges) before measuring, for fault-tolerance checks.  Pairs at
    Euclidean distance zero are skipped.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import shortest_path

    live = [p for p in points if p.id not in exclude]
    n = len(live)
    if n <= 1:
        return 1.0
    index = {p.id: t for t, p in enumerate(live)}
    rows, cols, vals = [], [], []
    for u, v, d in graph.edges():
        if u in index and v in index:
            rows.append(index[u])
            cols.append(index[v])
            vals.append(d)
    mat = coo_matrix((vals + vals, (rows + cols, cols + rows)), shape=(n, n))
    dist = shortest_path(mat.tocsr(), method="D", directed=False)
    worst = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            eu = dist_value(sq_dist(live[i], live[j]), frac_bits)
            if eu == 0.0:
                continue
            if not np.isfinite(dist[i, j]):
                return float("inf")
            ratio = dist[i, j] / eu
            if ratio > worst:
                worst = ratio
    return worst


def reference_dfs_order(
    family: OrderingFamily,
    points,
    shift_i: int,
    tree_j: int,
    perm: ChildPermutation,
) -> list[int]:
    """Point ids in the order an explicit tree traversal would visit them.

    Builds the hierarchical grid decomposition for one (shift, tree) pair by
    plain integer division and recurses through the children in path order.
    This is the defining cross-check for the bitwise comparator and shares
    none of its machinery.
    """
    w = family.frac_bits
    e = family.level_bits
    d = family.dim
    shift = family.shift_table.shifts[shift_i]
    # Scale so that every split stays integral even below raw resolution.
    scale_bits = e * (family.max_blocks + 2)
    items = [
        (tuple((r + shift) << scale_bits for r in p.coords), p.id) for p in points
    ]
    root_side = 1 << (w + e - tree_j + scale_bits)
    out: list[int] = []

    def visit(group, side):
        if len(group) <= 1 or all(g[0] == group[0][0] for g in group):
            out.extend(sorted(g[1] for g in group))
            return
        child = side >> e
        if child == 0:
            raise RuntimeError("grid recursion below scaled resolution")
        buckets: dict[int, list] = {}
        for coords, pid in group:
            c = 0
            for t in range(d):
                c |= ((coords[t] % side) // child) << (e * t)
            buckets.setdefault(c, []).append((coords, pid))
        for cell in perm.path():
            if cell in buckets:
                visit(buckets[cell], child)

    visit(items, root_side)
    return out


def shift_residues_check(n: int, ell: int) -> bool:
    """Whether {i/n mod 2^-ell} equals {i/(n*2^ell)} as sets of exact rationals."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 3, got {n}")
    if ell < 0:
        raise ValueError(f"ell must be >= 0, got {ell}")
    alpha = Fraction(1, 1 << ell)
    residues = {Fraction(i, n) % alpha for i in range(n)}
    scaled = {Fraction(i, n) * alpha for i in range(n)}
    return residues == scaled


def _common_depth(coords_a, coords_b, frac_bits: int) -> int:
    top = -1
    for a, b in zip(coords_a, coords_b):
        x = a ^ b
        if x:
            h = x.bit_length() - 1
            if h > top:
                top = h
    return frac_bits + 1 if top < 0 else frac_bits - top


class _PairContext:
    """Shared per-(family, point set) precomputation for the LSO pair check."""

    def __init__(self, family: OrderingFamily, points, eps_target: float):
        self.family = family
        self.points = list(points)
        self.eps = Fraction(eps_target)
        self.ids = [p.id for p in self.points]
        w = family.frac_bits
        shifts = family.shift_table.shifts
        raws = np.array([p.coords for p in self.points], dtype=np.int64)
        self.shifted = [raws + s for s in shifts]
        # depth[i][a, b]: common cell depth of points a and b under shift i
        self.depth = []
        for sr in self.shifted:
            xor = sr[:, None, :] ^ sr[None, :, :]
            # raw values < 2^34 are exact in float64, so frexp gives bit_length
            _, expo = np.frexp(xor.astype(np.float64))
            hi = (expo - 1).max(axis=2)
            dep = np.where(hi < 0, w + 1, w - hi)
            self.depth.append(dep.astype(np.int64))

    def index_of(self, pid: int) -> int:
        return self.ids.index(pid)

    def check(self, a: int, b: int) -> bool:
        """The pair property for points at indices a, b: some ordering keeps
        every strictly-between point eps-close to one endpoint."""
        fam = self.family
        pts = self.points
        w, e = fam.frac_bits, fam.level_bits
        sq_ab = sq_dist(pts[a], pts[b])
        if sq_ab == 0:
            raise ValueError("pair check requires distinct points")
        eps_n2 = self.eps.numerator**2
        eps_d2 = self.eps.denominator**2
        for i in range(fam.shift_count + 1):
            m = int(self.depth[i][a, b])
            j = (m - 1) % e
            block = block_of_depth(m, j, e)
            sa = self.shifted[i][a]
            sb = self.shifted[i][b]
            ca = cell_at_block(sa.tolist(), j, block, e, w)
            cb = cell_at_block(sb.tolist(), j, block, e, w)
            k = adjacent_perm_index(ca, cb, fam.n_cells)
            ordering = fam.ordering_at(i, j, k)
            # Strictly-between points must share both endpoints' cells one
            # level below the divergence cell, because those two cells are
            # path-adjacent under this permutation.
            thresh = min(m + e, w + 1)
            member = (self.depth[i][a] >= thresh) | (self.depth[i][b] >= thresh)
            ok = True
            first = second = None
            for r in np.flatnonzero(member):
                if r == a or r == b:
                    continue
                p_r = pts[r]
                near = min(sq_dist(pts[a], p_r), sq_dist(pts[b], p_r))
                if near * eps_d2 <= eps_n2 * sq_ab:
                    continue
                # Too far from both endpoints; disqualifies this ordering
                # only if it actually lies strictly between them.
                if first is None:
                    if compare_with_ids(ordering, fam, pts[a], pts[b]) < 0:
                        first, second = pts[a], pts[b]
                    else:
                        first, second = pts[b], pts[a]
                if (
                    compare_with_ids(ordering, fam, first, p_r) < 0
                    and compare_with_ids(ordering, fam, p_r, second) < 0
                ):
                    ok = False
                    break
            if ok:
                return True
        return self._exhaustive(a, b, sq_ab)

    def _exhaustive(self, a: int, b: int, sq_ab: int) -> bool:
        fam = self.family
        pts = self.points
        eps_n2 = self.eps.numerator**2
        eps_d2 = self.eps.denominator**2
        for ordering in fam.orderings:
            key = cmp_to_key(lambda u, v: compare_with_ids(ordering, fam, u, v))
            ranked = sorted(pts, key=key)
            pos = {p.id: t for t, p in enumerate(ranked)}
            lo, hi = sorted((pos[pts[a].id], pos[pts[b].id]))
            good = True
            for t in range(lo + 1, hi):
                r = ranked[t]
                near = min(sq_dist(pts[a], r), sq_dist(pts[b], r))
                if near * eps_d2 > eps_n2 * sq_ab:
                    good = False
                    break
            if good:
                return True
        return False


def check_lso_pair_property(
    family: OrderingFamily, points, p: Point, q: Point, eps_target: float
) -> bool:
    """True iff some ordering in the family protects the pair (p, q):
    every point strictly between them in that ordering lies within
    eps_target times their distance of one of them."""
    ctx = _PairContext(family, points, eps_target)
    return ctx.check(ctx.index_of(p.id), ctx.index_of(q.id))


def check_lso_all_pairs(
    family: OrderingFamily, points, eps_target: float, min_sq: int = 0
):
    """Run the pair property over every pair at squared distance >= min_sq.

    Returns (pairs_checked, failures) where failures lists (id, id) pairs.
    Shares the per-shift precomputation across pairs; each pair is decided
    by the same logic as check_lso_pair_property.
    """
    ctx = _PairContext(family, points, eps_target)
    pts = ctx.points
    n = len(pts)
    checked = 0
    failures = []
    for a in range(n):
        for b in range(a + 1, n):
            if sq_dist(pts[a], pts[b]) < max(min_sq, 1):
                continue
            checked += 1
            if not ctx.check(a, b):
                failures.append((pts[a].id, pts[b].id))
    return checked, failures
