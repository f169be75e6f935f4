"""Families of locality-sensitive orderings of [0,1)^d and their comparator.

A family is parameterised by the dimension, a fractional bit count and an
internal cell ratio eps_internal = 2**-level_bits.  One ordering is a
(shift index, tree index, child permutation) triple: points are compared by
walking the implied hierarchical grid decomposition and ranking the first
divergent grid cells along a fixed Hamiltonian path of the cell graph.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from .fixedpoint import (
    Point,
    ShiftTable,
    _check_frac_bits,
    make_shift_table,
    shift_point,
)

LESS = -1
EQUAL = 0
GREATER = 1

# Hard cap on level_bits * dim: the per-node cell count is 2**(level_bits*dim)
# and child indices must stay comfortably inside machine words.
MAX_LEVEL_DIM_BITS = 24

DEFAULT_FRAC_BITS = 32


@dataclass(frozen=True, slots=True)
class ChildPermutation:
    """One Hamiltonian path of the complete graph on n grid cells.

    Realised as the zigzag rotation ``start, start+1, start-1, start+2, ...``
    (mod n).  The n/2 rotations for start = 0..n/2-1 are edge-disjoint and
    together cover every cell pair exactly once, so any two cells are path
    neighbours in exactly one of them.  Ranks come from a closed form; the
    explicit path is only materialised on demand.
    """

    n: int
    start: int

    def rank_of(self, cell: int) -> int:
        """Position of a cell along the path, in O(1)."""
        d = (cell - self.start) % self.n
        if d == 0:
            return 0
        if 2 * d <= self.n:
            return 2 * d - 1
        return 2 * (self.n - d)

    def path(self) -> list[int]:
        n, k = self.n, self.start
        out = [k]
        for t in range(1, n // 2):
            out.append((k + t) % n)
            out.append((k - t) % n)
        out.append((k + n // 2) % n)
        return out

    def rank_table(self) -> list[int]:
        rank = [0] * self.n
        for r, c in enumerate(self.path()):
            rank[c] = r
        return rank


def walecki_paths(n: int) -> list[ChildPermutation]:
    """The n/2 edge-disjoint Hamiltonian paths covering the complete graph K_n."""
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and >= 2, got {n}")
    return [ChildPermutation(n, k) for k in range(n // 2)]


def adjacent_perm_index(cell_a: int, cell_b: int, n: int) -> int:
    """Index of the unique path in which two distinct cells are neighbours.

    Cells a and b are consecutive in the zigzag path with start k exactly
    when a + b = 2k or 2k + 1 (mod n).
    """
    if cell_a == cell_b:
        raise ValueError("cells must be distinct")
    s = (cell_a + cell_b) % n
    return (s // 2) % (n // 2)


@dataclass(frozen=True, slots=True)
class Ordering:
    """One member of the family: shift + tree + child permutation."""

    shift_i: int
    tree_j: int
    perm: ChildPermutation


def family_size(dim: int, eps_internal: float) -> int:
    """Exact number of orderings: (D+1) * E * 2^(E*d - 1)."""
    level_bits = _level_bits_from_internal(eps_internal)
    shift_count = 2 * ((dim + 1) // 2)
    return (shift_count + 1) * level_bits * (1 << (level_bits * dim - 1))


def _level_bits_from_internal(eps_internal: float) -> int:
    bits = -math.frexp(eps_internal)[1] + 1  # eps = 2**-bits exactly
    if eps_internal <= 0 or eps_internal > 0.5 or 2.0 ** (-bits) != eps_internal:
        raise ValueError(f"eps_internal must be a power of two in (0, 1/2], got {eps_internal}")
    return bits


class _OrderingSeq(Sequence):
    """Lazy view of a family's orderings in canonical (shift, tree, perm) order.

    Orderings are cheap value objects, so materialising all of them is never
    needed; large families (level_bits*dim up to 24) stay O(1) in memory.
    """

    def __init__(self, family: "OrderingFamily"):
        self._family = family

    def __len__(self) -> int:
        f = self._family
        return (f.shift_count + 1) * f.level_bits * f.num_perms

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return [self[t] for t in range(*idx.indices(len(self)))]
        n = len(self)
        if idx < 0:
            idx += n
        if not 0 <= idx < n:
            raise IndexError(idx)
        f = self._family
        ij, k = divmod(idx, f.num_perms)
        i, j = divmod(ij, f.level_bits)
        return Ordering(i, j, ChildPermutation(f.n_cells, k))


@dataclass(slots=True)
class OrderingFamily:
    """The full set of locality-sensitive orderings plus derived parameters.

    Immutable after construction; `compare` and all derived helpers are pure,
    so a family can be shared freely across threads.
    """

    dim: int
    eps_target: float | None
    eps_internal: float
    level_bits: int
    shift_count: int
    frac_bits: int
    shift_table: ShiftTable

    @property
    def n_cells(self) -> int:
        return 1 << (self.level_bits * self.dim)

    @property
    def num_perms(self) -> int:
        return self.n_cells // 2

    @property
    def orderings(self) -> _OrderingSeq:
        return _OrderingSeq(self)

    @property
    def size(self) -> int:
        return len(self.orderings)

    def perm(self, k: int) -> ChildPermutation:
        if not 0 <= k < self.num_perms:
            raise IndexError(k)
        return ChildPermutation(self.n_cells, k)

    def ordering_index(self, shift_i: int, tree_j: int, perm_k: int) -> int:
        return (shift_i * self.level_bits + tree_j) * self.num_perms + perm_k

    def ordering_at(self, shift_i: int, tree_j: int, perm_k: int) -> Ordering:
        return Ordering(shift_i, tree_j, self.perm(perm_k))

    def n_blocks(self, tree_j: int) -> int:
        """Number of comparison blocks for one tree: block 0 plus enough
        level_bits-wide blocks to reach depth frac_bits."""
        rest = max(1, -(-(self.frac_bits - tree_j) // self.level_bits))
        return 1 + rest

    @property
    def max_blocks(self) -> int:
        return self.n_blocks(0)

    def key_bits(self) -> int:
        """Bits needed for a packed (rank sequence, 32-bit id) sort key."""
        return self.max_blocks * self.level_bits * self.dim + 32


def build_family(dim: int, eps_target: float, frac_bits: int = DEFAULT_FRAC_BITS) -> OrderingFamily:
    """Build the ordering family for a target approximation parameter.

    The internal cell ratio is the largest power of two not exceeding
    eps_target / (2*(D+1)*sqrt(d)), which is what makes the end-to-end
    guarantees hold at eps_target.
    """
    if not 1 <= dim <= 8:
        raise ValueError(f"dimension must be in [1, 8], got {dim}")
    if not 0.0 < eps_target < 1.0:
        raise ValueError(f"eps_target must be in (0, 1), got {eps_target}")
    shift_count = 2 * ((dim + 1) // 2)
    bound = eps_target / (2 * (shift_count + 1) * math.sqrt(dim))
    level_bits = max(1, math.ceil(-math.log2(bound)))
    while 2.0 ** (-level_bits) > bound:
        level_bits += 1
    while level_bits > 1 and 2.0 ** (-(level_bits - 1)) <= bound:
        level_bits -= 1
    return _build(dim, eps_target, level_bits, frac_bits)


def family_from_internal(
    dim: int,
    level_bits: int,
    frac_bits: int = DEFAULT_FRAC_BITS,
    eps_target: float | None = None,
) -> OrderingFamily:
    """Build a family directly from the internal cell ratio 2**-level_bits."""
    if level_bits < 1:
        raise ValueError(f"level_bits must be >= 1, got {level_bits}")
    return _build(dim, eps_target, level_bits, frac_bits)


def _build(dim: int, eps_target: float | None, level_bits: int, frac_bits: int) -> OrderingFamily:
    if not 1 <= dim <= 8:
        raise ValueError(f"dimension must be in [1, 8], got {dim}")
    _check_frac_bits(frac_bits)
    if level_bits * dim > MAX_LEVEL_DIM_BITS:
        raise ValueError(
            f"level_bits*dim = {level_bits * dim} exceeds the cap {MAX_LEVEL_DIM_BITS}; "
            f"increase eps_target or reduce the dimension"
        )
    if level_bits > frac_bits:
        raise ValueError(
            f"level_bits = {level_bits} exceeds frac_bits = {frac_bits}; "
            f"tree indices must stay within the coordinate precision"
        )
    table = make_shift_table(dim, frac_bits)
    return OrderingFamily(
        dim=dim,
        eps_target=eps_target,
        eps_internal=2.0 ** (-level_bits),
        level_bits=level_bits,
        shift_count=table.shift_count,
        frac_bits=frac_bits,
        shift_table=table,
    )


def child_index_1d(raw: int, tree_j: int, block: int, level_bits: int, frac_bits: int) -> int:
    """The level_bits-wide bit field of one coordinate at a given block.

    Block 0 holds bit depths 0..tree_j zero-extended on the left; block l >= 1
    holds depths tree_j+(l-1)*E+1 .. tree_j+l*E.  Depths beyond frac_bits do
    not exist and read as zeros on the right.
    """
    if block == 0:
        return raw >> (frac_bits - tree_j)
    bottom = tree_j + block * level_bits
    if bottom <= frac_bits:
        return (raw >> (frac_bits - bottom)) & ((1 << level_bits) - 1)
    return (raw << (bottom - frac_bits)) & ((1 << level_bits) - 1)


def cell_at_block(coords, tree_j: int, block: int, level_bits: int, frac_bits: int) -> int:
    """Grid-cell index of a point at one block; dimension 1 occupies the
    least significant level_bits bits."""
    c = 0
    for t, raw in enumerate(coords):
        c |= child_index_1d(raw, tree_j, block, level_bits, frac_bits) << (level_bits * t)
    return c


def block_of_depth(depth: int, tree_j: int, level_bits: int) -> int:
    """Index of the block containing a given bit depth for one tree."""
    if depth <= tree_j:
        return 0
    return -(-(depth - tree_j) // level_bits)


def compare(ordering: Ordering, family: OrderingFamily, p: Point, q: Point) -> int:
    """Three-way comparison of two unshifted points under one ordering.

    Returns LESS/EQUAL/GREATER; EQUAL only for coordinate-identical points
    (callers break remaining ties by id).
    """
    if len(p.coords) != family.dim or len(q.coords) != family.dim:
        raise ValueError("point dimension does not match the family")
    w = family.frac_bits
    e = family.level_bits
    j = ordering.tree_j
    shift = family.shift_table.shifts[ordering.shift_i]
    top = -1
    for a, b in zip(p.coords, q.coords):
        x = (a + shift) ^ (b + shift)
        if x:
            h = x.bit_length() - 1
            if h > top:
                top = h
    if top < 0:
        return EQUAL
    m = w - top  # depth of the first divergent bit over all dimensions
    block = block_of_depth(m, j, e)
    cp = cell_at_block((a + shift for a in p.coords), j, block, e, w)
    cq = cell_at_block((b + shift for b in q.coords), j, block, e, w)
    rp = ordering.perm.rank_of(cp)
    rq = ordering.perm.rank_of(cq)
    return LESS if rp < rq else GREATER


def compare_with_ids(ordering: Ordering, family: OrderingFamily, p: Point, q: Point) -> int:
    """`compare` refined to a strict total order by the id tie-break."""
    c = compare(ordering, family, p, q)
    if c:
        return c
    if p.id == q.id:
        return EQUAL
    return LESS if p.id < q.id else GREATER


def child_sequence(family: OrderingFamily, shifted_coords, tree_j: int) -> tuple[int, ...]:
    """Cell indices of one (already shifted) point at every block of a tree,
    padded with zero cells up to the family-wide maximum block count."""
    coords = tuple(shifted_coords)
    e, w = family.level_bits, family.frac_bits
    blocks = family.n_blocks(tree_j)
    seq = [cell_at_block(coords, tree_j, l, e, w) for l in range(blocks)]
    seq.extend([0] * (family.max_blocks - blocks))
    return tuple(seq)


def shifted_point(family: OrderingFamily, p: Point, shift_i: int) -> Point:
    return shift_point(p, shift_i, family.shift_table)
