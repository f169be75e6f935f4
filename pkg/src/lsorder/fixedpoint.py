"""Fixed-point coordinates in [0,2) and the bit-level cell arithmetic on them.

Coordinates are stored as raw unsigned integers: a raw value ``r`` with
``frac_bits`` fractional bits represents the real number ``r / 2**frac_bits``.
Unshifted input points live in [0,1)^d (raw < 2**frac_bits); diagonal
shifting can push them into [0,2)^d, which still fits in frac_bits+1 bits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

MIN_FRAC_BITS = 8
MAX_FRAC_BITS = 62


class MsbLevel(enum.Enum):
    """Three-way comparison of most-significant-bit positions."""

    A_MORE_SIGNIFICANT = -1
    EQUAL_LEVEL = 0
    B_MORE_SIGNIFICANT = 1


@dataclass(frozen=True, slots=True)
class Point:
    """A d-dimensional fixed-point point plus its structure-unique id.

    ``coords`` holds raw integer values; the id is -1 until a caller
    assigns one (ids are assigned monotonically at insertion time).
    """

    coords: tuple[int, ...]
    id: int = -1

    @property
    def dim(self) -> int:
        return len(self.coords)

    def with_id(self, point_id: int) -> "Point":
        return Point(self.coords, point_id)


@dataclass(frozen=True, slots=True)
class ShiftTable:
    """The D+1 diagonal shifts used to align point pairs with cell boundaries.

    ``shifts[i]`` is the fixed-point rounding of i/(D+1), scaled by
    2**frac_bits, with D = 2*ceil(dim/2).
    """

    dim: int
    frac_bits: int
    shift_count: int
    shifts: tuple[int, ...]


def make_shift_table(dim: int, frac_bits: int) -> ShiftTable:
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    _check_frac_bits(frac_bits)
    shift_count = 2 * ((dim + 1) // 2)  # 2*ceil(d/2)
    n = shift_count + 1
    # round(i * 2^w / n) in exact integer arithmetic; n is odd so the
    # ideal value is never exactly halfway and rounding mode cannot matter.
    shifts = tuple((2 * i * (1 << frac_bits) + n) // (2 * n) for i in range(n))
    if shifts[0] != 0 or shifts[-1] >= (1 << frac_bits):
        raise AssertionError("shift table out of range")
    if any(a >= b for a, b in zip(shifts, shifts[1:])):
        raise AssertionError("shift table not strictly increasing")
    return ShiftTable(dim, frac_bits, shift_count, shifts)


def _check_frac_bits(frac_bits: int) -> None:
    if not MIN_FRAC_BITS <= frac_bits <= MAX_FRAC_BITS:
        raise ValueError(
            f"frac_bits must be in [{MIN_FRAC_BITS}, {MAX_FRAC_BITS}], got {frac_bits}"
        )


def quantize(values, frac_bits: int, point_id: int = -1) -> Point:
    """Quantize real coordinates in [0,1) to a fixed-point Point.

    Each coordinate becomes floor(value * 2**frac_bits), computed exactly
    from the binary expansion of the input float (no double rounding).
    """
    _check_frac_bits(frac_bits)
    vals = tuple(values)
    if not vals:
        raise ValueError("point must have at least one coordinate")
    raws = []
    for v in vals:
        v = float(v)
        if not 0.0 <= v < 1.0 or math.isnan(v):
            raise ValueError(f"coordinate {v!r} outside [0, 1)")
        num, den = v.as_integer_ratio()  # den is a power of two
        raws.append((num << frac_bits) // den)
    return Point(tuple(raws), point_id)


def cmp_msb(a: int, b: int) -> MsbLevel:
    """Compare the most-significant-bit levels of two raw coordinates.

    msb(0) is treated as +infinity: zero is less significant than any
    nonzero value, and two zeros are at equal level.
    """
    la = a.bit_length()
    lb = b.bit_length()
    if la > lb:
        return MsbLevel.A_MORE_SIGNIFICANT
    if la < lb:
        return MsbLevel.B_MORE_SIGNIFICANT
    return MsbLevel.EQUAL_LEVEL


def shift_point(p: Point, i: int, table: ShiftTable) -> Point:
    """Add diagonal shift i to an unshifted point; the id is preserved."""
    if not 0 <= i <= table.shift_count:
        raise IndexError(f"shift index {i} not in [0, {table.shift_count}]")
    if len(p.coords) != table.dim:
        raise ValueError(f"point has {len(p.coords)} coords, table expects {table.dim}")
    limit = 1 << table.frac_bits
    if any(r >= limit for r in p.coords):
        raise ValueError("point already shifted (coordinate >= 1.0)")
    s = table.shifts[i]
    return Point(tuple(r + s for r in p.coords), p.id)


def common_cell_depth(p: Point, q: Point, frac_bits: int) -> int:
    """Depth of the smallest canonical cell of [0,2)^d containing both points.

    Returns m in {0,..,frac_bits+1}: the bit of weight 2^0 has depth 0 and
    the bit of weight 2^-frac_bits has depth frac_bits; equal points return
    frac_bits+1.  The containing cell has side 2^-(m-1) for m >= 1 and side
    2 (the whole domain) for m = 0.  Both points must carry the same shift.
    """
    if len(p.coords) != len(q.coords):
        raise ValueError("points have different dimensions")
    top = 0
    for a, b in zip(p.coords, q.coords):
        x = a ^ b
        if x:
            h = x.bit_length() - 1
            if h > top:
                top = h
            if top == frac_bits:  # depth 0, cannot get shallower
                return 0
    if top == 0 and all(a == b for a, b in zip(p.coords, q.coords)):
        return frac_bits + 1
    return frac_bits - top


def sq_dist(p: Point, q: Point) -> int:
    """Exact squared Euclidean distance in units of 2^-2*frac_bits."""
    if len(p.coords) != len(q.coords):
        raise ValueError("points have different dimensions")
    total = 0
    for a, b in zip(p.coords, q.coords):
        d = a - b
        total += d * d
    return total


def dist_value(sq: int, frac_bits: int) -> float:
    """Real-valued distance from an exact squared raw distance.

    One float conversion, one correctly-rounded sqrt, one exact scale by a
    power of two: deterministic across platforms.
    """
    return math.sqrt(sq) * 2.0 ** (-frac_bits)
