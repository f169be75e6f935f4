"""Locality-sensitive orderings and the proximity structures built on them."""

from .family import (
    ChildPermutation,
    Ordering,
    OrderingFamily,
    build_family,
    compare,
    family_from_internal,
    family_size,
    walecki_paths,
)
from .fixedpoint import (
    MsbLevel,
    Point,
    ShiftTable,
    cmp_msb,
    common_cell_depth,
    dist_value,
    make_shift_table,
    quantize,
    shift_point,
    sq_dist,
)
from .proximity import AnnState, BcpState, Color
from .spanner import DynamicSpanner, approx_mst

__all__ = [
    "AnnState",
    "BcpState",
    "ChildPermutation",
    "Color",
    "DynamicSpanner",
    "MsbLevel",
    "Ordering",
    "OrderingFamily",
    "Point",
    "ShiftTable",
    "approx_mst",
    "build_family",
    "cmp_msb",
    "common_cell_depth",
    "compare",
    "dist_value",
    "family_from_internal",
    "family_size",
    "make_shift_table",
    "quantize",
    "shift_point",
    "sq_dist",
    "walecki_paths",
]

__version__ = "0.1.0"
