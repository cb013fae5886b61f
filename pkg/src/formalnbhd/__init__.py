"""Truncated formal neighbourhoods of submanifolds.

The package models an adapted atlas of a submanifold S in a complex
manifold M by transition maps truncated at a fixed normal degree, decides
the splitting / comfortable / linearizable conditions, computes the
obstruction cocycles and applies the normalising coordinate changes.
"""

from .atlas import (
    Atlas,
    Chart,
    ChartTransition,
    check_triple_consistency,
    induced_normal_bundle_atlas,
    invert_transition,
)
from .curves import (
    CurveData,
    corollary_laufer,
    curve_report,
    proposition_5_1,
    proposition_5_2,
    vanishing_flags,
)
from .exprparse import dump_atlas, load_atlas, parse_expression, parse_in_ring
from .gallery import generate
from .obstructions import (
    Cochain,
    CochainRole,
    CocycleKind,
    ObstructionCocycle,
    check_k_comfortable_atlas,
    check_k_linearizable,
    check_k_splitting_atlas,
    check_splitting_atlas,
    cocycle_connection,
    cocycle_g,
    cocycle_h,
    cocycle_s,
    normalize_comfortable,
    normalize_splitting,
    verify_coboundary,
)
from .series import ABOVE_K, SeriesRing, TruncatedSeries, add, compose, derive, mul, normal_order, restrict_to_S

__version__ = "0.1.0"
