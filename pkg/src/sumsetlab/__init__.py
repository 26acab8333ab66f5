"""sumsetlab: exact-arithmetic toolkit for two-dimensional sumsets.

Minkowski sums, linear compressions, parallel-line covering numbers,
closed-form sumset lower bounds, rectilinear continuous analogues, and an
exhaustive lattice search harness for verifying or falsifying the bounds
at desk scale.
"""
from .geometry import (
    Direction,
    OrderedBasis,
    Point,
    PointSet,
    STANDARD_BASIS,
    basis,
    change_basis,
    convex_hull_vertices,
    direction,
    inverse_change_basis,
    line_count,
    max_collinear,
    minkowski_sum,
    point,
    pointset_from_json,
    pointset_to_json,
)
from .compression import Profile, compress_axis, compress_full, compressed_sumset_size, profile_of
from .covering import CoveringWitness, candidate_directions, h1
from .bounds import (
    bound_lines,
    bound_monstrous,
    bound_sqrt_estimate,
    bound_thm1,
    bound_thm2,
    bound_thm3,
    bound_thm4,
    lemma21_u,
    lev_smeliansky_check,
    normalize_lev_smeliansky,
)
from .rectilinear import Rect, RectUnion, check_thm22, mink_sum_rect
from .report import BoundReport, CheckResult, SqrtExpr
from .verify import check, check_lemma31, witness
from .search import SearchSpec, SearchSummary, exhaustive_search, random_search

__version__ = "0.1.0"
