"""Outer bounds on scaled relative graphs, separation margins, loop shaping.

The package splits into a geometry core (`regions`), operator expressions
with an exact-discretization simulator (`operators`, `signals`), SRG bound
computation (`srg`), empirical sampling (`sampling`), the margin layer
(`analysis`) and a CLI/JSON front end (`cli`). The names re-exported here
are the stable surface.
"""

__version__ = "0.1.0"

from . import regions
from .analysis import (
    MarginReport,
    empirical_gain,
    empirical_gain_details,
    margin_report_from_dict,
    margin_report_to_dict,
    robustness_margin,
    sensitivity_margin,
    sensitivity_srg,
)
from .operators import (
    Compose,
    Feedback,
    Inverse,
    Lti,
    NormalMatrix,
    NotSimulableError,
    Scale,
    StaticNL,
    Sum,
    expr_from_dict,
    expr_to_dict,
    rational_of,
    simulate,
    simulate_many,
)
from .regions import (
    Disc,
    HalfPlaneRe,
    PointSet,
    Region,
    Segment,
    UnsupportedGeometryError,
    chord_closure,
    contains,
    h_convex_hull,
    intersects,
    make_region,
    minkowski_product,
    minkowski_sum,
    nearest_points,
    point_distance,
    region_from_dict,
    region_to_dict,
)
from .sampling import (
    SrgSample,
    coverage_report,
    sample_from_dict,
    sample_srg,
    sample_to_csv,
    sample_to_dict,
    z_point,
)
from .signals import Signal, SignalClass, gen_signal
from .srg import (
    SrgBound,
    UnboundedNyquistError,
    chord_slope_bounds,
    srg_bound_to_dict,
    srg_of_expr,
    srg_of_lti,
    srg_of_normal_matrix,
    srg_of_static,
)

__all__ = [
    "__version__",
    "regions",
    "Signal",
    "SignalClass",
    "gen_signal",
    "Lti",
    "StaticNL",
    "NormalMatrix",
    "Sum",
    "Compose",
    "Inverse",
    "Scale",
    "Feedback",
    "simulate",
    "simulate_many",
    "rational_of",
    "expr_to_dict",
    "expr_from_dict",
    "NotSimulableError",
    "Region",
    "Disc",
    "HalfPlaneRe",
    "Segment",
    "PointSet",
    "make_region",
    "contains",
    "point_distance",
    "intersects",
    "nearest_points",
    "minkowski_sum",
    "minkowski_product",
    "chord_closure",
    "h_convex_hull",
    "region_to_dict",
    "region_from_dict",
    "UnboundedNyquistError",
    "UnsupportedGeometryError",
    "SrgBound",
    "srg_of_lti",
    "srg_of_static",
    "srg_of_normal_matrix",
    "srg_of_expr",
    "srg_bound_to_dict",
    "chord_slope_bounds",
    "SrgSample",
    "z_point",
    "sample_srg",
    "coverage_report",
    "sample_to_dict",
    "sample_from_dict",
    "sample_to_csv",
    "MarginReport",
    "robustness_margin",
    "sensitivity_margin",
    "sensitivity_srg",
    "empirical_gain",
    "empirical_gain_details",
    "margin_report_to_dict",
    "margin_report_from_dict",
]
