"""Four-body action minimizers: certificates, minimization and orbit extension."""

from ._core import (
    __version__,
    action_quadrature_oracle,
    build_boundary,
    build_test_path,
    case_bound,
    certificate_sweep,
    classify_period,
    extend,
    g1,
    g2,
    kepler_lower_bound,
    min_pair_distance,
    minimize,
    newton_acceleration,
    polyline_action,
    read_path_json,
    tables,
    total_collision_bound,
)

__all__ = [
    "__version__",
    "action_quadrature_oracle",
    "build_boundary",
    "build_test_path",
    "case_bound",
    "certificate_sweep",
    "classify_period",
    "extend",
    "g1",
    "g2",
    "kepler_lower_bound",
    "min_pair_distance",
    "minimize",
    "newton_acceleration",
    "polyline_action",
    "read_path_json",
    "tables",
    "total_collision_bound",
]
