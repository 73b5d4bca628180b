"""Radial Kahler-Ricci flow toolkit for U(n)-invariant metrics on C^n.

A metric is encoded by its generating function xi on a log grid in
r = |z|^2; the package derives the coefficients h and f, curvature,
completeness and volume-growth classification, integrates the flow
dg/dt = -Ric in its radial reduction, and builds the comparison metrics
used to control longtime existence.
"""

__version__ = "0.1.0"

from ._stepper import backend_name
from .grid import RadialGrid, Profile
from .metric import (MetricProfile, h_from_xi, f_from_h, xi_from_h,
                     metric_at_point, equivalence_bounds, geodesic_radius,
                     ball_volume, completeness_test)
from .curvature import (CurvatureProfile, curvature_components,
                        scalar_curvature, bisectional_sign,
                        bounded_curvature_test)
from .oracle import fd_curvature_oracle
from .classify import (ClassificationReport, check_c1, check_c2, check_c3,
                       volume_growth_class, classify_metric)
from .flow import (FlowConfig, FlowState, Trajectory, SolverTolerances,
                   time_step, run_flow, log_det_ratio, rescaled_deviation,
                   lyh_monotonicity, f_lower_bound_rhs, refinement_uniqueness,
                   existence_horizon, flow_diagnostics)
from .comparison import (ComparisonResult, BumpSequence, pullback_rescale,
                         c1_equivalence_bounds, select_k_for_epsilon,
                         build_bump_sequence, assemble_comparison_metric,
                         truncate_xi, cigar_obstruction_bound,
                         make_auxiliary_metric, scale_metric)
from .presets import preset_xi, preset_metric, xi_function
from .config import RunConfig, parse_config
from .io import export_records, save_snapshot, load_snapshot

__all__ = [
    "backend_name", "RadialGrid", "Profile",
    "MetricProfile", "h_from_xi", "f_from_h", "xi_from_h", "metric_at_point",
    "equivalence_bounds", "geodesic_radius", "ball_volume", "completeness_test",
    "CurvatureProfile", "curvature_components", "scalar_curvature",
    "bisectional_sign", "bounded_curvature_test", "fd_curvature_oracle",
    "ClassificationReport", "check_c1", "check_c2", "check_c3",
    "volume_growth_class", "classify_metric",
    "FlowConfig", "FlowState", "Trajectory", "SolverTolerances", "time_step",
    "run_flow", "log_det_ratio", "rescaled_deviation", "lyh_monotonicity",
    "f_lower_bound_rhs", "refinement_uniqueness", "existence_horizon",
    "flow_diagnostics",
    "ComparisonResult", "BumpSequence", "pullback_rescale",
    "c1_equivalence_bounds", "select_k_for_epsilon", "build_bump_sequence",
    "assemble_comparison_metric", "truncate_xi", "cigar_obstruction_bound",
    "make_auxiliary_metric", "scale_metric",
    "preset_xi", "preset_metric", "xi_function",
    "RunConfig", "parse_config",
    "export_records", "save_snapshot", "load_snapshot",
]
