"""Poisson ellipse percolation: exact samplers, event predicates, estimators."""
from .errors import (DomainError, EllipsePercError, InfiniteIntensity, ModelError, QuadratureError,
                     RejectionStall, ResourceLimit, ValidationError)
from .geometry import (TOL, BoxSpec, GrainSpec, Segment, common_point, disk_in_grain, grain_box_intersects,
                       grain_grain_intersects, grain_segment_intersects, is_marginal, minkowski_hit_area,
                       point_in_grain, support_extent, triple_common_point)
from .laws import AxisLaw, parse_law
from .sampling import (Configuration, TruncationReport, hitting_intensity, make_rng, sample_hitting_process,
                       sample_truncated_process, truncation_error_bound)
from .events import (EVENT_NAMES, CircuitSpec, annulus_connection, count_covering, covered_crossing,
                     crossing_graph, disk_covered, one_ellipse_crossing, point_covered, three_ellipse_circuit,
                     vacant_circuit_in_annulus, vacant_lr_crossing)
from .montecarlo import (EstimateResult, EventParams, PowerFit, covariance, estimate, fit_power_law, lln_counts,
                         wilson_ci)
from .multiscale import (LevelField, RecursionParams, check_two_dependence, compute_k0_u0, fractal_percolation,
                         iterate_qk, removal_process, validate_annuli_schedule, verify_qk_bound)
from .render import render_svg

__version__ = "0.1.0"
