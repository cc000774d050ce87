"""Computing with strongly convex sets in R^n.

Strongly convex sets (with respect to a radius R) are intersections of
closed balls of radius R.  This package provides their polarity calculus
(polars, second polars = R-strongly convex hulls), exact 2D Euclidean arc
boundaries, farthest/nearest/support queries, a sampled-function lab
(Fenchel conjugates, the homogenized conjugate, farthest-function
certificates, the sublevel farthest transform), and a seeded verification
harness with a CLI.
"""

from .errors import EmptyRegionError, EmptySetError, UnsupportedNormError
from .norms import (
    DEFAULT_TOL,
    DirectionSet,
    NormSpec,
    dual_norm_eval,
    norm_eval,
    pairing,
    unit_sphere_samples,
)
from .sets import (
    Ball,
    BallRegion,
    Box,
    FarthestResult,
    PointSet,
    SetOracle,
    convex_hull_2d,
    farthest_distance_ball,
    farthest_distance_finite,
    farthest_distance_region,
    farthest_values,
    min_enclosing_circle,
    nearest_distance,
    nearest_values,
    support_function,
)
from .arcs import Arc, ArcRegion, ArcVertex, build_arc_region
from .polarity import (
    HullResult,
    is_strongly_convex,
    polar,
    polar_oracle,
    polar_region,
    sigma_convexity_check,
    strong_hull,
    support_sum_check,
)
from .functions import (
    INF_SENTINEL,
    FarthestCertificate,
    GridFunction,
    alpha_convexity_gap,
    certify_farthest,
    check_condition_a,
    check_condition_b,
    condition_a_tolerance,
    eta,
    eta_batch,
    farthest_field,
    farthest_over_sublevel,
    fenchel_conjugate,
    find_negative_alpha_gap,
    gamma_recover,
    transform_fR,
)
from .scenes import (
    Scene,
    generate_instance,
    load_grid_function,
    load_scene,
    region_to_json,
    save_grid_function,
    save_scene,
    scene_from_json,
    scene_to_json,
)
from .suites import SUITES, VerificationReport, run_suite
from .render import marching_squares, render_svg

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
