"""einwarp: numerical construction and verification of warped-product Einstein
geometries and their codimension-two immersions."""

from .geometry import (
    Chart,
    FDConfig,
    MetricField,
    ScalarField,
    box_chart,
    constant_metric,
    euclidean_metric,
    gradient,
    interval_chart,
    metric_partial,
    partial,
    partial2,
    product_chart,
)
from .library import flat_metric, hyperbolic_metric, sphere_chart, sphere_metric
from .curvature import (
    CurvatureSample,
    christoffel,
    curvature_sample,
    gradient_norm_sq,
    hessian,
    laplacian,
    ricci,
    riemann,
    riemann_lowered,
    scalar_curvature,
    sectional,
)
from .warp import (
    EinsteinData,
    WarpSolution,
    closed_form_u,
    closed_form_warp,
    fiber_ricci_constant,
    gs_first_integral_residual,
    gs_warp,
    mu_from_rho,
    product_metric,
    residual_eq1,
    residual_eq2,
    residual_eq3,
    residual_eq4,
    residuals_reduced,
    warped_metric,
)
from .immersions import (
    ImmersionMap,
    WarpedRepresentation,
    cone_map,
    cylinder_immersion,
    jacobian,
    point_cloud_text,
    product_immersion,
    pullback_field,
    pullback_metric,
    rotational_immersion,
    sphere_inclusion,
    warped_representation,
    write_point_cloud,
)
from .checks import (
    CheckResult,
    VerificationReport,
    combined_identity_check,
    constancy_check,
    einstein_check,
    gradient_bound_check,
    isometry_check,
    trace_identity_check,
)
from .sampling import chart_samples
from .scenarios import EngineConfig, dump_samples, list_scenarios, run_scenario

__version__ = "0.1.0"
