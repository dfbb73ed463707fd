"""Time-domain enclosure method for inverse acoustic obstacle scattering.

Python bindings for the C++ core: wave simulation past a sound-soft
obstacle, indicator-curve analysis, and geometry recovery (enclosing
spheroid, first reflection points, normals, curvatures, ball recovery)
from bistatic data.
"""

from ._core import (  # noqa: F401
    AsymptoticKind,
    Ball,
    BallReconstruction,
    CriterionResult,
    CurvatureExtraction,
    DecayFit,
    IndicatorCurve,
    LogScaled,
    MinBrokenPath,
    NumericError,
    ObstacleShape,
    PreconditionError,
    PrincipalResult,
    ReceiverTrace,
    Reflector,
    ScaledLimit,
    ScanHit,
    ScanOptions,
    ScanResult,
    SimulationConfig,
    SpheroidFrame,
    TimeThresholds,
    __version__,
    asymptotic_rhs,
    causal_halfwidth,
    criterion_count,
    criterion_name,
    curvature_extract_curves,
    curvature_extract_geometry,
    decay_fit,
    decay_fit_refined,
    extract_normal,
    fdtd_indicator,
    fdtd_rate_probe,
    geometry_rate_probe,
    geometry_x1_probe,
    load_trace,
    min_broken_path,
    min_over_triple_surfaces,
    principal_directions,
    reconstruct_ball,
    refine_direction_quadratic,
    run_criterion,
    save_trace,
    scaled_limit,
    scan_reflector,
    semianalytic_indicator,
    semianalytic_rate_probe,
    semianalytic_x1_probe,
    shifted_indicator_fdtd,
    shifted_indicator_semianalytic,
    simulate,
    t_thresholds,
)
