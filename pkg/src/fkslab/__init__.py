"""fkslab: a spectral laboratory for one-dimensional chemotaxis with
fractional diffusion.

The density rho(t, x) evolves by

    d rho / dt = -Lambda^alpha rho - chi * d/dx (rho * dc/dx),
    -d^2 c / dx^2 = rho,

on a large periodic box standing in for the line, with Lambda^alpha the
fractional Laplacian of exponent alpha in (0, 2].  The package provides the
operators (spectral and singular-integral routes, cross-validated), an
integrating-factor Heun time stepper with exact mass conservation, the
self-similar frame at alpha = 1, blow-up criteria and detection, and
numerical estimation of the interpolation constants entering the
global-existence threshold.
"""

from .spectral import (
    Grid,
    Field,
    Spectrum,
    DomainTooSmallError,
    GridMismatchError,
    make_grid,
    synthesize_initial,
    transform,
    inverse_transform,
    mass,
    lp_norm,
    hs_seminorm,
    write_field_csv,
    read_field_csv,
)
from .operators import (
    QuadratureScheme,
    default_quadrature_scheme,
    symmetric_kernel_constant,
    frac_laplacian_spectral,
    frac_laplacian_quadrature,
    quadrature_calibration_error,
    spectral_derivative,
    drift,
    rhs_physical,
    rhs_rescaled,
)
from .integrate import (
    SimState,
    StepControl,
    Trajectory,
    ResolutionLossError,
    cfl_dt,
    suggest_safety,
    step,
    advance,
)
from .analysis import (
    TestFunction,
    BlowupCriterion,
    BlowupDetector,
    DiagnosticsRow,
    CriterionReport,
    build_test_function,
    corrected_moment,
    choose_lambda,
    make_blowup_criterion,
    check_global_smallness,
    check_blowup_criterion,
    detect_blowup,
    diagnostics_row,
    selfsimilar_residual,
    rescale_snapshot,
    cauchy_density,
    box_cauchy_limit,
    first_moment,
)
from .inequalities import (
    GnsEstimate,
    gns_ratio,
    estimate_gns_constant,
    default_gns_estimate,
    verify_ipp,
    verify_lp_decay,
    gns_supercritical_check,
    fit_supercritical_constant,
    random_smooth_positive_field,
    bump_mixture_field,
)
from .runner import (
    RunConfig,
    SweepConfig,
    PhasePoint,
    ConfigError,
    preset,
    run,
    sweep,
    load_run_config,
    save_run_config,
)

__version__ = "0.1.0"
