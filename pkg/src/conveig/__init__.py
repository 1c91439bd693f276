"""Unimodal eigenfunctions of superlinear convolution eigenvalue problems.

The package constructs, verifies, and explores the one-parameter family of
even/nonnegative/unimodal eigenfunctions of sigma*u = a*f(u) for bilinear
constitutive laws f: uniform-grid convolution machinery, the cut-off
operator on odd profiles, its leading eigenpair by power iteration, the
monotone eigencurve and its inversion, the Neumann-series kernel transform
that reduces positive lower slopes to zero, the constructive nonlinear
solver, and probes of the asymptotic regimes.
"""

__version__ = "0.1.0"

from .asymptotics import (
    KappaReport,
    LargeSigmaReport,
    MomentData,
    ScalingFit,
    SmallSigmaReport,
    check_kappa,
    check_large_sigma,
    check_small_sigma,
    fit_power_law,
    kernel_moment,
)
from .cutoff import (
    ConeReport,
    OddProfile,
    SnappedCutoff,
    apply_operator,
    cone_membership,
    operator_matrix,
    rayleigh_quotient,
    snap_cutoff,
)
from .errors import (
    AdmissibilityError,
    ConveigError,
    ConvergenceError,
    GridMismatchError,
    GridTooSmallError,
    InvalidParameterError,
    OutOfRangeError,
    ResolutionError,
    UnsupportedKernelError,
)
from .grid import Grid, GridFn, convolve, make_grid, quadrature
from .kernels import (
    Kernel,
    ValidationReport,
    gaussian,
    indicator,
    kernel_from_samples,
    load_kernel_csv,
    reference_grid,
    sample,
    tent,
    validate_kernel,
)
from .krein import (
    EigenCurve,
    EigenPair,
    InversionResult,
    default_grid,
    eigencurve,
    invert_eigencurve,
    power_method,
)
from .solve import (
    BilinearNonlinearity,
    Solution,
    SweepEntry,
    Tolerances,
    cosine_similarity,
    derivative_profile,
    eval_f,
    residual,
    solve_sigma,
    sweep,
)
from .transform import (
    MU_CAP,
    ResolventCheck,
    TransformedKernel,
    resolvent_check,
    suggested_half_width,
    transform_kernel,
    transform_parameters,
    truncation_depth,
)
