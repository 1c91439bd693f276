"""Numerical probes of the solver's limiting regimes.

Three limits are probed, each against the formally predicted scaling:

* small eigenvalue, zero lower slope: the cut-off shrinks like sigma^(1/3)
  with an explicit prefactor from the kernel curvature, the profile
  approaches theta * a(x)/a(0), and the rescaled super-threshold bump is a
  parabola;
* eigenvalue approaching the upper end: the cut-off grows like
  gap^(-1/2) with prefactor pi*sqrt(m*eta) (m = half the kernel's second
  moment), the L2 norm blows up like gap^(-3/4), and the rescaled bump is
  1 + cos(pi x);
* positive lower slope, eigenvalue approaching it: the transformed-kernel
  amplitude and curvature scale like sqrt(sigma-zeta) and (sigma-zeta),
  with limits kappa0, kappa2 governing a finite cut-off limit.

All probes consume only public solver operations, so they double as
integration tests of the whole pipeline.  Raw kappa ratios carry
O(sqrt(sigma-zeta)) corrections, so the limit estimates are
Richardson-extrapolated in sqrt(sigma-zeta) from the two smallest gaps;
the raw sequences are reported for trend checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, UnsupportedKernelError
from .grid import GridFn, make_grid
from .kernels import Kernel
from .krein import power_method
from .solve import BilinearNonlinearity, Solution, Tolerances, solve_sigma
from .transform import suggested_half_width, transform_kernel

__all__ = [
    "ScalingFit",
    "MomentData",
    "SmallSigmaReport",
    "LargeSigmaReport",
    "KappaReport",
    "fit_power_law",
    "kernel_moment",
    "check_small_sigma",
    "check_large_sigma",
    "check_kappa",
]


@dataclass
class ScalingFit:
    """A power-law comparison y ~ C * x^e between data and prediction.

    With ``exponent_fitted`` the exponent comes from a log-log least
    squares fit (needs at least 4 points); otherwise the predicted
    exponent is imposed and only the prefactor is estimated (trend mode,
    at least 2 points).  ``relative_deviations`` compare the data against
    the predicted law when a predicted prefactor exists, else against the
    fitted one.
    """

    abscissa: np.ndarray
    ordinate: np.ndarray
    exponent: float
    prefactor: float
    predicted_exponent: float
    predicted_prefactor: float | None
    r_squared: float
    relative_deviations: np.ndarray
    exponent_fitted: bool


def fit_power_law(x, y, predicted_exponent: float,
                  predicted_prefactor: float | None = None,
                  fit_exponent: bool = True) -> ScalingFit:
    """Least-squares power law in log-log coordinates."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidParameterError("scaling fit needs matching 1-d data")
    steps = np.diff(x)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise InvalidParameterError("abscissa must be strictly monotone")
    if np.any(x <= 0) or np.any(y <= 0):
        raise InvalidParameterError("power-law fit needs positive data")
    min_points = 4 if fit_exponent else 2
    if x.size < min_points:
        raise InvalidParameterError(
            f"need at least {min_points} points, got {x.size}")

    lx, ly = np.log(x), np.log(y)
    if fit_exponent:
        slope, intercept = np.polyfit(lx, ly, 1)
        exponent = float(slope)
    else:
        exponent = float(predicted_exponent)
        intercept = float(np.mean(ly - exponent * lx))
    prefactor = float(math.exp(intercept))

    model = intercept + exponent * lx
    ss_res = float(np.sum((ly - model) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0

    ref_prefactor = predicted_prefactor if predicted_prefactor is not None \
        else prefactor
    reference = ref_prefactor * x ** predicted_exponent
    deviations = y / reference - 1.0

    return ScalingFit(
        abscissa=x, ordinate=y, exponent=exponent, prefactor=prefactor,
        predicted_exponent=float(predicted_exponent),
        predicted_prefactor=predicted_prefactor,
        r_squared=r_squared, relative_deviations=deviations,
        exponent_fitted=fit_exponent)


@dataclass
class MomentData:
    """Kernel moments and transformed-kernel scaling limits."""

    m: float
    a0: float
    a2pp: float | None
    kappa0: float
    kappa2: float


def kernel_moment(kernel: Kernel) -> float:
    """Half the kernel's second moment.

    This is the constant in the large-cut-off eigenvalue tail
    lambda ~ 1 - pi^2 m / xi^2; it must be positive, which fixes the sign
    convention (1/2, not -1/2) for nonnegative kernels.
    """
    return 0.5 * kernel.second_moment


def _bump_cosine(sol: Solution, shape) -> float:
    """|cosine similarity| of the rescaled super-threshold bump vs a shape.

    The bump is f(u)/sigma sampled inside the cut-off interval, rescaled
    to [-1, 1]; ``shape`` maps the rescaled coordinate to the reference
    profile.  The absolute value makes the check independent of sign
    conventions.
    """
    grid = sol.grid
    c = grid.center
    m = int(round(sol.xi / grid.spacing))
    idx = np.arange(-m, m + 1)
    xbar = idx * grid.spacing / sol.xi
    w = sol.params(sol.u.values[c + idx]) / sol.sigma
    ref = shape(xbar)
    denom = float(np.linalg.norm(w) * np.linalg.norm(ref))
    return abs(float(np.dot(w, ref))) / denom


def _core_deviation(sol: Solution, reference) -> float:
    """Sup-norm distance of the profile from a reference over the grid."""
    return float(np.max(np.abs(sol.u.values - reference(sol.grid.points))))


@dataclass
class SmallSigmaReport:
    """Small-eigenvalue limit probe (zero lower slope)."""

    fit: ScalingFit
    sigmas: np.ndarray
    xi_values: np.ndarray
    predicted_constant: float
    measured_constants: np.ndarray
    limit_profile_distances: np.ndarray
    parabola_cosines: np.ndarray


def check_small_sigma(kernel: Kernel, params: BilinearNonlinearity,
                      sigma_list, tol: Tolerances | None = None) -> SmallSigmaReport:
    """Probe the cut-off scaling and limit profile as sigma -> 0.

    Requires zero lower slope, a kernel with finite negative curvature at
    the origin (tent and indicator are refused), and at least 4 sigmas in
    (0, eta/10].
    """
    if params.zeta != 0.0:
        raise InvalidParameterError("small-sigma probe requires zero lower slope")
    if kernel.a2pp is None or not kernel.a2pp < 0:
        raise UnsupportedKernelError(
            f"kernel {kernel.label!r} lacks a finite negative curvature at 0; "
            "the small-eigenvalue expansion does not apply")
    sigmas = np.asarray([float(s) for s in sigma_list])
    if sigmas.size < 4:
        raise InvalidParameterError("need at least 4 sigma values")
    if np.any(sigmas <= 0) or np.any(sigmas > params.eta / 10.0):
        raise InvalidParameterError(
            f"sigma values must lie in (0, {params.eta / 10.0}]")

    curvature = abs(kernel.a2pp)
    predicted = (3.0 / (2.0 * params.eta * curvature)) ** (1.0 / 3.0)

    xi_values, realized, distances, cosines = [], [], [], []
    for s in sigmas:
        sol = solve_sigma(kernel, params, float(s), tol=tol)
        xi_values.append(sol.xi)
        realized.append(sol.sigma)
        scale = params.theta / kernel.a0
        distances.append(_core_deviation(sol, lambda t: scale * kernel(t)))
        cosines.append(_bump_cosine(sol, lambda t: 1.0 - t ** 2))

    realized = np.asarray(realized)
    xi_values = np.asarray(xi_values)
    order = np.argsort(realized)
    fit = fit_power_law(realized[order], xi_values[order],
                        predicted_exponent=1.0 / 3.0,
                        predicted_prefactor=predicted)
    return SmallSigmaReport(
        fit=fit,
        sigmas=realized,
        xi_values=xi_values,
        predicted_constant=predicted,
        measured_constants=xi_values * realized ** (-1.0 / 3.0),
        limit_profile_distances=np.asarray(distances),
        parabola_cosines=np.asarray(cosines),
    )


@dataclass
class LargeSigmaReport:
    """Upper-endpoint blow-up probe."""

    fit_xi: ScalingFit
    fit_norm: ScalingFit
    gaps: np.ndarray
    xi_values: np.ndarray
    norms: np.ndarray
    m: float
    predicted_constant: float
    measured_constants: np.ndarray
    bump_cosines: np.ndarray
    tail_xi: float
    tail_m: float
    routes_agreement: float


def check_large_sigma(kernel: Kernel, params: BilinearNonlinearity,
                      sigma_list, tol: Tolerances | None = None,
                      tail_xi: float = 20.0) -> LargeSigmaReport:
    """Probe the blow-up scaling as sigma approaches the admissible top.

    For positive lower slope the moment constant m is computed from the
    transformed kernel at the endpoint ratio zeta/(zeta+eta).  Two
    independent routes to m are reported: the cut-off scaling of the
    nonlinear solutions and the eigenvalue tail (1 - lambda) xi^2 / pi^2
    of the linear solver at ``tail_xi``.
    """
    if tol is None:
        tol = Tolerances()
    sigmas = np.asarray([float(s) for s in sigma_list])
    top = params.zeta + params.eta
    if np.any(sigmas >= top) or np.any(sigmas <= params.zeta):
        raise InvalidParameterError("sigma values must lie inside the "
                                    "admissible interval")
    gaps = top - sigmas
    if gaps.size < 4:
        raise InvalidParameterError("need at least 4 sigma values")

    if params.zeta > 0:
        mu_top = params.zeta / top
        wide = make_grid(suggested_half_width(kernel, mu_top, tol.transform),
                         tol.spacing)
        working = transform_kernel(kernel, mu_top, wide, tol=tol.transform).kernel
    else:
        working = kernel
    m = kernel_moment(working)
    predicted = math.pi * math.sqrt(m * params.eta)

    xi_values, norms, cosines = [], [], []
    for s in sigmas:
        sol = solve_sigma(kernel, params, float(s), tol=tol)
        xi_values.append(sol.xi)
        norms.append(sol.u.norm2())
        cosines.append(_bump_cosine(sol, lambda t: 1.0 + np.cos(math.pi * t)))
    xi_values = np.asarray(xi_values)
    norms = np.asarray(norms)

    order = np.argsort(gaps)
    fit_xi = fit_power_law(gaps[order], xi_values[order],
                           predicted_exponent=-0.5,
                           predicted_prefactor=predicted)
    fit_norm = fit_power_law(gaps[order], norms[order],
                             predicted_exponent=-0.75)

    # independent route to m: linear eigenvalue tail at a large cut-off
    tail_grid = make_grid(tail_xi + working.decay_half_width + 1.0,
                          max(tol.spacing, 2e-3))
    pair = power_method(working, tail_xi, grid=tail_grid, tol=tol.power,
                        max_iter=tol.max_iter)
    tail_m = (1.0 - pair.lam) * pair.xi ** 2 / math.pi ** 2
    smallest = int(np.argmin(gaps))
    m_scaling = (math.sqrt(gaps[smallest]) * xi_values[smallest]
                 / (math.pi * math.sqrt(params.eta))) ** 2
    agreement = abs(m_scaling / tail_m - 1.0)

    return LargeSigmaReport(
        fit_xi=fit_xi, fit_norm=fit_norm, gaps=gaps, xi_values=xi_values,
        norms=norms, m=m, predicted_constant=predicted,
        measured_constants=np.sqrt(gaps) * xi_values,
        bump_cosines=np.asarray(cosines),
        tail_xi=pair.xi, tail_m=tail_m, routes_agreement=agreement)


@dataclass
class KappaReport:
    """Transformed-kernel scaling probe near the lower endpoint."""

    moments: MomentData
    gaps: np.ndarray
    kappa0_sequence: np.ndarray
    kappa2_sequence: np.ndarray
    kappa0: float
    kappa2: float
    xi_values: np.ndarray
    xi_limit_predicted: float
    core_deviations: np.ndarray
    fit: ScalingFit


def _richardson_sqrt(gaps: np.ndarray, values: np.ndarray) -> float:
    """Extrapolate kappa(gap) = kappa + c*sqrt(gap) from the two smallest gaps."""
    order = np.argsort(gaps)
    g1, g2 = gaps[order[1]], gaps[order[0]]  # g2 < g1
    y1, y2 = values[order[1]], values[order[0]]
    s1, s2 = math.sqrt(g1), math.sqrt(g2)
    return float((y2 * s1 - y1 * s2) / (s1 - s2))


def check_kappa(kernel: Kernel, params: BilinearNonlinearity, sigma_list,
                tol: Tolerances | None = None) -> KappaReport:
    """Probe the transformed-kernel amplitude/curvature scaling as
    sigma approaches the lower slope from above.

    The raw ratios a_mix(0)/sqrt(gap) and |a_mix''(0)|/gap carry
    O(sqrt(gap)) corrections, so the reported kappa limits are
    sqrt(gap)-Richardson extrapolations of the two smallest gaps; the raw
    sequences support the monotone-trend checks.  The second derivative
    uses a 5-point even stencil at spacing 4h to suppress roundoff from
    the stacked convolutions.
    """
    if tol is None:
        tol = Tolerances()
    if params.zeta <= 0:
        raise InvalidParameterError("kappa probe requires a positive lower slope")
    sigmas = np.asarray([float(s) for s in sigma_list])
    if np.any(sigmas <= params.zeta):
        raise InvalidParameterError("sigma values must exceed the lower slope")
    gaps = sigmas - params.zeta

    k0_seq, k2_seq, xi_values, deviations = [], [], [], []
    for s in sigmas:
        mu = params.zeta / s
        wide = make_grid(suggested_half_width(kernel, mu, tol.transform),
                         tol.spacing)
        mixed = transform_kernel(kernel, mu, wide, tol=tol.transform)
        vals = mixed.samples.values
        c = wide.center
        h = wide.spacing
        s4 = 4
        f0, f1, f2 = vals[c], vals[c + s4], vals[c + 2 * s4]
        second = (-30.0 * f0 + 32.0 * f1 - 2.0 * f2) / (12.0 * (s4 * h) ** 2)
        gap = s - params.zeta
        k0_seq.append(vals[c] / math.sqrt(gap))
        k2_seq.append(abs(second) / gap)

        sol = solve_sigma(kernel, params, float(s), tol=tol)
        xi_values.append(sol.xi)
        deviations.append(float(np.max(sol.u.values)) - params.theta)

    k0_seq = np.asarray(k0_seq)
    k2_seq = np.asarray(k2_seq)
    xi_values = np.asarray(xi_values)
    kappa0 = _richardson_sqrt(gaps, k0_seq)
    kappa2 = _richardson_sqrt(gaps, k2_seq)
    xi_limit = (3.0 / (2.0 * params.eta * kappa2)) ** (1.0 / 3.0)

    order = np.argsort(gaps)
    fit = fit_power_law(gaps[order], xi_values[order],
                        predicted_exponent=0.0,
                        predicted_prefactor=xi_limit,
                        fit_exponent=False)
    moments = MomentData(m=kernel_moment(kernel), a0=kernel.a0,
                         a2pp=kernel.a2pp, kappa0=kappa0, kappa2=kappa2)
    return KappaReport(
        moments=moments, gaps=gaps,
        kappa0_sequence=k0_seq, kappa2_sequence=k2_seq,
        kappa0=kappa0, kappa2=kappa2,
        xi_values=xi_values, xi_limit_predicted=xi_limit,
        core_deviations=np.asarray(deviations), fit=fit)
