"""Neumann-series transformed kernels: reduce positive lower slope to zero.

For a bilinear law with lower slope zeta > 0 and an eigenvalue sigma, the
problem is equivalent to one with lower slope zero once the kernel a is
replaced by the geometric mixture of its convolution powers

    a_mu = (1 - mu) * sum_{k>=0} mu^k a^{*(k+1)},        mu = zeta / sigma,

and sigma by sigma - zeta.  The mixture keeps unit mass, stays even,
nonnegative and unimodal, and is strictly unimodal for mu > 0 even when a
has plateaus or compact support, which is exactly what repairs the
degenerate cut-off regimes.

The series is truncated at depth K chosen from the geometric L1 tail bound
mu^(K+1)/(1-mu) < tol (every convolution power has unit mass), computed by
iterated discrete convolution, checked for mass lost over the grid edge,
and renormalized to unit mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AdmissibilityError,
    ConvergenceError,
    GridTooSmallError,
    InvalidParameterError,
)
from .grid import Grid, GridFn, convolve, make_grid, quadrature
from .kernels import Kernel, sample

__all__ = [
    "MU_CAP",
    "ConvolutionPowers",
    "TransformedKernel",
    "ResolventCheck",
    "transform_parameters",
    "truncation_depth",
    "suggested_half_width",
    "transform_kernel",
    "resolvent_check",
]

# The series depth blows up as mu -> 1 (the singular small-eigenvalue
# limit); beyond this cap we refuse rather than grind.
MU_CAP = 0.999


@dataclass(eq=False)
class TransformedKernel:
    """Truncated, renormalized Neumann-series kernel on a grid.

    Attributes
    ----------
    base_label : str
        Label of the kernel the series was built from.
    mu : float
        Mixing ratio in [0, 1).
    samples : GridFn
        The transformed kernel on the working grid, unit mass after
        renormalization.
    truncation_depth : int
        Series depth K (number of extra convolution powers).
    truncation_bound : float
        Geometric L1 tail estimate mu^(K+1)/(1-mu).
    renormalization : float
        Factor applied to restore unit mass.
    kernel : Kernel
        The samples wrapped as a kernel usable everywhere a built-in is.
    """

    base_label: str
    mu: float
    samples: GridFn
    truncation_depth: int
    truncation_bound: float
    renormalization: float
    kernel: Kernel


def transform_parameters(sigma: float, zeta: float) -> tuple[float, float]:
    """Shift the eigenvalue and compute the mixing ratio.

    Returns (sigma - zeta, zeta/sigma).  Requires sigma > zeta >= 0; at or
    below zeta no nonnegative eigenfunction exists, so the request is
    rejected as inadmissible.
    """
    if zeta < 0:
        raise InvalidParameterError("lower slope must be nonnegative")
    if not sigma > zeta:
        raise AdmissibilityError(
            f"sigma = {sigma} is not above the lower slope {zeta}; "
            "no nonnegative eigenfunction exists there",
            interval=(zeta, math.inf),
        )
    return sigma - zeta, zeta / sigma


def truncation_depth(mu: float, tol: float) -> int:
    """Smallest K with geometric L1 tail mu^(K+1)/(1-mu) < tol."""
    if mu <= 0.0:
        return 0
    k = math.ceil(math.log(tol * (1.0 - mu)) / math.log(mu))
    return max(int(k), 1)


def suggested_half_width(kernel: Kernel, mu: float, tol: float,
                         base_half_width: float | None = None) -> float:
    """Half-width heuristic for the transformed kernel's grid.

    The k-th convolution power has variance k times the kernel's, so the
    truncated series needs roughly 3*sqrt(K * second_moment) of extra room;
    the mass-leak check in :func:`transform_kernel` validates the choice.
    """
    if base_half_width is None:
        base_half_width = max(10.0, 2.0 * kernel.decay_half_width)
    k = truncation_depth(mu, tol)
    return base_half_width + 3.0 * math.sqrt(max(k, 1) * kernel.second_moment)


class ConvolutionPowers:
    """Lazy cache of a kernel's iterated discrete self-convolutions.

    The convolution powers are independent of the mixing ratio, so one
    cache serves every mixture on the same grid; the solver's fixed-point
    loop (which rebuilds the mixture a dozen times) relies on this.
    """

    def __init__(self, kernel: Kernel, grid: Grid):
        self.kernel = kernel
        self.grid = grid
        self.base = sample(kernel, grid)
        self.base_mass = quadrature(self.base)
        self._values: list[np.ndarray] = [self.base.values]

    def upto(self, depth: int) -> list[np.ndarray]:
        """Sample arrays of the (k+1)-fold convolutions for k = 0..depth."""
        while len(self._values) <= depth:
            prev = GridFn(self.grid, self._values[-1])
            self._values.append(convolve(self.base, prev).values)
        return self._values[: depth + 1]

    def mixture(self, mu: float, tol: float) -> TransformedKernel:
        """Geometric mixture of the powers; see :func:`transform_kernel`."""
        if not 0.0 <= mu < 1.0:
            raise InvalidParameterError("mixing ratio must lie in [0, 1)")
        if mu > MU_CAP:
            raise InvalidParameterError(
                f"mixing ratio {mu} exceeds the cap {MU_CAP}; the series "
                "depth diverges in the singular limit")
        if mu == 0.0:
            return TransformedKernel(
                base_label=self.kernel.label, mu=0.0, samples=self.base,
                truncation_depth=0, truncation_bound=0.0, renormalization=1.0,
                kernel=_wrap_samples(self.kernel, 0.0, self.base, 0))

        depth = truncation_depth(mu, tol)
        powers = self.upto(depth)
        weights = (1.0 - mu) * mu ** np.arange(depth + 1)
        acc = weights @ np.asarray(powers)
        # the exact mixture is even and nonnegative; remove the FFT
        # roundoff asymmetry and the sign noise in the far tail
        acc = 0.5 * (acc + acc[::-1])
        np.maximum(acc, 0.0, out=acc)
        # expected discrete mass of the truncated series, including the
        # base kernel's own quadrature mass; the shortfall is what leaked
        # over the grid edge during the iterated convolutions
        expected = float(np.sum(weights * self.base_mass ** np.arange(1, depth + 2)))

        actual = float(self.grid.spacing * np.sum(acc))
        leak = expected - actual
        if leak > tol:
            raise GridTooSmallError(
                f"transformed kernel lost {leak:.3e} of its mass over the "
                f"grid edge (tolerance {tol}); enlarge L")
        if abs(actual / expected - 1.0) > 10.0 * tol:
            raise ConvergenceError(
                "transformed-kernel mass accounting is inconsistent: "
                f"actual {actual!r} vs expected {expected!r}")

        renorm = 1.0 / actual
        samples = GridFn(self.grid, acc * renorm)
        bound = mu ** (depth + 1) / (1.0 - mu)
        return TransformedKernel(
            base_label=self.kernel.label, mu=mu, samples=samples,
            truncation_depth=depth, truncation_bound=bound,
            renormalization=renorm,
            kernel=_wrap_samples(self.kernel, mu, samples, depth))


def transform_kernel(a: Kernel, mu: float, grid: Grid,
                     tol: float = 1e-8) -> TransformedKernel:
    """Build the geometric convolution-power mixture of a kernel.

    Parameters
    ----------
    a : Kernel
        Base kernel (unit mass, even, unimodal).
    mu : float
        Mixing ratio in [0, MU_CAP]; 0 returns the base samples untouched.
    grid : Grid
        Working grid; must be wide enough that the widened mixture keeps
        its mass (checked, see below).
    tol : float
        Geometric L1 tail bound for the truncation depth.

    Raises
    ------
    GridTooSmallError
        If more than ``tol`` of the expected discrete mass is lost over
        the grid edge during the iterated convolutions.
    InvalidParameterError
        For mu outside [0, MU_CAP] (the series depth diverges as mu -> 1).
    """
    return ConvolutionPowers(a, grid).mixture(mu, tol)


def _wrap_samples(base: Kernel, mu: float, samples: GridFn,
                  depth: int) -> Kernel:
    """Wrap transformed samples as a kernel with estimated metadata."""
    grid = samples.grid
    h = grid.spacing
    c = grid.center
    right = samples.values[c:]
    xs = grid.points[c:]

    def evaluator(t, _xs=xs, _vs=right):
        return np.interp(np.abs(t), _xs, _vs, right=0.0)

    a0 = float(right[0])
    # curvature by a wide 5-point stencil to suppress stacked-convolution
    # roundoff; spacing 4h
    s = 4
    if right.size > 2 * s:
        f0, f1, f2 = a0, float(right[s]), float(right[2 * s])
        a2pp = (-30.0 * f0 + 32.0 * f1 - 2.0 * f2) / (12.0 * (s * h) ** 2)
    else:
        a2pp = None
    second = float(quadrature(GridFn(grid, np.square(grid.points) * samples.values)))
    # decay width from variance additivity of the deepest retained power,
    # not from the samples (whose far tail sits at the FFT noise floor)
    decay = base.decay_half_width + 3.0 * math.sqrt(
        (depth + 1) * base.second_moment)
    return Kernel(
        label=f"{base.label}-mix{mu:g}",
        evaluator=evaluator,
        a0=a0,
        a2pp=a2pp,
        second_moment=second,
        plateau_half_width=0.0,
        # the exact mixture is strictly decreasing on (0, inf) for mu > 0;
        # the wrapped flag describes that analytic property
        strictly_unimodal=mu > 0.0 or base.strictly_unimodal,
        support_half_width=grid.half_width,
        decay_half_width=min(decay, grid.half_width) if mu > 0.0
        else base.decay_half_width,
        validation_half_width=grid.half_width,
        validation_spacing=h,
    )


@dataclass(eq=False)
class ResolventCheck:
    """Two independent routes to (I - mu a*)^(-1) (a * g)."""

    w_direct: GridFn
    w_series: GridFn
    rel_diff: float
    picard_iterations: int
    truncation_depth: int


def resolvent_check(a: Kernel, mu: float, g: GridFn, *,
                    picard_tol: float = 1e-10,
                    transform_tol: float = 1e-8,
                    max_iter: int = 100000) -> ResolventCheck:
    """Solve w - mu a*w = a*g by fixed-point iteration and by the series.

    Both routes run on an internally widened grid (same spacing) so that
    neither loses mass over the edge, then restrict to the input grid.
    For mu < 1 the fixed-point map is a contraction with rate mu, so the
    iteration cannot stall within any reasonable budget.
    """
    if not 0.0 <= mu < 1.0:
        raise InvalidParameterError("mixing ratio must lie in [0, 1)")
    wide_half = suggested_half_width(
        a, mu, transform_tol,
        base_half_width=g.grid.half_width + a.decay_half_width)
    wide = make_grid(wide_half, g.grid.spacing)
    pad = wide.center - g.grid.center
    g_wide = np.zeros(wide.n)
    g_wide[pad : pad + g.grid.n] = g.values
    g_wide = GridFn(wide, g_wide)

    a_wide = sample(a, wide)
    ag = convolve(a_wide, g_wide)

    transformed = transform_kernel(a, mu, wide, tol=transform_tol)
    series_wide = convolve(transformed.samples, g_wide).values / (1.0 - mu)

    w = ag.values.copy()
    iterations = 0
    if mu > 0.0:
        for iterations in range(1, max_iter + 1):
            w_next = mu * convolve(a_wide, GridFn(wide, w)).values + ag.values
            step = np.sqrt(wide.spacing * np.sum((w_next - w) ** 2))
            w = w_next
            if step <= picard_tol * max(1.0, float(np.max(np.abs(w)))):
                break
        else:
            raise ConvergenceError(
                f"fixed-point resolvent did not converge in {max_iter} steps",
                iterations=max_iter)

    direct = w[pad : pad + g.grid.n]
    series = series_wide[pad : pad + g.grid.n]
    denom = math.sqrt(g.grid.spacing * float(np.sum(direct ** 2)))
    diff = math.sqrt(g.grid.spacing * float(np.sum((direct - series) ** 2)))
    rel = diff / max(denom, 1e-300)
    return ResolventCheck(
        w_direct=GridFn(g.grid, direct),
        w_series=GridFn(g.grid, series),
        rel_diff=rel,
        picard_iterations=iterations,
        truncation_depth=transformed.truncation_depth,
    )
