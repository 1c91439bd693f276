"""Built-in and user-supplied convolution kernels plus shape validation.

A kernel is an even, nonnegative, unimodal, unit-mass function together
with the analytic metadata the solvers and asymptotic probes need: the
peak value a(0), the curvature a''(0) when it exists, the second moment,
the width of any flat plateau at the origin, and whether the kernel is
strictly decreasing away from the origin.

Three classical kernels are built in:

* :func:`gaussian` -- exp(-x^2)/sqrt(pi), smooth and strictly unimodal;
* :func:`tent` -- max(0, 1-|x|), compactly supported, kinked at 0;
* :func:`indicator` -- the unit-mass box of half-width 1/2, whose plateau
  produces degenerate cut-off regimes.

User kernels come in as sampled tables (two-column CSV ``x,a``) with
linear interpolation between samples and zero beyond the last one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidParameterError, ResolutionError
from .grid import Grid, GridFn, make_grid, quadrature

__all__ = [
    "Kernel",
    "ValidationReport",
    "gaussian",
    "tent",
    "indicator",
    "kernel_from_samples",
    "load_kernel_csv",
    "sample",
    "validate_kernel",
    "reference_grid",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(eq=False)
class Kernel:
    """An even, nonnegative, unimodal, normalized convolution kernel.

    Attributes
    ----------
    label : str
        Short name used in reports and CSV headers.
    evaluator : callable
        Vectorized map x -> a(x).
    a0 : float
        Peak value a(0).
    a2pp : float or None
        Curvature a''(0); ``None`` when undefined (tent map).
    second_moment : float
        int y^2 a(y) dy.
    plateau_half_width : float
        Largest p >= 0 with a constant on [0, p].
    strictly_unimodal : bool
        True when a'(x) < 0 for every x > 0 (which rules out compact
        support and plateaus).
    support_half_width : float or None
        Half-width of the support; ``None`` for unbounded kernels.
    decay_half_width : float
        Distance beyond which a is numerically negligible (< ~1e-17);
        equals the support half-width for compact kernels.  Used when
        sizing grids so that truncating the kernel at the grid edge is
        harmless.
    validation_half_width, validation_spacing : float
        The kernel's reference validation grid.
    """

    label: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    a0: float
    a2pp: float | None
    second_moment: float
    plateau_half_width: float
    strictly_unimodal: bool
    support_half_width: float | None
    decay_half_width: float
    validation_half_width: float
    validation_spacing: float

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))


@dataclass
class ValidationReport:
    """Measured shape properties of a kernel on a validation grid."""

    even: bool
    nonnegative: bool
    unimodal: bool
    normalized: bool
    strictly_unimodal: bool
    normalization_deviation: float
    evenness_deviation: float
    unimodality_violation: float
    negativity_violation: float

    @property
    def passed(self) -> bool:
        """All core shape requirements hold (strictness reported aside)."""
        return self.even and self.nonnegative and self.unimodal and self.normalized


def gaussian() -> Kernel:
    """The normalized Gaussian a(x) = exp(-x^2)/sqrt(pi)."""
    return Kernel(
        label="gaussian",
        evaluator=lambda x: np.exp(-np.square(x)) / _SQRT_PI,
        a0=1.0 / _SQRT_PI,
        a2pp=-2.0 / _SQRT_PI,
        second_moment=0.5,
        plateau_half_width=0.0,
        strictly_unimodal=True,
        support_half_width=None,
        # a(6.5) ~ 2.5e-19, far below every tolerance in the package
        decay_half_width=6.5,
        validation_half_width=10.0,
        validation_spacing=1e-3,
    )


def tent() -> Kernel:
    """The unit-mass tent a(x) = max(0, 1-|x|).

    The curvature at the origin is undefined (the one-sided second
    derivative diverges), so ``a2pp`` is ``None`` and probes that need it
    refuse this kernel.
    """
    return Kernel(
        label="tent",
        evaluator=lambda x: np.maximum(0.0, 1.0 - np.abs(x)),
        a0=1.0,
        a2pp=None,
        second_moment=1.0 / 6.0,
        plateau_half_width=0.0,
        strictly_unimodal=False,
        support_half_width=1.0,
        decay_half_width=1.0,
        validation_half_width=2.0,
        validation_spacing=1e-3,
    )


def indicator() -> Kernel:
    """The unit-mass box a(x) = 1 for |x| <= 1/2, else 0.

    The validation spacing 1/1001 places the jump at |x| = 1/2 between
    nodes, which makes the uniform Riemann mass exactly 1.  With a node
    exactly on the jump the discrete mass would be 1 + h.
    """
    return Kernel(
        label="indicator",
        evaluator=lambda x: np.where(np.abs(x) <= 0.5, 1.0, 0.0),
        a0=1.0,
        a2pp=0.0,
        second_moment=1.0 / 12.0,
        plateau_half_width=0.5,
        strictly_unimodal=False,
        support_half_width=0.5,
        decay_half_width=0.5,
        validation_half_width=2.0,
        validation_spacing=1.0 / 1001.0,
    )


def kernel_from_samples(x: np.ndarray, a: np.ndarray, label: str = "sampled") -> Kernel:
    """Build a kernel from a sampled table with linear interpolation.

    The table must have strictly increasing abscissae including x = 0.
    Values beyond the last sample are zero.  Negative-x samples, when
    present, must mirror the positive side.  Metadata (curvature, second
    moment, plateau) is estimated from the samples; compactly supported
    tables are never flagged strictly unimodal because the strict-decay
    condition fails beyond the support edge.
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    if x.ndim != 1 or x.shape != a.shape or x.size < 2:
        raise InvalidParameterError("sampled kernel needs two equal 1-d columns")
    if not np.all(np.diff(x) > 0):
        raise InvalidParameterError("sample abscissae must be strictly increasing")
    if not np.any(np.isclose(x, 0.0, atol=1e-12)):
        raise InvalidParameterError("sample table must include x = 0")
    if np.any(a < 0):
        raise InvalidParameterError("sampled kernel values must be nonnegative")

    pos = x >= -1e-12
    xs = np.abs(x[pos])
    vs = a[pos].copy()
    xs[0] = max(xs[0], 0.0)
    # mirror consistency for any provided negative-x samples
    neg = ~pos
    if np.any(neg):
        mirrored = np.interp(np.abs(x[neg]), xs, vs, right=0.0)
        if np.max(np.abs(a[neg] - mirrored)) > 1e-9 * max(vs[0], 1e-300):
            raise InvalidParameterError("sampled kernel is not even")

    a0 = float(vs[0])
    support = float(xs[-1])

    def evaluator(t, _xs=xs, _vs=vs):
        return np.interp(np.abs(t), _xs, _vs, right=0.0)

    # plateau: longest initial run of samples equal to the peak
    plateau = 0.0
    for xi, vi in zip(xs[1:], vs[1:]):
        if abs(vi - a0) <= 1e-12 * max(a0, 1e-300):
            plateau = float(xi)
        else:
            break

    # curvature estimate from the even extension through the first
    # positive sample; zero on a plateau
    if plateau > 0:
        a2pp: float | None = 0.0
    else:
        a2pp = float(2.0 * (vs[1] - a0) / xs[1] ** 2)

    spacing = min(float(np.min(np.diff(xs))), support / 200.0)
    half_width = 2.0 * support
    grid = make_grid(half_width, spacing)
    second = float(quadrature(GridFn(grid, np.square(grid.points) * evaluator(grid.points))))

    return Kernel(
        label=label,
        evaluator=evaluator,
        a0=a0,
        a2pp=a2pp,
        second_moment=second,
        plateau_half_width=plateau,
        strictly_unimodal=False,
        support_half_width=support,
        decay_half_width=support,
        validation_half_width=half_width,
        validation_spacing=spacing,
    )


def load_kernel_csv(path) -> Kernel:
    """Read a two-column ``x,a`` CSV sample table (``#`` comments allowed)."""
    xs, vs = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if parts[0] in ("x", '"x"'):
                continue
            if len(parts) != 2:
                raise InvalidParameterError(f"bad kernel sample line: {line!r}")
            xs.append(float(parts[0]))
            vs.append(float(parts[1]))
    import os

    label = os.path.splitext(os.path.basename(str(path)))[0]
    return kernel_from_samples(np.array(xs), np.array(vs), label=label)


def sample(kernel: Kernel, grid: Grid) -> GridFn:
    """Evaluate a kernel at all grid nodes."""
    return GridFn(grid, kernel(grid.points))


def reference_grid(kernel: Kernel) -> Grid:
    """The kernel's own validation grid."""
    return make_grid(kernel.validation_half_width, kernel.validation_spacing)


def validate_kernel(kernel: Kernel, grid: Grid | None = None) -> ValidationReport:
    """Measure the shape requirements of a kernel on a grid.

    Checks evenness, nonnegativity, unimodality, unit mass (to 1e-6), and
    strict unimodality on the probe set.  The grid must resolve the
    kernel: h <= support/100 for compact support, h <= 0.01 otherwise.
    """
    if grid is None:
        grid = reference_grid(kernel)
    h = grid.spacing
    if kernel.support_half_width is not None:
        if h > kernel.support_half_width / 100.0:
            raise ResolutionError(
                f"spacing {h} too coarse for support half-width "
                f"{kernel.support_half_width}"
            )
    elif h > 0.01:
        raise ResolutionError(f"spacing {h} too coarse for an unbounded kernel")

    values = kernel(grid.points)
    scale = max(float(np.max(np.abs(values))), 1e-300)

    even_dev = float(np.max(np.abs(values - values[::-1])))
    neg_dev = float(max(0.0, -np.min(values)))

    right = values[grid.center :]
    increases = np.diff(right)
    unimodal_viol = float(max(0.0, np.max(increases))) if increases.size else 0.0

    mass_dev = abs(quadrature(GridFn(grid, values)) - 1.0)

    # strict decrease must hold on every positive-side cell, including the
    # flat zeros beyond a compact support (which is why tent/indicator are
    # not strictly unimodal)
    strictly = bool(np.all(increases < 0.0)) if increases.size else False

    return ValidationReport(
        even=even_dev <= 1e-12 * scale,
        nonnegative=neg_dev <= 1e-15 * scale,
        unimodal=unimodal_viol <= 1e-12 * scale,
        normalized=mass_dev <= 1e-6,
        strictly_unimodal=strictly,
        normalization_deviation=float(mass_dev),
        evenness_deviation=even_dev,
        unimodality_violation=unimodal_viol,
        negativity_violation=neg_dev,
    )
