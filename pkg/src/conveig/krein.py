"""Leading eigenpair of the cut-off operator and the eigencurve xi -> lambda.

The largest eigenvalue of the cut-off operator on odd profiles is simple,
its eigenfunction lies in the refined negative cone, and the map from the
cut-off to the eigenvalue is continuous and strictly increasing from 0
toward 1 (for strictly unimodal kernels).  This module computes the pair
by normalized power iteration, sweeps the curve, and inverts it by
bracketing bisection.

Power iteration starts from the sign profile -sgn(x) restricted to the
cut-off interval, which lies in the negative cone and overlaps the leading
eigenfunction, so no randomness is needed and results are deterministic.
Because the leading eigenvalue is also the spectral radius, convergence is
geometric; the iteration budget is a pragmatic guard, not a derived bound.

Eigenvalues of the *discrete* problem live on a lattice indexed by the
snapped cut-off node, so the inversion returns the node whose eigenvalue
is nearest the target when the requested tolerance is finer than the
lattice spacing (which is O(h)); the achieved error is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cutoff import HalfLineOperator, OddProfile, snap_cutoff
from .errors import (
    ConvergenceError,
    GridTooSmallError,
    InvalidParameterError,
    OutOfRangeError,
)
from .grid import Grid, make_grid
from .kernels import Kernel

__all__ = [
    "EigenPair",
    "EigenCurve",
    "EigenCurvePoint",
    "InversionResult",
    "default_grid",
    "leading_pair",
    "power_method",
    "eigencurve",
    "invert_eigencurve",
    "search_node",
]

LAMBDA_FLOOR = 1e-13  # below this the operator is treated as degenerate


@dataclass
class EigenPair:
    """Converged leading eigenpair at a snapped cut-off.

    ``v`` has unit grid L2 norm and is nonpositive on the positive
    half-line; ``degenerate`` marks the exactly-zero regime (plateau
    kernels with small cut-off), where ``v`` is undefined.
    """

    xi: float
    lam: float
    v: OddProfile | None
    iterations: int
    residual: float
    degenerate: bool = False


@dataclass
class EigenCurvePoint:
    xi_requested: float
    xi: float
    lam: float
    iterations: int
    residual: float
    error: str | None = None


@dataclass
class EigenCurve:
    """Sampled eigencurve; per-point failures are recorded, not fatal."""

    points: list[EigenCurvePoint]
    kernel_label: str
    spacing: float
    half_width: float


@dataclass
class InversionResult:
    """Outcome of inverting the eigencurve at a target eigenvalue."""

    xi: float
    index: int
    lam: float
    target: float
    achieved: float
    met_tolerance: bool
    pair: EigenPair
    evaluations: int


def default_grid(kernel: Kernel, xi_max: float, spacing: float = 1e-3,
                 half_width: float | None = None) -> Grid:
    """Grid sizing policy when the caller does not supply a grid.

    Unbounded kernels get enough headroom past the cut-off for their decay;
    compactly supported kernels get the generous max(10, 5 + 3*xi_max).
    """
    if half_width is None:
        if kernel.support_half_width is None:
            half_width = max(10.0, xi_max + kernel.decay_half_width + 1.0)
        else:
            half_width = max(10.0, 5.0 + 3.0 * xi_max)
    return make_grid(half_width, spacing)


def leading_pair(op: HalfLineOperator, tol: float,
                 max_iter: int) -> tuple[float, np.ndarray | None, int, float]:
    """Raw power iteration on an assembled half-line operator.

    Returns (lam, vector, iterations, residual) with the vector normalized
    in the full-line grid norm and lying in the negative cone; the vector
    is ``None`` in the degenerate lam = 0 regime.  Shared by the public
    eigensolver and the nonlinear construction (which runs it on the
    staggered lattice).
    """
    h = op.h

    def norm(u: np.ndarray) -> float:
        return float(np.sqrt(2.0 * h * np.dot(u, u)))

    v = -np.ones(op.m)
    v /= norm(v)
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        w = op.apply(v)
        lam = norm(w)
        if lam < LAMBDA_FLOOR:
            return 0.0, None, iteration, 0.0
        residual = norm(w - lam * v)
        v = w / lam
        if residual <= tol:
            # certify the returned vector, not its predecessor
            w = op.apply(v)
            lam = norm(w)
            residual = norm(w - lam * v)
            if np.sum(v) > 0.0:
                v = -v
            return lam, v, iteration, residual
    raise ConvergenceError(
        f"power iteration did not reach {tol} within {max_iter} iterations "
        f"(last residual {residual:.3e})",
        residual=residual,
        iterations=max_iter,
    )


def power_method(kernel: Kernel, xi: float, *, grid: Grid | None = None,
                 tol: float = 1e-10, max_iter: int = 100000,
                 method: str = "auto") -> EigenPair:
    """Leading eigenpair of the cut-off operator by power iteration.

    Iterates v <- T v / ||T v|| from the sign profile until the residual
    ||T v - lam v||_2 with lam = ||T v||_2 is at most ``tol``; the residual
    recorded on the returned pair is recomputed for the returned vector.

    Raises
    ------
    ConvergenceError
        If the budget is exceeded; carries the last residual.

    Notes
    -----
    When every candidate eigenvalue is below the degeneracy floor the pair
    (0, undefined) is returned with ``degenerate=True`` rather than looping
    on roundoff noise.
    """
    if tol <= 0:
        raise InvalidParameterError("tolerance must be positive")
    if grid is None:
        grid = default_grid(kernel, xi)
    cut = snap_cutoff(grid, xi)
    op = HalfLineOperator(kernel, grid, cut, method=method)
    lam, vec, iterations, residual = leading_pair(op, tol, max_iter)
    if vec is None:
        return EigenPair(xi=cut.xi, lam=0.0, v=None, iterations=iterations,
                         residual=0.0, degenerate=True)
    half = np.zeros(grid.center)
    half[: cut.index] = vec
    return EigenPair(xi=cut.xi, lam=lam, v=OddProfile(grid, half),
                     iterations=iterations, residual=residual)


def eigencurve(kernel: Kernel, xi_list, *, grid: Grid | None = None,
               tol: float = 1e-10, max_iter: int = 100000) -> EigenCurve:
    """Evaluate the eigencurve at a sorted list of cut-offs.

    Entries are independent; a failing entry is recorded with its error
    message and the sweep continues.
    """
    xi_list = [float(x) for x in xi_list]
    if any(x <= 0 for x in xi_list):
        raise InvalidParameterError("cut-offs must be positive")
    if any(b <= a for a, b in zip(xi_list, xi_list[1:])):
        raise InvalidParameterError("cut-offs must be strictly increasing")
    if grid is None:
        grid = default_grid(kernel, max(xi_list, default=1.0))
    points: list[EigenCurvePoint] = []
    for xi in xi_list:
        try:
            pair = power_method(kernel, xi, grid=grid, tol=tol, max_iter=max_iter)
            points.append(EigenCurvePoint(
                xi_requested=xi, xi=pair.xi, lam=pair.lam,
                iterations=pair.iterations, residual=pair.residual))
        except (ConvergenceError, InvalidParameterError, OutOfRangeError) as exc:
            points.append(EigenCurvePoint(
                xi_requested=xi, xi=float("nan"), lam=float("nan"),
                iterations=0, residual=float("nan"), error=str(exc)))
    return EigenCurve(points=points, kernel_label=kernel.label,
                      spacing=grid.spacing, half_width=grid.half_width)


def search_node(lam_at, target: float, *, max_index: int, unit_index: int,
                tol_lambda: float, half_width: float) -> int:
    """Bracket and bisect a nondecreasing node-indexed eigencurve.

    ``lam_at(index)`` evaluates (and should cache) the eigenvalue at a
    node.  The bracket grows geometrically from [1 node, ``unit_index``]
    until the target is straddled, then bisects; returns the node meeting
    ``tol_lambda`` or, failing that, the adjacent node nearest the target.
    """
    lo = 1
    hi = max(lo, min(unit_index, max_index))
    if lam_at(lo) >= target:
        # target below the smallest representable cut-off's eigenvalue
        return lo
    while lam_at(hi) < target:
        lo = hi
        hi *= 2
        if hi > max_index:
            raise GridTooSmallError(
                f"bracket for eigenvalue {target} exceeds the grid "
                f"half-width {half_width}; enlarge L")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        lam_mid = lam_at(mid)
        if abs(lam_mid - target) <= tol_lambda:
            return mid
        if lam_mid < target:
            lo = mid
        else:
            hi = mid
    return min((lo, hi), key=lambda k: abs(lam_at(k) - target))


def invert_eigencurve(kernel: Kernel, lambda_target: float, *,
                      grid: Grid | None = None, tol_lambda: float = 1e-8,
                      power_tol: float = 1e-10, max_iter: int = 100000) -> InversionResult:
    """Find the cut-off whose eigenvalue matches a target in (0, 1).

    Grows a bracket geometrically from [h, 1] until the eigenvalue
    straddles the target, then bisects on grid nodes.  Stops early when
    the eigenvalue tolerance is met; otherwise returns the adjacent node
    whose eigenvalue is nearest the target (the discrete eigencurve is a
    lattice, so the tolerance may be unattainable; see ``achieved``).

    Raises
    ------
    OutOfRangeError
        For targets outside (0, 1).
    GridTooSmallError
        When the bracket would exceed the grid half-width; enlarge L.
    """
    if not (0.0 < lambda_target < 1.0):
        raise OutOfRangeError("eigenvalue target must lie strictly in (0, 1)")
    if grid is None:
        grid = default_grid(kernel, 8.0)
    h = grid.spacing
    cache: dict[int, EigenPair] = {}

    def at(index: int) -> EigenPair:
        if index not in cache:
            cache[index] = power_method(kernel, index * h, grid=grid,
                                        tol=power_tol, max_iter=max_iter)
        return cache[index]

    index = search_node(lambda k: at(k).lam, lambda_target,
                        max_index=grid.center,
                        unit_index=int(round(1.0 / h)),
                        tol_lambda=tol_lambda, half_width=grid.half_width)
    pair = at(index)
    achieved = abs(pair.lam - lambda_target)
    return InversionResult(
        xi=pair.xi, index=index, lam=pair.lam, target=lambda_target,
        achieved=achieved, met_tolerance=achieved <= tol_lambda,
        pair=pair, evaluations=len(cache))
