import math

import numpy as np
import pytest

import conveig as cv
from conveig.grid import GridFn, convolve, make_grid, quadrature
from conveig.kernels import sample
from conveig.solve import (
    BilinearNonlinearity,
    Tolerances,
    cosine_similarity,
    derivative_profile,
    eval_f,
    residual,
    solve_sigma,
    sweep,
)


def test_eval_f_values(fig_params):
    assert eval_f(fig_params, 0.0) == 0.0
    # continuity at the kink from both branches
    theta = fig_params.theta
    assert eval_f(fig_params, theta) == pytest.approx(fig_params.zeta * theta)
    below = eval_f(fig_params, theta - 1e-12)
    above = eval_f(fig_params, theta + 1e-12)
    assert abs(above - below) < 1e-10
    # zeta=0, theta=0.6, eta=2.5: f(1.0) = 2.5 * 0.4 = 1.0
    assert eval_f(fig_params, 1.0) == pytest.approx(1.0)


def test_eval_f_with_lower_slope(shifted_params):
    assert eval_f(shifted_params, 0.3) == pytest.approx(0.3)
    assert eval_f(shifted_params, 1.0) == pytest.approx(
        3.5 * 0.4 + 0.6)


def test_eval_f_rejects_negative(fig_params):
    with pytest.raises(cv.InvalidParameterError):
        eval_f(fig_params, -0.1)
    with pytest.raises(cv.InvalidParameterError):
        eval_f(fig_params, np.array([0.5, -0.2]))


def test_nonlinearity_validates():
    with pytest.raises(cv.InvalidParameterError):
        BilinearNonlinearity(zeta=-1.0, theta=0.6, eta=2.5)
    with pytest.raises(cv.InvalidParameterError):
        BilinearNonlinearity(zeta=0.0, theta=0.0, eta=2.5)
    with pytest.raises(cv.InvalidParameterError):
        BilinearNonlinearity(zeta=0.0, theta=0.6, eta=0.0)


def test_solve_reference_case(gauss, fig_params):
    sol = solve_sigma(gauss, fig_params, 1.0)
    assert sol.residual_rel <= 1e-6
    assert abs(sol.sigma - 1.0) < 5e-3
    c = sol.grid.center
    m = int(round(sol.xi / sol.grid.spacing))
    # the profile crosses the kink value exactly at the snapped cut-off
    assert sol.u.values[c + m] == pytest.approx(fig_params.theta, abs=1e-12)
    assert sol.u.values[c] == np.max(sol.u.values)


def test_solution_shape_invariants(gauss, fig_params):
    sol = solve_sigma(gauss, fig_params, 1.5)
    u = sol.u.values
    g = sol.grid
    tol = 1e-9 * np.max(u)
    np.testing.assert_array_equal(u, u[::-1])  # even by construction
    right = u[g.center:]
    assert np.all(np.diff(right) <= tol)  # unimodal
    m = int(round(sol.xi / g.spacing))
    assert np.all(right[: m + 1] >= fig_params.theta - tol)
    assert np.all(right[m:] <= fig_params.theta + tol)
    assert np.all(u >= 0.0)


def test_solution_eigenvalue_consistency(gauss, fig_params, shifted_params):
    for params, s in ((fig_params, 0.8), (shifted_params, 2.0)):
        sol = solve_sigma(gauss, params, s)
        lam_star = (sol.sigma - params.zeta) / params.eta
        assert abs(sol.lam - lam_star) < 1e-12


def test_solution_mass_identity(gauss, fig_params):
    # integrating both sides of the equation: sigma * int u = int f(u)
    sol = solve_sigma(gauss, fig_params, 1.0)
    lhs = sol.sigma * quadrature(sol.u)
    rhs = quadrature(GridFn(sol.grid, fig_params(sol.u.values)))
    assert abs(lhs - rhs) <= 1e-6 * abs(lhs)


def test_solve_inadmissible(gauss, fig_params):
    with pytest.raises(cv.AdmissibilityError) as err:
        solve_sigma(gauss, fig_params, fig_params.zeta + fig_params.eta)
    assert err.value.interval == fig_params.admissible_interval()
    with pytest.raises(cv.AdmissibilityError):
        solve_sigma(gauss, fig_params, 0.0)


def test_solve_with_lower_slope(gauss, shifted_params):
    sol = solve_sigma(gauss, shifted_params, 2.0)
    assert sol.residual_rel <= 1e-4
    assert sol.transform is not None
    assert abs(sol.transform.mu - shifted_params.zeta / sol.sigma) < 1e-9
    assert abs(quadrature(sol.transform.samples) - 1.0) < 1e-6


def test_solve_explicit_grid_too_small(gauss, fig_params):
    with pytest.raises(cv.GridTooSmallError):
        solve_sigma(gauss, fig_params, 2.49,
                    tol=Tolerances(spacing=2e-3, half_width=6.0))


def test_derivative_matches_eigenfunction(gauss, fig_params):
    sol = solve_sigma(gauss, fig_params, 1.0)
    m = int(round(sol.xi / sol.grid.spacing))
    d = derivative_profile(sol).half_values[:m]
    v = sol.v.half_values[:m]
    assert abs(cosine_similarity(d, v)) >= 1.0 - 1e-4


def test_residual_zero_profile(gauss, fig_params):
    g = make_grid(10.0, 0.01)
    assert residual(gauss, fig_params, 1.0, GridFn(g, np.zeros(g.n))) == 0.0


def test_residual_round_trip(gauss, fig_params):
    sol = solve_sigma(gauss, fig_params, 0.5)
    again = residual(gauss, fig_params, sol.sigma, sol.u)
    assert again <= sol.residual_rel * (1 + 1e-12)


def test_limit_profile_absolute_residual_decreases(gauss, fig_params):
    # the small-eigenvalue limit profile theta * a/a(0) never exceeds the
    # kink value, so f vanishes on it and the relative residual is
    # identically 1; the absolute L2 residual sigma*||u||_2 is the
    # meaningful decreasing quantity
    g = make_grid(10.0, 0.001)
    u = GridFn(g, fig_params.theta * gauss(g.points) / gauss.a0)
    fu = GridFn(g, fig_params(u.values))
    assert np.all(fu.values == 0.0)
    abs_res = []
    for s in (0.5, 0.1, 0.01):
        assert residual(gauss, fig_params, s, u) == pytest.approx(1.0)
        lhs = s * u.values
        rhs = convolve(sample(gauss, g), fu).values
        abs_res.append(math.sqrt(g.spacing * np.sum((lhs - rhs) ** 2)))
    assert abs_res[0] > abs_res[1] > abs_res[2]


def test_sweep_reference_list(gauss, fig_params):
    entries = sweep(gauss, fig_params, [0.5, 1.0, 1.5, 2.0])
    assert [e.sigma_requested for e in entries] == [0.5, 1.0, 1.5, 2.0]
    assert all(e.error is None for e in entries)
    assert all(e.residual_rel <= 1e-6 for e in entries)
    xis = [e.xi for e in entries]
    assert all(b > a for a, b in zip(xis, xis[1:]))


def test_sweep_empty():
    assert sweep(cv.gaussian(), BilinearNonlinearity(0.0, 0.6, 2.5), []) == []


def test_sweep_marks_inadmissible(gauss, fig_params):
    entries = sweep(gauss, fig_params, [fig_params.zeta, 1.0])
    assert entries[0].error is not None
    assert math.isnan(entries[0].xi)
    assert entries[1].error is None


def test_cosine_similarity_zero_vector():
    with pytest.raises(cv.InvalidParameterError):
        cosine_similarity(np.zeros(3), np.ones(3))
