import numpy as np
import pytest

import conveig as cv
from conveig.asymptotics import (
    check_kappa,
    check_large_sigma,
    check_small_sigma,
    fit_power_law,
    kernel_moment,
)
from conveig.solve import BilinearNonlinearity, Tolerances


def test_fit_power_law_recovers_exact():
    x = np.array([0.02, 0.04, 0.08, 0.16])
    y = 1.7 * x ** 0.5
    fit = fit_power_law(x, y, predicted_exponent=0.5, predicted_prefactor=1.7)
    assert fit.exponent == pytest.approx(0.5, abs=1e-12)
    assert fit.prefactor == pytest.approx(1.7, rel=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    assert np.max(np.abs(fit.relative_deviations)) < 1e-12


def test_fit_power_law_fixed_exponent_two_points():
    x = np.array([0.1, 0.2])
    y = 3.0 * np.ones(2)
    fit = fit_power_law(x, y, predicted_exponent=0.0, fit_exponent=False)
    assert fit.prefactor == pytest.approx(3.0)
    assert not fit.exponent_fitted


def test_fit_power_law_validation():
    with pytest.raises(cv.InvalidParameterError):
        fit_power_law([1, 2, 3], [1, 2, 3], 1.0)  # too few for a free fit
    with pytest.raises(cv.InvalidParameterError):
        fit_power_law([1, 3, 2, 4], [1, 2, 3, 4], 1.0)  # not monotone
    with pytest.raises(cv.InvalidParameterError):
        fit_power_law([1, 2, 3, 4], [1, -2, 3, 4], 1.0)  # nonpositive data


def test_kernel_moment(gauss, tent_kernel, box):
    assert kernel_moment(gauss) == pytest.approx(0.25)
    assert kernel_moment(tent_kernel) == pytest.approx(1.0 / 12.0)
    assert kernel_moment(box) == pytest.approx(1.0 / 24.0)


def test_small_sigma_probe(gauss, fig_params):
    rep = check_small_sigma(gauss, fig_params, [0.02, 0.04, 0.06, 0.08, 0.1])
    assert abs(rep.fit.exponent - 1.0 / 3.0) <= 0.05
    assert rep.fit.r_squared >= 0.99
    assert abs(rep.predicted_constant - 0.8101) < 1e-3
    # the smallest sigma comes first; its measured constant is nearest
    assert abs(rep.measured_constants[0] / rep.predicted_constant - 1) < 0.1
    assert np.all(np.diff(rep.limit_profile_distances) > 0)  # grows with sigma
    assert np.all(rep.parabola_cosines >= 0.99)


def test_small_sigma_refusals(gauss, tent_kernel, box, fig_params, shifted_params):
    sigmas = [0.02, 0.04, 0.06, 0.08]
    with pytest.raises(cv.UnsupportedKernelError):
        check_small_sigma(tent_kernel, fig_params, sigmas)
    with pytest.raises(cv.UnsupportedKernelError):
        check_small_sigma(box, fig_params, sigmas)
    with pytest.raises(cv.InvalidParameterError):
        check_small_sigma(gauss, shifted_params, sigmas)
    with pytest.raises(cv.InvalidParameterError):
        check_small_sigma(gauss, fig_params, [0.02, 0.04, 0.06])
    with pytest.raises(cv.InvalidParameterError):
        check_small_sigma(gauss, fig_params, [0.3, 0.4, 0.5, 0.6])


def test_large_sigma_probe_light(gauss, fig_params):
    # quick plumbing probe away from asymptopia; the acceptance suite runs
    # the tight version
    tol = Tolerances(spacing=5e-3)
    sigmas = [2.5 - d for d in (0.6, 0.45, 0.3, 0.2)]
    rep = check_large_sigma(gauss, fig_params, sigmas, tol=tol, tail_xi=12.0)
    assert rep.fit_xi.exponent < -0.4
    assert rep.m == pytest.approx(0.25)
    assert abs(rep.predicted_constant - 2.4836) < 1e-3
    # measured L2 growth follows the amplitude asymptotics, near -5/4
    assert -1.45 < rep.fit_norm.exponent < -1.0
    assert np.all(rep.bump_cosines > 0.98)
    assert rep.routes_agreement < 0.25


def test_large_sigma_validation(gauss, fig_params):
    with pytest.raises(cv.InvalidParameterError):
        check_large_sigma(gauss, fig_params, [2.3, 2.6, 2.4, 2.45])
    with pytest.raises(cv.InvalidParameterError):
        check_large_sigma(gauss, fig_params, [2.3, 2.35, 2.4])


def test_kappa_probe_light(gauss, shifted_params):
    tol = Tolerances(spacing=2e-3)
    rep = check_kappa(gauss, shifted_params, [1.3, 1.2, 1.1], tol=tol)
    assert np.all(np.diff(rep.kappa0_sequence) > 0)
    assert np.all(np.diff(rep.kappa2_sequence) > 0)
    assert rep.kappa0 < 1.1
    assert rep.kappa2 < 3.2
    assert np.all(np.diff(rep.core_deviations) < 0)
    assert rep.fit.predicted_prefactor == pytest.approx(rep.xi_limit_predicted)


def test_kappa_validation(gauss, fig_params, shifted_params):
    with pytest.raises(cv.InvalidParameterError):
        check_kappa(gauss, fig_params, [0.2, 0.1])  # needs zeta > 0
    with pytest.raises(cv.InvalidParameterError):
        check_kappa(gauss, shifted_params, [0.9, 1.2])  # below the slope
