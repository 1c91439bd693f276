import math

import numpy as np
import pytest

import conveig as cv
from conveig.grid import GridFn, make_grid, quadrature
from conveig.kernels import sample, validate_kernel
from conveig.transform import (
    MU_CAP,
    ConvolutionPowers,
    resolvent_check,
    suggested_half_width,
    transform_kernel,
    transform_parameters,
    truncation_depth,
)

SQRT_PI = math.sqrt(math.pi)


def test_transform_parameters_basic():
    assert transform_parameters(2.0, 1.0) == (1.0, 0.5)
    assert transform_parameters(1.7, 0.0) == (1.7, 0.0)


def test_transform_parameters_inadmissible():
    with pytest.raises(cv.AdmissibilityError):
        transform_parameters(1.0, 1.0)
    with pytest.raises(cv.AdmissibilityError):
        transform_parameters(0.5, 1.0)
    with pytest.raises(cv.InvalidParameterError):
        transform_parameters(1.0, -0.1)


def test_truncation_depth_bound():
    for mu in (0.1, 0.5, 0.9, 0.99):
        for tol in (1e-6, 1e-8):
            k = truncation_depth(mu, tol)
            assert mu ** (k + 1) / (1.0 - mu) < tol
    assert truncation_depth(0.0, 1e-8) == 0


def test_mixture_identity_at_zero(gauss):
    g = make_grid(10.0, 0.01)
    t = transform_kernel(gauss, 0.0, g)
    np.testing.assert_array_equal(t.samples.values, sample(gauss, g).values)
    assert t.truncation_depth == 0
    assert t.renormalization == 1.0


def test_mixture_gaussian_oracle(gauss):
    # closed-form oracle: k-fold Gaussian self-convolutions have peak
    # 1/sqrt(k pi), so the truncated mixture peak is the weighted sum
    mu, tol = 0.5, 1e-8
    g = make_grid(suggested_half_width(gauss, mu, tol), 0.002)
    t = transform_kernel(gauss, mu, g, tol=tol)
    depth = t.truncation_depth
    oracle = (1 - mu) * sum(mu ** k / math.sqrt((k + 1) * math.pi)
                            for k in range(depth + 1))
    oracle /= 1 - mu ** (depth + 1)  # renormalization of the truncated series
    peak = t.samples.values[g.center]
    assert abs(peak - oracle) < 1e-6 * oracle
    assert peak < gauss.a0


def test_mixture_mass_and_shape(gauss):
    mu, tol = 0.5, 1e-8
    g = make_grid(suggested_half_width(gauss, mu, tol), 0.002)
    t = transform_kernel(gauss, mu, g, tol=tol)
    assert abs(quadrature(t.samples) - 1.0) < 1e-6
    report = validate_kernel(t.kernel, g)
    assert report.passed
    right = t.samples.values[g.center:]
    live = right > 1e-10
    assert np.all(np.diff(right)[live[:-1]] < 0.0)


@pytest.mark.parametrize("label", ["tent", "indicator"])
def test_mixture_erases_plateaus(label, tent_kernel, box):
    kernel = tent_kernel if label == "tent" else box
    g = make_grid(8.0, 1.0 / 1001.0)
    t = transform_kernel(kernel, 0.5, g, tol=1e-8)
    right = t.samples.values[g.center:]
    live = np.nonzero(right > 1e-10)[0]
    diffs = np.diff(right[: live[-1] + 1])
    assert np.all(diffs < 0.0)


def test_mixture_widens(gauss):
    g = make_grid(30.0, 0.005)
    second = {}
    for mu in (0.0, 0.3, 0.6):
        t = transform_kernel(gauss, mu, g, tol=1e-8)
        second[mu] = t.kernel.second_moment
    assert second[0.3] > second[0.0]
    assert second[0.6] > second[0.3]


def test_mixture_mass_leak_detected(gauss):
    # half-width 10 cannot hold the mu = 0.9 mixture
    g = make_grid(10.0, 0.01)
    with pytest.raises(cv.GridTooSmallError):
        transform_kernel(gauss, 0.9, g, tol=1e-8)


def test_mixture_mu_cap(gauss):
    g = make_grid(10.0, 0.01)
    with pytest.raises(cv.InvalidParameterError):
        transform_kernel(gauss, 0.9995, g)
    with pytest.raises(cv.InvalidParameterError):
        transform_kernel(gauss, -0.1, g)
    assert MU_CAP == 0.999


def test_powers_cache_extends(gauss):
    g = make_grid(suggested_half_width(gauss, 0.6, 1e-8), 0.01)
    powers = ConvolutionPowers(gauss, g)
    first = powers.mixture(0.3, 1e-6)
    deeper = powers.mixture(0.6, 1e-8)
    assert deeper.truncation_depth > first.truncation_depth
    again = powers.mixture(0.3, 1e-6)
    np.testing.assert_array_equal(first.samples.values, again.samples.values)


def test_resolvent_identity_at_zero(gauss):
    g = make_grid(10.0, 0.01)
    rhs = sample(gauss, g)
    chk = resolvent_check(gauss, 0.0, rhs)
    np.testing.assert_allclose(chk.w_direct.values, chk.w_series.values,
                               rtol=0, atol=1e-14)
    assert chk.rel_diff < 1e-12


def test_resolvent_zero_input(gauss):
    g = make_grid(10.0, 0.01)
    chk = resolvent_check(gauss, 0.5, GridFn(g, np.zeros(g.n)))
    assert np.all(chk.w_direct.values == 0.0)
    assert np.all(chk.w_series.values == 0.0)
    assert chk.rel_diff == 0.0


def test_resolvent_two_routes_agree(gauss):
    g = make_grid(10.0, 0.01)
    rhs = sample(gauss, g)
    for mu in (0.1, 0.5, 0.9):
        chk = resolvent_check(gauss, mu, rhs)
        assert chk.rel_diff < 1e-6, mu


def test_resolvent_random_inputs(gauss):
    # smooth-ish random right-hand sides, decaying within the grid
    g = make_grid(10.0, 0.02)
    gen = np.random.default_rng(12)
    bump = np.exp(-0.5 * g.points ** 2)
    for mu in (0.1, 0.5, 0.9):
        for _ in range(3):
            rhs = GridFn(g, gen.normal(size=g.n) * bump)
            chk = resolvent_check(gauss, mu, rhs)
            assert chk.rel_diff < 1e-6, mu


def test_resolvent_rejects_bad_mu(gauss):
    g = make_grid(10.0, 0.01)
    with pytest.raises(cv.InvalidParameterError):
        resolvent_check(gauss, 1.0, sample(gauss, g))
