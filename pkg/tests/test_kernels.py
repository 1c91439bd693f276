import math

import numpy as np
import pytest

import conveig as cv
from conveig.grid import GridFn, make_grid, quadrature
from conveig.kernels import (
    gaussian,
    indicator,
    kernel_from_samples,
    load_kernel_csv,
    reference_grid,
    sample,
    tent,
    validate_kernel,
)


def test_gaussian_metadata():
    k = gaussian()
    assert abs(k.a0 - 0.56419) < 1e-5
    assert abs(k.a2pp - (-1.12838)) < 1e-5
    g = reference_grid(k)
    second = quadrature(GridFn(g, g.points ** 2 * k(g.points)))
    assert abs(second - 0.5) < 1e-6
    assert abs(k.second_moment - 0.5) < 1e-12


def test_gaussian_truncation_negligible():
    assert gaussian()(10.0) < 1e-12


def test_tent_values_exact():
    k = tent()
    assert k(0.5) == 0.5
    assert k(1.5) == 0.0
    assert k.a2pp is None
    g = reference_grid(k)
    assert abs(quadrature(sample(k, g)) - 1.0) < 1e-9
    # nodes evaluate exactly, no interpolation involved
    assert k(0.25) == 0.75


def test_indicator_values_exact():
    k = indicator()
    assert k(0.4) == 1.0
    assert k(0.6) == 0.0
    assert k(0.5) == 1.0  # boundary included
    assert k.plateau_half_width == 0.5


def test_validate_builtins_pass():
    for k in (gaussian(), tent(), indicator()):
        report = validate_kernel(k)
        assert report.passed, (k.label, report)
        assert report.normalization_deviation < 1e-6


def test_validate_strictness_flags():
    assert validate_kernel(gaussian()).strictly_unimodal
    assert not validate_kernel(indicator()).strictly_unimodal
    assert not validate_kernel(tent()).strictly_unimodal


def test_validate_detects_nonunimodal():
    x = np.array([0.0, 0.5, 1.0, 1.5])
    a = np.array([1.0, 0.5, 0.8, 0.0])  # bump at x=1 violates unimodality
    k = kernel_from_samples(x, a)
    report = validate_kernel(k, make_grid(3.0, 0.01))
    assert not report.unimodal
    assert report.unimodality_violation > 0


def test_validate_resolution_error():
    with pytest.raises(cv.ResolutionError):
        validate_kernel(indicator(), make_grid(2.0, 0.01))
    with pytest.raises(cv.ResolutionError):
        validate_kernel(gaussian(), make_grid(10.0, 0.05))


def test_sampled_kernel_requires_zero_and_order():
    with pytest.raises(cv.InvalidParameterError):
        kernel_from_samples(np.array([0.1, 0.5, 1.0]), np.array([1.0, 0.5, 0.0]))
    with pytest.raises(cv.InvalidParameterError):
        kernel_from_samples(np.array([0.0, 0.5, 0.4]), np.array([1.0, 0.5, 0.6]))


def test_sampled_kernel_interpolates_and_mirrors():
    x = np.array([0.0, 1.0, 2.0])
    a = np.array([0.5, 0.25, 0.0])
    k = kernel_from_samples(x, a, label="wedge")
    assert k(0.5) == pytest.approx(0.375)
    assert k(-0.5) == pytest.approx(0.375)
    assert k(3.0) == 0.0
    assert k.support_half_width == 2.0
    assert not k.strictly_unimodal


def test_sampled_kernel_rejects_uneven():
    x = np.array([-1.0, 0.0, 1.0])
    a = np.array([0.2, 1.0, 0.4])
    with pytest.raises(cv.InvalidParameterError):
        kernel_from_samples(x, a)


def test_kernel_csv_round_trip(tmp_path):
    g = make_grid(2.0, 0.25)
    k = tent()
    path = tmp_path / "tent_samples.csv"
    with open(path, "w") as fh:
        fh.write("# sampled kernel\nx,a\n")
        for x in g.points:
            fh.write(f"{float(x)!r},{float(k(x))!r}\n")
    loaded = load_kernel_csv(path)
    xs = np.linspace(-1.5, 1.5, 31)
    np.testing.assert_allclose(loaded(xs), k(xs), atol=1e-12)


def test_plateau_detection_from_samples():
    x = np.array([0.0, 0.2, 0.4, 0.6, 0.8])
    a = np.array([1.0, 1.0, 1.0, 0.5, 0.0])
    k = kernel_from_samples(x, a)
    assert k.plateau_half_width == pytest.approx(0.4)
    assert k.a2pp == 0.0
