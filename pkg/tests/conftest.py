import numpy as np
import pytest

import conveig as cv


@pytest.fixture(scope="session")
def gauss():
    return cv.gaussian()


@pytest.fixture(scope="session")
def tent_kernel():
    return cv.tent()


@pytest.fixture(scope="session")
def box():
    return cv.indicator()


@pytest.fixture(scope="session")
def fig_params():
    """Zero lower slope, kink at 0.6, slope jump 2.5."""
    return cv.BilinearNonlinearity(zeta=0.0, theta=0.6, eta=2.5)


@pytest.fixture(scope="session")
def shifted_params():
    """Lower slope 1, kink at 0.6, slope jump 2.5."""
    return cv.BilinearNonlinearity(zeta=1.0, theta=0.6, eta=2.5)


@pytest.fixture(scope="session")
def reference_solutions(gauss, fig_params):
    """The four canonical zero-lower-slope solutions at h = 1e-3.

    Shared by the nonlinear-construction and derivative-identity
    acceptance criteria; the build time is recorded for the runtime bound.
    """
    import time

    sigmas = [0.5, 1.0, 1.5, 2.0]
    start = time.monotonic()
    solutions = [cv.solve_sigma(gauss, fig_params, s) for s in sigmas]
    elapsed = time.monotonic() - start
    return solutions, elapsed


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
