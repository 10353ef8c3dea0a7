import math

import numpy as np
import pytest

from annulus_bvp.eigen import EigenError, first_eigen_fd, first_eigen_shoot

PI2 = math.pi ** 2


def const(c):
    return lambda t: np.full_like(np.asarray(t, dtype=float), c)


ANNULUS_WEIGHT = lambda t: 4.0 / (2.0 - np.asarray(t, dtype=float)) ** 4


def test_unit_weight_is_pi_squared():
    assert abs(first_eigen_shoot(const(1.0)).lambda1 - PI2) / PI2 < 1e-12


def test_scaled_weight():
    assert abs(first_eigen_shoot(const(4.0)).lambda1 - PI2 / 4) / (PI2 / 4) < 1e-10


def test_annulus_weight_exact_and_cross_method():
    # N = 3, r1 = 1, r2 = 2: the radial eigenvalue of the annulus is pi^2/(r2 - r1)^2
    s = first_eigen_shoot(ANNULUS_WEIGHT).lambda1
    f = first_eigen_fd(ANNULUS_WEIGHT).lambda1
    assert abs(s - PI2) / PI2 < 1e-10
    assert abs(s - f) / s < 1e-6


def test_fd_closed_form_and_second_order():
    n = 1024
    res = first_eigen_fd(const(1.0), n=n)
    raw = res.details["lambda_n"]
    h = 1.0 / (n + 1)
    closed = 4 / h ** 2 * math.sin(math.pi * h / 2) ** 2
    assert abs(raw - closed) / closed < 1e-10
    assert abs(raw - PI2) / PI2 < 1e-4
    assert abs(res.lambda1 - PI2) / PI2 < 1e-9


def test_linear_weight_cross_method():
    m = lambda t: 1.0 + np.asarray(t, dtype=float)
    s, f = first_eigen_shoot(m).lambda1, first_eigen_fd(m).lambda1
    assert abs(s - f) / s < 1e-6


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
@pytest.mark.parametrize("m", [const(1.0), ANNULUS_WEIGHT, lambda t: 1.0 + np.asarray(t) ** 2])
def test_scaling(c, m):
    base = first_eigen_shoot(m).lambda1
    scaled = first_eigen_shoot(lambda t: c * m(t)).lambda1
    assert abs(scaled * c - base) / base < 1e-8


def test_monotone_in_weight():
    assert first_eigen_shoot(const(1.0)).lambda1 >= first_eigen_shoot(lambda t: 1 + np.asarray(t)).lambda1


@pytest.mark.parametrize("method", [first_eigen_shoot, first_eigen_fd])
def test_eigenfunction_shape(method):
    res = method(ANNULUS_WEIGHT)
    v = res.phi.values
    assert v[0] == 0.0 and v[-1] == 0.0
    assert np.all(v[1:-1] > 0)
    assert v[1] - v[0] > 0 and v[-1] - v[-2] < 0
    assert abs(np.max(np.abs(v)) - 1.0) < 1e-15


def test_residual_small():
    res = first_eigen_shoot(ANNULUS_WEIGHT)
    assert res.residual <= 1e-4 * res.lambda1


def test_degenerate_weights_rejected():
    with pytest.raises(EigenError):
        first_eigen_fd(const(0.0))
    with pytest.raises(EigenError):
        first_eigen_shoot(const(0.0))
    with pytest.raises(EigenError):
        first_eigen_shoot(lambda t: np.asarray(t) - 0.5)


def test_bracket_expansion():
    # lambda1 = pi^2 / 1e-3 lies far above the default bracket
    res = first_eigen_shoot(const(1e-3))
    assert abs(res.lambda1 - PI2 * 1e3) / (PI2 * 1e3) < 1e-9
