"""Tilted integral by series and by quadrature, and the endpoint quotient.

Oracles: scipy.integrate.quad with scipy.special.ive for moderate x, and the
equality case of the untilted power inequality, where F equals the endpoint
scale exactly.
"""
import math

import numpy as np
import pytest
from scipy import integrate, special

from besselbound.constants import k_const, l_const
from besselbound.errors import DomainError
from besselbound.integral import (
    endpoint_quotient,
    log_tilted_integral,
    tilted_integral_quadrature,
    tilted_integral_series,
)
from besselbound.params import Params
from besselbound.weights import MonotoneFactor, approx_power, mixture, power_monotone, pure_power


def scipy_F(x, mu, q, gamma):
    f = lambda t: math.exp(-gamma * t) * t ** (q - mu) * special.iv(mu, t)
    val, _ = integrate.quad(f, 0, x, epsabs=0, epsrel=1e-13, limit=400)
    return val


def test_equality_case_value():
    # q = 2mu + 1, gamma = 0: F(x) = x^(mu+1) I_{mu+1}(x); at mu = 0, x = 1 this is I_1(1)
    r = tilted_integral_series(1.0, Params(0, 1, 0))
    assert r.unscaled() == pytest.approx(special.iv(1, 1), rel=1e-13)


@pytest.mark.parametrize("mu,q,gamma,x", [(0.5, 0, 0.5, 2.0), (0, 0, 0, 1.0), (-0.5, -0.5, 0.25, 3.0),
                                          (2.0, 3.0, 0.9, 10.0), (-0.9, 0.5, 0.1, 0.4)])
def test_matches_scipy_quad(mu, q, gamma, x):
    ref = scipy_F(x, mu, q, gamma)
    p = Params(mu, q, gamma)
    assert tilted_integral_series(x, p).unscaled() == pytest.approx(ref, rel=1e-10)
    assert tilted_integral_quadrature(x, p).unscaled() == pytest.approx(ref, rel=1e-10)


def test_small_x_leading_term():
    # F ~ x^(q+1) / (2^mu (q+1) Gamma(mu+1))
    mu, q = 0.7, 0.4
    x = 1e-6
    lead = x ** (q + 1) / (2 ** mu * (q + 1) * math.gamma(mu + 1))
    assert math.exp(log_tilted_integral(x, Params(mu, q, 0.3))) == pytest.approx(lead, rel=1e-6)


def test_dual_method_agreement_grid():
    xs = np.geomspace(1e-3, 300, 50)
    worst = 0.0
    for mu in (-0.5, 0, 0.5, 2):
        for q in (-0.5, 0, 1, 3):
            for gamma in (0, 0.25, 0.5, 0.9):
                p = Params(mu, q, gamma)
                for w in (pure_power(q), mixture([(1, q), (2, q + 1)])):
                    a = log_tilted_integral(xs, p, w, method="series")
                    b = log_tilted_integral(xs, p, w, method="quadrature")
                    worst = max(worst, np.max(np.abs(np.expm1(a - b))))
    assert worst <= 1e-9


def test_mixture_linearity():
    xs = np.geomspace(1e-2, 100, 20)
    p = Params(0.3, 0.0, 0.4)
    a = np.exp(log_tilted_integral(xs, p, mixture([(2, 0.5), (3, 1.5)])))
    b = 2 * np.exp(log_tilted_integral(xs, p, pure_power(0.5))) + 3 * np.exp(log_tilted_integral(xs, p, pure_power(1.5)))
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_power_monotone_linear_factor():
    # t^q (1 + t) is the sum of the q and q+1 pure powers
    f = MonotoneFactor.from_function(lambda t: 1 + t, "1+x")
    xs = np.geomspace(1e-2, 50, 15)
    p = Params(1.0, 0.5, 0.5)
    a = np.exp(log_tilted_integral(xs, p, power_monotone(0.5, f)))
    b = np.exp(log_tilted_integral(xs, p, pure_power(0.5))) + np.exp(log_tilted_integral(xs, p, pure_power(1.5)))
    np.testing.assert_allclose(a, b, rtol=1e-11)


def test_exp_defect_shifts_tilt():
    xs = np.geomspace(1e-2, 200, 15)
    a = log_tilted_integral(xs, Params(0, 1, 0.3), approx_power(1, 0.2), method="quadrature")
    b = log_tilted_integral(xs, Params(0, 1, 0.5), pure_power(1))
    np.testing.assert_allclose(a, b, rtol=1e-11)


def test_increasing_in_x():
    xs = np.geomspace(1e-5, 500, 200)
    for mu, q, g in [(0, 0, 0.5), (-0.9, -0.9, 0.9), (5, 3, 0.1)]:
        assert np.all(np.diff(log_tilted_integral(xs, Params(mu, q, g))) > 0)


@pytest.mark.parametrize("mu", [-0.25, 0.0, 0.5, 2.0])
def test_equality_case_quotient_is_one(mu):
    xs = np.geomspace(1e-5, 500, 40)
    R = endpoint_quotient(xs, Params(mu, 2 * mu + 1, 0.0))
    assert np.max(np.abs(R - 1)) <= 1e-12


def test_untilted_power_bounds():
    xs = np.geomspace(1e-5, 500, 80)
    for mu in (-0.5, 0, 1, 3):
        for q in (-0.5, 0, 1, 3):
            R = endpoint_quotient(xs, Params(mu, q, 0.0))
            K, L = k_const(mu, q), l_const(mu, q)
            assert np.all(R <= K * (1 + 1e-12)) and np.all(R >= L * (1 - 1e-12))


def test_quotient_examples():
    p = Params(0, 0, 0.5)
    assert endpoint_quotient(1e-3, p) == pytest.approx(2.0, abs=2e-3)
    # 2 + 3/x at x = 200
    assert endpoint_quotient(200.0, p) == pytest.approx(2 + 3 / 200, abs=5e-4)


def test_large_x_no_overflow():
    v = log_tilted_integral(np.array([500.0, 2000.0]), Params(0, 0, 0.1))
    assert np.all(np.isfinite(v))


def test_errors():
    with pytest.raises(DomainError):
        log_tilted_integral(0.0, Params(0, 0, 0.5))
    with pytest.raises(DomainError):
        log_tilted_integral(1.0, Params(0, 0, 0.5), method="magic")
    with pytest.raises(DomainError):
        tilted_integral_series(1.0, Params(0, 0, 0.5), power_monotone(0, MonotoneFactor.from_samples([1], [1])))
