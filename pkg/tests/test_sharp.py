"""Quotient derivative, expansions, stationary points and the sharp constant.

Oracles: central finite differences of R, the closed-form expansion
coefficients, and an independent dense scan with scipy's bounded scalar
minimiser.
"""
import math

import numpy as np
import pytest
from scipy import optimize

from besselbound.constants import optimized_constant
from besselbound.errors import DomainError
from besselbound.params import Params
from besselbound.sharp import (
    expansion_coeffs,
    fit_expansion_check,
    is_flat,
    quotient_derivative,
    quotient_R,
    sample,
    sharp_constant,
    stationary_points,
    stationary_value,
)


def test_derivative_matches_finite_difference():
    p = Params(0.5, 0.3, 0.4)
    x, h = 2.0, 1e-5
    fd = (quotient_R(p, x + h) - quotient_R(p, x - h)) / (2 * h)
    assert quotient_derivative(p, x) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("mu,q,gamma", [(0, 0, 0.5), (2, -0.5, 0.1), (-0.7, 3, 0.8)])
def test_derivative_fd_grid(mu, q, gamma):
    p = Params(mu, q, gamma)
    for x in (0.05, 1.0, 30.0):
        h = 1e-5 * x
        fd = (quotient_R(p, x + h) - quotient_R(p, x - h)) / (2 * h)
        assert quotient_derivative(p, x) == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_derivative_positive_near_zero():
    for mu, q, g in [(0, 0, 0.5), (1, 2, 0.1), (-0.5, -0.5, 0.9)]:
        assert quotient_derivative(Params(mu, q, g), 1e-4) > 0


def test_expansion_coeffs_example():
    c = expansion_coeffs(Params(0, 0, 0.5))
    assert c.limit0 == 2
    assert c.c1_small == pytest.approx(0.25)
    assert c.c2_small == pytest.approx(0.0, abs=1e-15)
    assert c.limit_inf == pytest.approx(2)
    assert c.c1_large == pytest.approx(3)
    assert expansion_coeffs(Params(0, 0, 0)).c1_small == 0


def test_expansion_fit_examples():
    p = Params(0, 0, 0.5)
    z = fit_expansion_check(p, "zero")
    i = fit_expansion_check(p, "infinity")
    # the x^2 coefficient vanishes here, so the zero side decays faster than x^3
    assert z.consistent(two_sided=False)
    assert i.slope == pytest.approx(-2, abs=0.3)
    flat = fit_expansion_check(Params(0, 1, 0), "infinity")
    assert flat.exact and flat.worst_residual <= 1e-12
    with pytest.raises(DomainError):
        fit_expansion_check(p, "middle")


def test_expansion_zero_side_generic_slope():
    fit = fit_expansion_check(Params(1, 0.5, 0.3), "zero")
    assert fit.slope == pytest.approx(3, abs=0.3)


def test_expansion_zero_side_vanishing_cubic():
    # 50-digit mpmath quadrature of R at (0, 3, 1/2) gives
    # (R/limit0 - 1 - c1 x - c2 x^2)/x^3 = -2.86e-3 x, so the x^3 term vanishes
    fit = fit_expansion_check(Params(0, 3, 0.5), "zero")
    assert fit.slope == pytest.approx(4, abs=0.3)
    assert fit.consistent(two_sided=False)


def test_stationary_points_satisfy_equation():
    p = Params(0, 0, 0.25)
    xs = stationary_points(p)
    assert xs
    for x0 in xs:
        assert abs(quotient_derivative(p, x0)) <= 1e-8
        assert quotient_R(p, x0) == pytest.approx(stationary_value(p, x0), rel=1e-8)


def test_stationary_scan_refinement_stable():
    p = Params(0, 0, 0.25)
    a = stationary_points(p, n_scan=400)
    b = stationary_points(p, n_scan=800)
    assert len(a) == len(b)
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_flat_case():
    p = Params(0, 1, 0)
    assert is_flat(p)
    assert stationary_points(p) == []
    r = sharp_constant(p)
    assert r.flat and r.M_star == 1.0


def test_sharp_constant_example():
    p = Params(0, 0, 0.25)
    r = sharp_constant(p)
    assert r.agree
    assert r.M_star > 2
    assert r.M_star <= optimized_constant(0, 0, 0.25).M_hat
    # independent scan: dense log grid plus bounded scalar refinement
    xs = np.geomspace(1e-5, 500, 4000)
    R = quotient_R(p, xs)
    i = int(np.argmax(R))
    res = optimize.minimize_scalar(lambda u: -quotient_R(p, math.exp(u)),
                                   bounds=(math.log(xs[max(i - 1, 0)]), math.log(xs[min(i + 1, xs.size - 1)])),
                                   method="bounded", options={"xatol": 1e-12})
    assert r.M_star == pytest.approx(max(-res.fun, 2.0, 4 / 3), rel=1e-8)
    assert r.M_star == pytest.approx(2.19654, abs=1e-5)


def test_sharp_constant_at_limit():
    # q > 2mu+1 with small gamma: the supremum is the limit at zero or infinity
    r = sharp_constant(Params(0, 3, 0.01))
    assert r.agree
    assert r.M_star >= max(expansion_coeffs(Params(0, 3, 0.01)).limit0, 1 / 0.99)


def test_sample_records():
    out = sample(Params(0, 0, 0.5), [1e-3, 1.0], bound=6.0)
    assert len(out) == 2
    assert all(s.within_bound for s in out)
    assert sample(Params(0, 0, 0.5), 1.0)[0].within_bound is None


def test_stationary_points_errors():
    with pytest.raises(DomainError):
        stationary_points(Params(0, 0, 0.5), x_lo=2, x_hi=1)
