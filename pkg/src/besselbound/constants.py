"""Closed-form endpoint constants and the optimisation of the split parameter.

The constructive constant is ``M(theta) = max(A(theta), C(theta))`` with

    A(theta) = K * exp(gamma * X(theta))
    C(theta) = 1 / (beta(theta) * (theta - gamma))

where ``X`` is the threshold beyond which the Bessel ratio controls growth
and ``beta = X / (X + 2 mu + 2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError
from .params import Params, default_theta


@dataclass(frozen=True)
class ConstantBundle:
    K: float
    L: float
    X: float
    beta: float
    A_term: float
    C_term: float
    M: float
    theta_used: float


@dataclass(frozen=True)
class OptimizedConstant:
    theta_star: float
    M_hat: float
    bracket: tuple  # in terms of the gap theta - gamma
    iterations: int
    # theta_star - gamma, kept separately because it can fall below the
    # resolution of theta_star itself when gamma (mu + 2) is large
    gap: float = 0.0
    # True when q < 0: the balance point is then a numerical infimum of the
    # general two-term constant rather than of the closed q >= 0 formula
    extended: bool = False


def _check_mu_q(mu, q):
    if not mu > -1:
        raise DomainError(f"requires mu > -1 (mu={mu})")
    if not q > -1:
        raise DomainError(f"requires q > -1 (q={q})")


def _check_theta(theta):
    if not 0 < theta < 1:
        raise DomainError(f"requires 0 < theta < 1 (theta={theta})")


def _exp(v):
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def k_const(mu, q):
    """Best upper constant of the untilted power inequality."""
    _check_mu_q(mu, q)
    return max(1.0, 2.0 * (mu + 1.0) / (q + 1.0))


def l_const(mu, q):
    """Best lower constant of the untilted power inequality."""
    _check_mu_q(mu, q)
    return min(1.0, 2.0 * (mu + 1.0) / (q + 1.0))


def coefficient_ratio(mu, q, k):
    """Ratio ``2(k+mu+1)/(2k+q+1)`` of matching series coefficients."""
    _check_mu_q(mu, q)
    if k < 0:
        raise DomainError("requires k >= 0")
    return 2.0 * (k + mu + 1.0) / (2.0 * k + q + 1.0)


def _quadratic_root(mu, q, theta):
    """Positive root of ``(1-theta) x^2 + (q - (2mu+2) theta) x + q (2mu+2) = 0``."""
    a2 = 2.0 * mu + 2.0
    b = a2 * theta - q
    disc = b * b - 4.0 * (1.0 - theta) * q * a2
    assert disc >= 0, "discriminant is nonnegative whenever q < 0"
    return (b + math.sqrt(disc)) / (2.0 * (1.0 - theta))


def threshold(mu, q, theta):
    """Threshold X(theta) past which the growth comparisons hold."""
    _check_mu_q(mu, q)
    _check_theta(theta)
    base = 2.0 * (mu + 2.0) * theta / (1.0 - theta)
    if q >= 0:
        return base
    return max(base, _quadratic_root(mu, q, theta))


def beta_val(mu, q, theta):
    """Ratio lower bound ``X / (X + 2mu + 2)`` at the threshold."""
    x = threshold(mu, q, theta)
    return x / (x + 2.0 * mu + 2.0)


def beta_positive(mu, theta):
    """``(mu+2) theta / (mu+1+theta)``, the q >= 0 simplification of beta."""
    return (mu + 2.0) * theta / (mu + 1.0 + theta)


def _bundle(mu, q, gamma, theta, eta, gap=None):
    k = k_const(mu, q)
    x = threshold(mu, q, theta)
    beta = x / (x + 2.0 * mu + 2.0)
    a_term = k * _exp((gamma + eta) * x)
    gap = theta - gamma - eta if gap is None else gap
    c_term = 1.0 / (beta * gap)
    return ConstantBundle(
        K=k,
        L=l_const(mu, q),
        X=x,
        beta=beta,
        A_term=a_term,
        C_term=c_term,
        M=max(a_term, c_term),
        theta_used=theta,
    )


def constructive_constant(p: Params) -> ConstantBundle:
    """Two-term constant M(theta) for upper q-power weights.

    ``p.theta`` defaults to ``(1 + gamma) / 2`` when absent.
    """
    theta = default_theta(p.gamma) if p.theta is None else p.theta
    if not p.gamma < theta < 1:
        raise DomainError(f"requires gamma < theta < 1 (theta={theta}, gamma={p.gamma})")
    return _bundle(p.mu, p.q, p.gamma, theta, 0.0)


def M_value(mu, q, gamma, theta):
    """Shorthand for ``constructive_constant(...).M``."""
    return constructive_constant(Params(mu, q, gamma, theta)).M


def closed_constant(mu, q, gamma):
    """Constant at the canonical choice ``theta = (1 + gamma) / 2`` for q >= 0."""
    if q < 0:
        raise DomainError(f"closed form requires q >= 0 (q={q})")
    if not 0 < gamma < 1:
        raise DomainError(f"requires 0 < gamma < 1 (gamma={gamma})")
    k = k_const(mu, q)
    first = k * _exp(2.0 * gamma * (mu + 2.0) * (1.0 + gamma) / (1.0 - gamma))
    second = 2.0 * (2.0 * mu + 3.0 + gamma) / ((mu + 2.0) * (1.0 - gamma * gamma))
    return max(first, second)


def approx_constant(p: Params) -> ConstantBundle:
    """Constant for weights with exponential defect ``eta``.

    Requires ``gamma + eta < theta < 1``; theta defaults to the midpoint.
    """
    eta = p.eta or 0.0
    theta = default_theta(p.gamma, eta) if p.theta is None else p.theta
    if not p.gamma + eta < theta < 1:
        raise DomainError(
            f"requires gamma + eta < theta < 1 (theta={theta}, gamma + eta={p.gamma + eta})"
        )
    return _bundle(p.mu, p.q, p.gamma, theta, eta)


def _balance_terms(mu, q, gamma, gap):
    b = _bundle(mu, q, gamma, gamma + gap, 0.0, gap)
    return b.A_term, b.C_term


def balance_terms(mu, q, gamma, gap):
    """``(A, C)`` at ``theta = gamma + gap``, with the gap used exactly."""
    _check_mu_q(mu, q)
    if not 0 < gap < 1 - gamma:
        raise DomainError(f"requires 0 < theta - gamma < 1 - gamma (gap={gap})")
    return _balance_terms(mu, q, gamma, gap)


def optimized_constant(mu, q, gamma) -> OptimizedConstant:
    """Minimise M(theta) over (gamma, 1) by bisection on A(theta) - C(theta).

    A is increasing and C decreasing on (gamma, 1), so the minimiser is the
    unique crossing.  The search runs on the gap ``theta - gamma`` so that
    crossings very close to gamma (large gamma (mu + 2)) stay resolvable.
    For q < 0 the same crossing is computed for the general two-term
    constant and flagged ``extended``.
    """
    _check_mu_q(mu, q)
    if not 0 < gamma < 1:
        raise DomainError(f"requires 0 < gamma < 1 (gamma={gamma})")

    def g(gap):
        a, c = _balance_terms(mu, q, gamma, gap)
        return a - c

    width = 1.0 - gamma
    lo = hi = None
    for j in range(1, 1000):
        cand = width * 2.0 ** -j
        if cand == 0.0:
            break
        if g(cand) < 0:
            lo = cand
            break
    for j in range(1, 200):
        cand = width * (1.0 - 2.0 ** -j)
        if gamma + cand >= 1.0:
            break
        if g(cand) > 0:
            hi = cand
            break
    if lo is None or hi is None or not lo < hi:
        raise ConvergenceError(
            f"no sign change of A - C found on ({gamma}, 1) for mu={mu}, q={q}"
        )
    bracket = (lo, hi)
    it = 0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        it += 1
        gm = g(mid)
        if gm < 0:
            lo = mid
        elif gm > 0:
            hi = mid
        else:
            lo = hi = mid
            break
        if hi - lo <= 1e-15 * hi:
            break
    a_lo, c_lo = _balance_terms(mu, q, gamma, lo)
    a_hi, c_hi = _balance_terms(mu, q, gamma, hi)
    # pick the end with the smaller imbalance
    if abs(a_lo - c_lo) <= abs(a_hi - c_hi):
        gap, a = lo, a_lo
    else:
        gap, a = hi, a_hi
    return OptimizedConstant(gamma + gap, a, bracket, it, gap=gap, extended=q < 0)


def shifted_constant(nu, n, a, gamma, theta) -> ConstantBundle:
    """Constant for the shifted family, i.e. (mu, q) = (nu + n, a + n)."""
    if not nu + n > -1:
        raise DomainError(f"requires nu + n > -1 (nu + n = {nu + n})")
    if not a + n > -1:
        raise DomainError(f"requires a + n > -1 (a + n = {a + n})")
    return constructive_constant(Params(nu + n, a + n, gamma, theta))


def mixture_constant(mu, gamma, theta, qs) -> float:
    """Largest constructive constant over a finite list of powers."""
    qs = list(qs)
    if not qs:
        raise DomainError("need at least one power")
    return max(constructive_constant(Params(mu, q, gamma, theta)).M for q in qs)


def endpoint_order_admissible(mu, kappa) -> bool:
    """Whether the endpoint order ``mu + kappa`` is covered, i.e.
    ``-1/2 <= mu + kappa <= mu + 1``."""
    if not mu > -1:
        raise DomainError(f"requires mu > -1 (mu={mu})")
    return -0.5 <= mu + kappa <= mu + 1.0
