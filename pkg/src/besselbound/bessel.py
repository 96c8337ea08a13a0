"""Modified Bessel functions of the first kind for real order alpha > -1.

Values are computed in log form so that the large-x growth e^x never has to
be materialised.  Two branches are used:

* the power series, summed as ``prefix * (1 + tail)`` with the tail kept
  separately so that ``log1p`` stays accurate near the origin;
* the Hankel asymptotic expansion for x beyond ``max(30, 2|alpha|)``, falling
  back to a rescaled series when the expansion is not yet accurate (large
  orders).

The ratio ``I_{alpha+1}/I_alpha`` is evaluated separately by backward
recurrence of its continued fraction.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import BesselOverflowError, ConvergenceError, DomainError

LOG_DBL_MAX = math.log(sys.float_info.max)
EPS = np.finfo(float).eps

SERIES_RTOL = 1e-17
SERIES_MIN_TERMS = 5
SERIES_MAX_TERMS = 500

ASYM_MAX_TERMS = 60
# fall back to the series when the asymptotic sum is not this accurate
ASYM_ACCEPT_RTOL = 1e-15

CF_START_DEPTH = 32
CF_MAX_DEPTH = 4096
CF_RTOL = 1e-14

_RESCALE_AT = 1e280
_LOG_RESCALE = math.log(1e-280)


@dataclass(frozen=True)
class EvalResult:
    """A single function value tagged with how it was obtained.

    When ``scaled`` is true, ``value`` holds ``exp(-x) * I_alpha(x)``.
    """

    value: float
    scaled: bool
    method: str
    abs_err_estimate: float


@dataclass(frozen=True)
class EndpointScales:
    """``Y = x**(q-mu) I_mu(x)`` and ``Z = x**(q-mu) I_{mu+1}(x)``."""

    Y: float
    Z: float
    scaled: bool = False


def _check_order(alpha):
    if not math.isfinite(alpha):
        raise DomainError(f"order must be finite, got {alpha}")
    if alpha <= -1:
        raise DomainError(f"requires alpha > -1, got alpha={alpha}")


def _as_positive_array(x):
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa <= 0):
        raise DomainError("requires x > 0")
    return xa


def series_cutoff(alpha):
    """Largest x handled by the power series branch."""
    return max(30.0, 2.0 * abs(alpha))


def _series_sum(alpha, x):
    """Sum ``1 + sum_{k>=1} t_k`` of the normalised power series.

    Returns ``(log_sum, tail, nterms)``.  ``tail`` is ``sum_{k>=1} t_k`` and is
    only meaningful where no rescaling happened (finite entries).
    """
    h2 = 0.25 * x * x
    term = np.ones_like(x)
    tail = np.zeros_like(x)
    one = np.ones_like(x)
    shift = np.zeros_like(x)
    for k in range(SERIES_MAX_TERMS):
        term = term * h2 / ((k + 1.0) * (k + 1.0 + alpha))
        tail = tail + term
        if k + 2 >= SERIES_MIN_TERMS and np.all(term <= SERIES_RTOL * (one + tail)):
            break
        big = tail > _RESCALE_AT
        if np.any(big):
            scale = np.where(big, 1e-280, 1.0)
            term = term * scale
            tail = tail * scale
            one = one * scale
            shift = shift - np.where(big, _LOG_RESCALE, 0.0)
    else:
        raise ConvergenceError(
            f"Bessel series did not converge in {SERIES_MAX_TERMS} terms "
            f"(alpha={alpha}, max x={float(np.max(x))})"
        )
    rescaled = shift > 0
    log_sum = np.where(rescaled, shift + np.log(one + tail), np.log1p(tail))
    tail = np.where(rescaled, np.inf, tail)
    return log_sum, tail, k + 2


def _log_series(alpha, x, power=False):
    """Log of I_alpha(x) (or x**-alpha I_alpha(x) if ``power``) by series."""
    log_sum, _, n = _series_sum(alpha, x)
    if power:
        prefix = -alpha * math.log(2.0) - math.lgamma(alpha + 1.0)
    else:
        prefix = alpha * np.log(0.5 * x) - math.lgamma(alpha + 1.0)
    return prefix + log_sum, n * EPS * np.ones_like(x)


def _log_asymptotic(alpha, x):
    """Hankel expansion of log(I_alpha(x)).

    Returns ``(log_value, relerr_estimate)``.  Terms are added while they
    decrease; the first omitted term is the error estimate.
    """
    mu4 = 4.0 * alpha * alpha
    total = np.ones_like(x)
    term = np.ones_like(x)
    err = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, ASYM_MAX_TERMS + 1):
        nxt = -term * (mu4 - (2 * k - 1) ** 2) / (8.0 * k * x)
        growing = np.abs(nxt) >= np.abs(term)
        stop_grow = active & growing
        err = np.where(stop_grow, np.abs(nxt), err)
        active = active & ~growing
        total = np.where(active, total + nxt, total)
        term = np.where(active, nxt, term)
        small = np.abs(nxt) <= SERIES_RTOL * np.abs(total)
        active = active & ~small
        if not np.any(active):
            break
    else:
        err = np.where(active, np.abs(term), err)
    with np.errstate(invalid="ignore", divide="ignore"):
        relerr = err / np.abs(total) + 4 * EPS
        logv = x - 0.5 * np.log(2.0 * math.pi * x) + np.log(total)
    bad = ~(total > 0)
    relerr = np.where(bad, np.inf, relerr)
    return logv, relerr


def _log_besseli(alpha, x, power=False):
    """Vectorised core: ``(log_value, relerr, used_asymptotic)`` for x > 0."""
    logv = np.empty_like(x)
    relerr = np.empty_like(x)
    asym = x > series_cutoff(alpha)
    small = ~asym
    if np.any(small):
        lv, re = _log_series(alpha, x[small], power)
        logv[small] = lv
        relerr[small] = re
    if np.any(asym):
        xa = x[asym]
        lv, re = _log_asymptotic(alpha, xa)
        poor = re > ASYM_ACCEPT_RTOL
        if np.any(poor):
            lvs, res = _log_series(alpha, xa[poor], power=False)
            lv[poor] = lvs
            re[poor] = res
            used = asym.copy()
            used[np.flatnonzero(asym)[poor]] = False
            asym = used
        if power:
            lv = lv - alpha * np.log(xa)
        logv[x > series_cutoff(alpha)] = lv
        relerr[x > series_cutoff(alpha)] = re
    return logv, relerr, asym


def log_besseli(alpha, x):
    """Natural logarithm of I_alpha(x), elementwise for x > 0."""
    _check_order(alpha)
    xa = _as_positive_array(x)
    logv, _, _ = _log_besseli(alpha, np.atleast_1d(xa))
    return logv.reshape(xa.shape) if xa.ndim else float(logv[0])


def log_besseli_pow(alpha, x):
    """Natural logarithm of ``x**-alpha * I_alpha(x)``, elementwise for x > 0.

    Near the origin the power cancels analytically, so the result tends to
    ``-alpha*log(2) - lgamma(alpha+1)`` without loss of accuracy.
    """
    _check_order(alpha)
    xa = _as_positive_array(x)
    logv, _, _ = _log_besseli(alpha, np.atleast_1d(xa), power=True)
    return logv.reshape(xa.shape) if xa.ndim else float(logv[0])


def besseli(alpha, x, scaled=False):
    """Modified Bessel function of the first kind, I_alpha(x).

    Parameters
    ----------
    alpha : float
        Order, alpha > -1.
    x : float
        Argument, x >= 0.  At x = 0 the limit is returned where it is finite.
    scaled : bool
        Return ``exp(-x) * I_alpha(x)`` instead.

    Raises
    ------
    DomainError
        alpha <= -1, x < 0, or x = 0 with -1 < alpha < 0.
    BesselOverflowError
        Unscaled value exceeds the double range.
    """
    _check_order(alpha)
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"requires x >= 0, got x={x}")
    if x == 0.0:
        if alpha == 0:
            return EvalResult(1.0, scaled, "series", 0.0)
        if alpha > 0:
            return EvalResult(0.0, scaled, "series", 0.0)
        raise DomainError(f"I_alpha(0) is infinite for -1 < alpha < 0 (alpha={alpha})")
    logv, relerr, asym = _log_besseli(alpha, np.array([x]))
    logv = float(logv[0])
    relerr = float(relerr[0])
    method = "asymptotic" if asym[0] else "series"
    if scaled:
        logv -= x
    elif logv > LOG_DBL_MAX:
        raise BesselOverflowError(
            f"I_{alpha}({x}) overflows a double; request the scaled form"
        )
    value = math.exp(logv)
    return EvalResult(value, scaled, method, value * relerr)


def _ratio_cf(alpha, x, depth):
    r = x / (x + 2.0 * (alpha + depth) + 2.0)
    for j in range(depth - 1, -1, -1):
        r = 1.0 / (2.0 * (alpha + j + 1.0) / x + r)
    return r


def bessel_ratio(alpha, x):
    """Ratio I_{alpha+1}(x) / I_alpha(x) by its continued fraction.

    The recurrence ``1/r_a = 2(a+1)/x + r_{a+1}`` is run backwards from a
    seed at depth N, doubling N until two depths agree to 1e-14.
    """
    _check_order(alpha)
    xa = _as_positive_array(x)
    xv = np.atleast_1d(xa)
    depth = CF_START_DEPTH
    prev = _ratio_cf(alpha, xv, depth)
    while True:
        depth *= 2
        if depth > CF_MAX_DEPTH:
            raise ConvergenceError(
                f"ratio continued fraction unresolved at depth {CF_MAX_DEPTH}"
            )
        cur = _ratio_cf(alpha, xv, depth)
        if np.all(np.abs(cur - prev) <= CF_RTOL * cur):
            break
        prev = cur
    return cur.reshape(xa.shape) if xa.ndim else float(cur[0])


def ratio_lower_bound(alpha, x):
    """Closed-form lower bound ``x / (x + 2 alpha + 2)`` for the ratio."""
    _check_order(alpha)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("requires x > 0")
    out = xa / (xa + 2.0 * alpha + 2.0)
    return out if xa.ndim else float(out)


def endpoint_scales(mu, q, x, scaled=False):
    """Endpoint scales ``Y = x^(q-mu) I_mu(x)`` and ``Z = x^(q-mu) I_{mu+1}(x)``."""
    _check_order(mu)
    x = float(_as_positive_array(x))
    shift = -x if scaled else 0.0
    log_y = log_besseli_pow(mu, x) + q * math.log(x) + shift
    log_z = log_besseli(mu + 1.0, x) - mu * math.log(x) + q * math.log(x) + shift
    if max(log_y, log_z) > LOG_DBL_MAX:
        raise BesselOverflowError(f"endpoint scales overflow at x={x}; use scaled=True")
    return EndpointScales(math.exp(log_y), math.exp(log_z), scaled)


def log_derivatives(mu, q, x):
    """Logarithmic derivatives ``(d log Y/dx, d log Z/dx)``."""
    _check_order(mu)
    r0 = bessel_ratio(mu, x)
    r1 = bessel_ratio(mu + 1.0, x)
    return r0 + q / x, r1 + (q + 1.0) / x


def _dlog_pow(alpha, a, b):
    """``log(a^-alpha I_alpha(a)) - log(b^-alpha I_alpha(b))`` without the
    constant prefix, so small differences near the origin keep full accuracy."""
    pts = np.array([a, b])
    if max(a, b) <= series_cutoff(alpha):
        log_sum, tail, _ = _series_sum(alpha, pts)
        if np.all(np.isfinite(tail)):
            return float(np.log1p(tail[0]) - np.log1p(tail[1]))
        return float(log_sum[0] - log_sum[1])
    lv, _, _ = _log_besseli(alpha, pts, power=True)
    return float(lv[0] - lv[1])


def identity_residuals(alpha, x, h=None):
    """Normalised residuals of the classical identities at (alpha, x).

    Returns a triple:

    1. ``I_{a-1} - I_{a+1} - (2a/x) I_a`` over its largest term (NaN when
       alpha <= 0, where I_{a-1} is outside the supported orders);
    2. ``d/dx{x^-a I_a} - x^-a I_{a+1}`` relative to ``x^-a I_{a+1}``, with the
       derivative taken by a central difference of the logarithm;
    3. the Riccati residual ``r' - (1 - r^2 - (2a+1) r / x)`` over its
       largest term, again by central difference.

    ``h`` defaults to ``1e-5 * max(1, x)``.
    """
    _check_order(alpha)
    x = float(x)
    if x <= 0:
        raise DomainError("requires x > 0")
    if h is None:
        h = 1e-5 * max(1.0, x)
    h = min(h, 0.5 * x)

    if alpha > 0:
        la = log_besseli(alpha, x)
        lm = log_besseli(alpha - 1.0, x)
        lp = log_besseli(alpha + 1.0, x)
        terms = np.array([math.exp(lm - la), math.exp(lp - la), 2.0 * alpha / x])
        res1 = abs(terms[0] - terms[1] - terms[2]) / terms.max()
    else:
        res1 = math.nan

    r = bessel_ratio(alpha, x)
    deriv = _dlog_pow(alpha, x + h, x - h) / (2.0 * h)
    res2 = abs(deriv - r) / r

    rp, rm = bessel_ratio(alpha, np.array([x + h, x - h]))
    dr = (rp - rm) / (2.0 * h)
    rhs_terms = np.array([1.0, r * r, (2.0 * alpha + 1.0) * r / x])
    rhs = rhs_terms[0] - rhs_terms[1] - rhs_terms[2]
    scale = max(abs(dr), np.abs(rhs_terms).max())
    res3 = abs(dr - rhs) / scale
    return float(res1), float(res2), float(res3)
