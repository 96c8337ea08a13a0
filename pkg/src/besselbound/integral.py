"""The tilted integral ``F(x) = int_0^x exp(-gamma t) w(t) t^-mu I_mu(t) dt``.

Two independent routes are provided:

* :func:`tilted_integral_series` integrates the power series of I_mu term by
  term, each term being an incomplete gamma function;
* :func:`tilted_integral_quadrature` applies adaptive Gauss-Kronrod panels to
  the integrand itself, cumulatively over a grid of upper limits.

Both work in log form and accept an array of upper limits.  Results are
returned as ``value * exp(scale_exponent)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .bessel import _log_besseli
from .errors import ConvergenceError, DomainError
from .incgamma import log_tilted_power_integral
from .params import Params
from .quadrature import integrate_panels
from .weights import WeightSpec, pure_power

EPS = np.finfo(float).eps
SERIES_RTOL = 1e-17
SERIES_MAX_TERMS = 4000
CHUNK = 48
QUAD_RTOL = 1e-13
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class IntegralResult:
    """``F = value * exp(scale_exponent)``; arrays when called with arrays."""

    value: object
    scale_exponent: object
    method: str
    abs_err_estimate: object

    @property
    def log_value(self):
        return np.log(self.value) + self.scale_exponent

    def unscaled(self):
        """``F`` itself; raises OverflowError if it is not representable."""
        with np.errstate(over="raise"):
            try:
                return self.value * np.exp(self.scale_exponent)
            except FloatingPointError as exc:
                raise OverflowError("integral value overflows a double") from exc


def _positive_x(x):
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa <= 0):
        raise DomainError("requires x > 0")
    return xa


def _max_terms(x):
    # the terms peak near k = x/2 and decay over a few sqrt(x) beyond it
    xm = float(np.max(x))
    return SERIES_MAX_TERMS + int(xm + 40.0 * math.sqrt(xm))


def _log_power_series_gamma0(x, mu, q):
    """log int_0^x t^(q-mu) I_mu(t) dt via the term ratio recurrence."""
    log_t0 = -mu * _LOG2 - math.lgamma(mu + 1.0) + (q + 1.0) * np.log(x) - math.log(q + 1.0)
    h2 = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    shift = np.zeros(x.shape, dtype=int)
    for k in range(_max_terms(x)):
        s = 2.0 * k + q + 1.0
        term = term * (h2 / ((k + 1.0) * (k + mu + 1.0))) * (s / (s + 2.0))
        total = total + term
        if k >= 3 and np.all(term <= SERIES_RTOL * total):
            break
        if np.any(total > 1e290):
            # renormalise by exact powers of two
            _, e = np.frexp(total)
            e = np.where(total > 1e290, e, 0)
            term = np.ldexp(term, -e)
            total = np.ldexp(total, -e)
            shift = shift + e
    else:
        raise ConvergenceError("term-wise series did not converge")
    return log_t0 + np.log(total) + shift * _LOG2, (k + 2) * EPS


def _log_power_series(x, mu, q, gamma):
    """log int_0^x exp(-gamma t) t^(q-mu) I_mu(t) dt, term-wise."""
    if gamma == 0:
        return _log_power_series_gamma0(x, mu, q)
    n = x.size
    m = np.full(n, -np.inf)
    acc = np.zeros(n)
    last = np.full(n, -np.inf)
    todo = np.arange(n)
    k0 = 0
    max_terms = _max_terms(x)
    while todo.size:
        if k0 >= max_terms:
            raise ConvergenceError("term-wise series did not converge")
        k = np.arange(k0, k0 + CHUNK, dtype=float)
        s = 2.0 * k + q + 1.0
        logc = -(2.0 * k + mu) * _LOG2 - gammaln(k + 1.0) - gammaln(k + mu + 1.0)
        xt = x[todo]
        log_t = logc[:, None] + log_tilted_power_integral(s[:, None], gamma, xt[None, :])
        chunk_max = log_t.max(axis=0)
        new_m = np.maximum(m[todo], chunk_max)
        acc[todo] = acc[todo] * np.exp(m[todo] - new_m) + np.exp(log_t - new_m).sum(axis=0)
        m[todo] = new_m
        tail = log_t[-1]
        decreasing = tail < log_t[-2]
        small = tail < m[todo] + np.log(acc[todo]) + math.log(SERIES_RTOL)
        last[todo] = tail
        todo = todo[~(decreasing & small)]
        k0 += CHUNK
    return m + np.log(acc), k0 * 4 * EPS


def _log_series(x, mu, gamma, w):
    """Dispatch the series route on the weight kind."""
    if w.kind == "pure_power":
        return _log_power_series(x, mu, w.q, gamma)
    if w.kind == "approx_power" and w.factor is None:
        return _log_power_series(x, mu, w.q, gamma + w.eta)
    if w.kind == "mixture":
        parts = []
        err = 0.0
        for c, qj in w.terms:
            lv, e = _log_power_series(x, mu, qj, gamma)
            parts.append(math.log(c) + lv)
            err = max(err, e)
        parts = np.array(parts)
        top = parts.max(axis=0)
        return top + np.log(np.exp(parts - top).sum(axis=0)), err
    raise DomainError(f"series route does not apply to {w.kind} weights")


def _resolve(p, w):
    if not isinstance(p, Params):
        raise DomainError("expected a Params instance")
    return pure_power(p.q) if w is None else w


def _package(xa, logv, relerr, gamma, method):
    scale = (1.0 - gamma) * xa
    value = np.exp(logv.reshape(xa.shape) - scale)
    err = value * np.broadcast_to(relerr, logv.shape).reshape(xa.shape)
    if xa.ndim == 0:
        return IntegralResult(float(value), float(scale), method, float(err))
    return IntegralResult(value, scale, method, err)


def tilted_integral_series(x, p: Params, w: WeightSpec = None) -> IntegralResult:
    """Tilted integral by term-wise integration of the Bessel series.

    Applies to pure-power and mixture weights (and to exponential-defect
    weights ``t^q exp(-eta t)``, which only shift the tilt).
    """
    w = _resolve(p, w)
    xa = _positive_x(x)
    logv, relerr = _log_series(np.atleast_1d(xa).ravel(), p.mu, p.gamma, w)
    return _package(xa, logv, relerr, p.gamma, "series-gamma")


def _log_integrand(t, mu, gamma, w):
    flat = t.ravel()
    lb, _, _ = _log_besseli(mu, flat, power=True)
    out = -gamma * flat + w.log_value(flat) + lb
    return out.reshape(t.shape)


def _log_quadrature(x, mu, gamma, w, rtol):
    """Cumulative quadrature over the sorted grid of upper limits."""
    xs = np.unique(x)
    knots = np.asarray([k for k in w.breakpoints if 0 < k < xs[-1]], dtype=float)
    grid = np.unique(np.concatenate([xs, knots]))
    npieces = grid.size
    scale = _log_integrand(grid, mu, gamma, w)
    lo = np.concatenate([[0.0], grid[:-1]])
    rate = max(1.0 - gamma - w.eta, 0.05)

    a, b, owner, share = [], [], [], []

    def add_segment(left, right, slot, weight_total):
        n = int(min(400, max(1, math.ceil((right - left) * rate / 4.0))))
        edges = np.linspace(left, right, n + 1)
        a.append(edges[:-1])
        b.append(edges[1:])
        owner.append(np.full(n, slot))
        share.append(np.full(n, weight_total / n))

    q0 = w.q_eff
    mapped = q0 < 0
    mapped_slot = npieces
    power = 1.0 / (1.0 + q0)
    first = grid[0]
    if mapped:
        cut = min(first, 1.0)
        u_hi = cut ** (1.0 + q0)
        a.append(np.array([0.0]))
        b.append(np.array([u_hi]))
        owner.append(np.array([mapped_slot]))
        share.append(np.array([0.5 if first > cut else 1.0]))
        if first > cut:
            add_segment(cut, first, 0, 0.5)
    else:
        add_segment(0.0, first, 0, 1.0)
    for j in range(1, npieces):
        add_segment(lo[j], grid[j], j, 1.0)

    a = np.concatenate(a)
    b = np.concatenate(b)
    owner = np.concatenate(owner)
    share = np.concatenate(share)
    slot_scale = np.concatenate([scale, [scale[0]]])

    def func(t, own):
        out = np.empty_like(t)
        reg = own != mapped_slot
        if np.any(reg):
            out[reg] = np.exp(_log_integrand(t[reg], mu, gamma, w) - slot_scale[own[reg]])
        if not np.all(reg):
            u = t[~reg]
            log_t = power * np.log(u)
            tt = np.exp(log_t)
            lf = _log_integrand(tt, mu, gamma, w) - q0 * log_t
            out[~reg] = power * np.exp(lf - scale[0])
        return out

    vals, errs = integrate_panels(func, a, b, owner, share, npieces + 1, rtol)
    vals[0] += vals[mapped_slot]
    errs[0] += errs[mapped_slot]
    vals, errs = vals[:npieces], errs[:npieces]
    if np.any(vals <= 0):
        raise DomainError("integrand produced a nonpositive piece")
    log_piece = np.log(vals) + scale
    log_cum = np.logaddexp.accumulate(log_piece)
    log_err_piece = np.log(np.maximum(errs, 1e-300)) + scale
    log_cum_err = np.logaddexp.accumulate(log_err_piece)
    relerr = np.exp(log_cum_err - log_cum)
    idx = np.searchsorted(grid, x)
    return log_cum[idx], relerr[idx]


def tilted_integral_quadrature(x, p: Params, w: WeightSpec = None, rtol=QUAD_RTOL) -> IntegralResult:
    """Tilted integral by adaptive Gauss-Kronrod quadrature (any weight).

    For a weight singular at the origin (exponent q < 0) the first panel is
    integrated in ``u = t^(1+q)``, which removes the singularity.  Each piece
    between consecutive upper limits is scaled by the integrand at its right
    end, so large x never overflows.

    Raises QuadratureError if ``rtol`` is not reached.
    """
    w = _resolve(p, w)
    xa = _positive_x(x)
    logv, relerr = _log_quadrature(np.atleast_1d(xa).ravel(), p.mu, p.gamma, w, rtol)
    return _package(xa, logv, relerr, p.gamma, "quadrature")


def log_tilted_integral(x, p: Params, w: WeightSpec = None, method="auto"):
    """log F(x), choosing the series route whenever it applies."""
    w = _resolve(p, w)
    xa = _positive_x(x)
    flat = np.atleast_1d(xa).ravel()
    if method == "auto":
        method = "series" if w.series_ok else "quadrature"
    if method == "series":
        logv, _ = _log_series(flat, p.mu, p.gamma, w)
    elif method == "quadrature":
        logv, _ = _log_quadrature(flat, p.mu, p.gamma, w, QUAD_RTOL)
    else:
        raise DomainError(f"unknown method {method!r}")
    return logv.reshape(xa.shape) if xa.ndim else float(logv[0])


def log_endpoint_scale(x, mu, gamma, w, order=None):
    """log of ``exp(-gamma x) w(x) x^-mu I_order(x)`` (order defaults to mu+1)."""
    xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    order = mu + 1.0 if order is None else order
    lb, _, _ = _log_besseli(order, xa)
    return -gamma * xa + w.log_value(xa) + lb - mu * np.log(xa)


def endpoint_quotient(x, p: Params, w: WeightSpec = None, method="auto", order=None):
    """``F(x) / (exp(-gamma x) w(x) x^-mu I_{mu+1}(x))``.

    All exponential factors cancel in log form before exponentiation.
    ``order`` replaces the endpoint order mu+1 (used for the endpoint-order
    questions).
    """
    w = _resolve(p, w)
    xa = _positive_x(x)
    flat = np.atleast_1d(xa).ravel()
    logf = np.atleast_1d(log_tilted_integral(flat, p, w, method))
    out = np.exp(logf - log_endpoint_scale(flat, p.mu, p.gamma, w, order))
    return out.reshape(xa.shape) if xa.ndim else float(out[0])
