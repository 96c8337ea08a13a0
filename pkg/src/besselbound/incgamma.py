"""Lower incomplete gamma function in log form.

The series is used for ``z < s + 1`` and the Lentz continued fraction of the
upper function otherwise (the usual split, see Numerical Recipes 6.2).  All
routines broadcast over numpy arrays.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .errors import ConvergenceError, DomainError

MAX_ITER = 20000
RTOL = 1e-17
_FPMIN = 1e-300


def _log_series_sum(s, z):
    """log of sum_{n>=0} z^n / (s (s+1) ... (s+n))."""
    term = 1.0 / s
    total = term.copy()
    active = np.arange(s.size)
    n = 0
    while active.size:
        n += 1
        if n > MAX_ITER:
            raise ConvergenceError("incomplete gamma series did not converge")
        t = term[active] * z[active] / (s[active] + n)
        term[active] = t
        total[active] += t
        active = active[t > RTOL * total[active]]
    return np.log(total)


def _log_upper_cf(s, z):
    """log of the continued fraction h with Gamma(s, z) = e^-z z^s h."""
    b = z + 1.0 - s
    c = np.full_like(z, 1.0 / _FPMIN)
    d = 1.0 / b
    h = d.copy()
    active = np.arange(s.size)
    i = 0
    while active.size:
        i += 1
        if i > MAX_ITER:
            raise ConvergenceError("incomplete gamma continued fraction did not converge")
        sa = s[active]
        an = -i * (i - sa)
        b[active] += 2.0
        ba = b[active]
        dd = an * d[active] + ba
        dd = np.where(np.abs(dd) < _FPMIN, _FPMIN, dd)
        cc = ba + an / c[active]
        cc = np.where(np.abs(cc) < _FPMIN, _FPMIN, cc)
        dd = 1.0 / dd
        delta = dd * cc
        d[active] = dd
        c[active] = cc
        h[active] *= delta
        active = active[np.abs(delta - 1.0) > 4e-16]
    return np.log(h)


def _prepare(s, z):
    s, z = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(z, dtype=float))
    if np.any(~(s > 0)):
        raise DomainError("requires s > 0")
    if np.any(~(z >= 0)) or np.any(~np.isfinite(z)):
        raise DomainError("requires finite z >= 0")
    return s.ravel().copy(), z.ravel().copy(), s.shape


def log_lower_incomplete_gamma(s, z):
    """``log(gamma_low(s, z))`` where gamma_low(s,z) = int_0^z u^(s-1) e^-u du."""
    s, z, shape = _prepare(s, z)
    out = np.full(s.shape, -np.inf)
    pos = z > 0
    ser = pos & (z < s + 1.0)
    cf = pos & ~ser
    if np.any(ser):
        ss, zs = s[ser], z[ser]
        out[ser] = ss * np.log(zs) - zs + _log_series_sum(ss, zs)
    if np.any(cf):
        sc, zc = s[cf], z[cf]
        lg = gammaln(sc)
        log_upper = sc * np.log(zc) - zc + _log_upper_cf(sc, zc)
        out[cf] = lg + np.log1p(-np.exp(log_upper - lg))
    return out.reshape(shape) if shape else float(out[0])


def lower_incomplete_gamma(s, z):
    """Lower incomplete gamma ``int_0^z u^(s-1) e^-u du`` (not regularised)."""
    lv = log_lower_incomplete_gamma(s, z)
    with np.errstate(over="raise"):
        try:
            out = np.exp(lv)
        except FloatingPointError as exc:
            raise OverflowError("lower incomplete gamma overflows a double") from exc
    return out if np.ndim(out) else float(out)


def log_tilted_power_integral(s, gamma, x):
    """``log int_0^x exp(-gamma t) t^(s-1) dt`` for s > 0, gamma >= 0, x > 0.

    For gamma > 0 this is ``gamma^-s * gamma_low(s, gamma x)``; the powers of
    gamma are cancelled analytically on the series branch.
    """
    s, x = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(x, dtype=float))
    shape = s.shape
    s = s.ravel()
    x = x.ravel()
    if np.any(~(x > 0)):
        raise DomainError("requires x > 0")
    if gamma < 0:
        raise DomainError("requires gamma >= 0")
    if gamma == 0:
        out = s * np.log(x) - np.log(s)
        return out.reshape(shape)
    z = gamma * x
    out = np.empty_like(s)
    ser = z < s + 1.0
    if np.any(ser):
        ss, zs = s[ser], z[ser]
        out[ser] = ss * np.log(x[ser]) - zs + _log_series_sum(ss, zs)
    cf = ~ser
    if np.any(cf):
        sc, zc = s[cf], z[cf]
        lg = gammaln(sc)
        log_upper = sc * np.log(zc) - zc + _log_upper_cf(sc, zc)
        out[cf] = -sc * math.log(gamma) + lg + np.log1p(-np.exp(log_upper - lg))
    return out.reshape(shape)
