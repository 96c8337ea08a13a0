"""Weight descriptors and numerical class-membership checks.

A weight is always handled through ``log_value`` so that large powers and
exponential factors stay representable.  Four kinds are supported:

``pure_power``      ``w(t) = t^q``
``power_monotone``  ``w(t) = t^q L(t)`` with ``L`` positive and nondecreasing
``approx_power``    ``w(t) = t^q exp(-eta t) L(t)`` (``L`` optional)
``mixture``         ``w(t) = sum_j c_j t^(q_j)``
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError

KINDS = ("pure_power", "power_monotone", "approx_power", "mixture")
CLAIMS = ("upper_q", "lower_q", "approx_q_eta")


@dataclass(frozen=True)
class MonotoneFactor:
    """A positive amplitude ``L(t)``.

    Either a sampled table (``knots``/``values``, interpolated piecewise
    linearly and held constant outside the table) or a vectorised callable.
    ``name`` is used in report descriptors.
    """

    name: str
    knots: Optional[tuple] = None
    values: Optional[tuple] = None
    func: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if (self.func is None) == (self.knots is None):
            raise DomainError("factor needs exactly one of a table or a callable")
        if self.knots is not None:
            k = np.asarray(self.knots, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if k.ndim != 1 or k.shape != v.shape or k.size < 1:
                raise DomainError("factor table must be two equal-length 1-d sequences")
            if np.any(np.diff(k) <= 0) or np.any(k <= 0):
                raise DomainError("factor knots must be positive and strictly increasing")
            if np.any(v <= 0):
                raise DomainError("factor values must be positive")

    @classmethod
    def from_samples(cls, knots, values, name="table"):
        return cls(name, knots=tuple(map(float, knots)), values=tuple(map(float, values)))

    @classmethod
    def from_function(cls, func, name):
        return cls(name, func=func)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.func is not None:
            return np.asarray(self.func(t), dtype=float)
        return np.interp(t, self.knots, self.values)

    def is_nondecreasing(self, grid=None):
        """Check monotonicity of the samples (or of the callable on ``grid``)."""
        if self.knots is not None:
            return bool(np.all(np.diff(self.values) >= 0))
        if grid is None:
            grid = np.geomspace(1e-6, 1e3, 400)
        v = self(np.sort(np.asarray(grid, dtype=float)))
        return bool(np.all(v > 0) and np.all(np.diff(v) >= 0))

    @property
    def breakpoints(self):
        return () if self.knots is None else self.knots


@dataclass(frozen=True)
class WeightSpec:
    kind: str
    q: float
    eta: float = 0.0
    factor: Optional[MonotoneFactor] = None
    terms: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown weight kind {self.kind!r}")
        if self.kind == "mixture":
            if not self.terms:
                raise DomainError("mixture needs at least one (c, q) term")
            for c, qj in self.terms:
                if not c > 0:
                    raise DomainError(f"mixture coefficients must be positive (c={c})")
                if not qj > -1:
                    raise DomainError(f"mixture powers must satisfy q_j > -1 (q_j={qj})")
        elif not self.q > -1:
            raise DomainError(f"requires q > -1 (q={self.q})")
        if self.eta < 0:
            raise DomainError(f"requires eta >= 0 (eta={self.eta})")
        if self.kind == "power_monotone":
            if self.factor is None:
                raise DomainError("power_monotone weight needs a factor")
            if not self.factor.is_nondecreasing():
                raise DomainError("power_monotone factor must be nondecreasing")

    @property
    def q_eff(self):
        """Exponent of the weight at the origin."""
        if self.kind == "mixture":
            return min(qj for _, qj in self.terms)
        return self.q

    @property
    def breakpoints(self):
        return self.factor.breakpoints if self.factor is not None else ()

    @property
    def series_ok(self):
        """Whether the term-wise series integrator applies."""
        return self.kind in ("pure_power", "mixture") or (
            self.kind == "approx_power" and self.factor is None
        )

    def log_value(self, t):
        t = np.asarray(t, dtype=float)
        lt = np.log(t)
        if self.kind == "mixture":
            parts = np.array([math.log(c) + qj * lt for c, qj in self.terms])
            m = parts.max(axis=0)
            return m + np.log(np.exp(parts - m).sum(axis=0))
        out = self.q * lt
        if self.eta:
            out = out - self.eta * t
        if self.factor is not None:
            out = out + np.log(self.factor(t))
        return out

    def __call__(self, t):
        return np.exp(self.log_value(t))

    def descriptor(self):
        """Short stable text label used in reports."""
        if self.kind == "pure_power":
            return f"pure(q={self.q:g})"
        if self.kind == "mixture":
            inner = "+".join(f"{c:g}*t^{qj:g}" for c, qj in self.terms)
            return f"mixture({inner})"
        parts = [f"q={self.q:g}"]
        if self.eta:
            parts.append(f"eta={self.eta:g}")
        if self.factor is not None:
            parts.append(f"L={self.factor.name}")
        return f"{self.kind}({','.join(parts)})"


def pure_power(q):
    return WeightSpec("pure_power", float(q))


def power_monotone(q, factor):
    return WeightSpec("power_monotone", float(q), factor=factor)


def approx_power(q, eta, factor=None):
    return WeightSpec("approx_power", float(q), eta=float(eta), factor=factor)


def mixture(terms: Sequence):
    terms = tuple((float(c), float(qj)) for c, qj in terms)
    return WeightSpec("mixture", min(qj for _, qj in terms), terms=terms)


@dataclass(frozen=True)
class ClassCheck:
    passed: bool
    worst_margin: float
    worst_pair: tuple


def weight_class_check(w, claim, grid, q=None, eta=None, tol=1e-12):
    """Check a weight-class inequality on every ordered pair ``t <= x`` of ``grid``.

    Claims (all in log form, margin = log(rhs) - log(lhs)):

    ``upper_q``       ``w(t)/w(x) <= (t/x)^q``
    ``lower_q``       ``w(t)/w(x) >= (t/x)^q``
    ``approx_q_eta``  ``w(t)/t^q <= exp(eta (x - t)) w(x)/x^q``

    ``q`` and ``eta`` default to the weight's own parameters.  The check
    passes when the worst margin is at least ``-tol`` times the size of the
    compared logs.
    """
    if claim not in CLAIMS:
        raise DomainError(f"unknown claim {claim!r}; expected one of {CLAIMS}")
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 2 or np.any(g <= 0) or np.any(np.diff(g) < 0):
        raise DomainError("grid must be a sorted 1-d array of positive values")
    q = w.q if q is None else q
    eta = w.eta if eta is None else eta
    lw = w.log_value(g)
    lg = np.log(g)
    # v(t) = log w(t) - q log t; every claim compares v at t <= x
    v = lw - q * lg
    i, j = np.triu_indices(g.size, k=1)
    dv = v[i] - v[j]
    if claim == "upper_q":
        margin = -dv
    elif claim == "lower_q":
        margin = dv
    else:
        margin = eta * (g[j] - g[i]) - dv
    size = 1.0 + np.abs(v[i]) + np.abs(v[j]) + eta * g[j]
    rel = margin / size
    k = int(np.argmin(rel))
    return ClassCheck(bool(rel[k] >= -tol), float(margin[k]), (float(g[i[k]]), float(g[j[k]])))


def rho_average_check(rho, eta, grid, tol=1e-12):
    """Check ``int_t^x rho(s) ds <= eta (x - t)`` for all grid pairs.

    The integral is taken by the trapezoid rule on ``grid``; the result is
    the worst margin ``eta (x - t) - int_t^x rho``.
    """
    g = np.asarray(grid, dtype=float)
    r = np.asarray(rho(g), dtype=float)
    if np.any(r < 0):
        return ClassCheck(False, float(r.min()), (float(g[np.argmin(r)]),) * 2)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (r[1:] + r[:-1]) * np.diff(g))])
    i, j = np.triu_indices(g.size, k=1)
    margin = eta * (g[j] - g[i]) - (cum[j] - cum[i])
    k = int(np.argmin(margin))
    scale = 1.0 + eta * g[-1]
    return ClassCheck(bool(margin[k] >= -tol * scale), float(margin[k]), (float(g[i[k]]), float(g[j[k]])))
