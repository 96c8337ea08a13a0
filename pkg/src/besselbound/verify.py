"""Numerical certification suites, one per inequality or monotonicity result.

Each suite samples its inequality on a parameter grid and a log grid of x
and returns one :class:`VerificationRecord` per parameter combination.  The
margin convention is uniform: ``worst_margin`` is the smallest relative
slack found (positive means the inequality held with room to spare), and a
record passes when ``worst_margin >= -tol``.

Suite identifiers follow ``<topic>_<section>_<item>``; the numeric suffixes
are part of the report format and are kept stable.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import constants as C
from .bessel import bessel_ratio, log_besseli, log_besseli_pow, ratio_lower_bound
from .errors import DomainError, FixtureError
from .integral import log_endpoint_scale, log_tilted_integral
from .params import Params, default_theta
from .sharp import expansion_coeffs, fit_expansion_check, sharp_constant, stationary_value
from .weights import (
    MonotoneFactor,
    WeightSpec,
    approx_power,
    mixture,
    power_monotone,
    pure_power,
    weight_class_check,
)

DEFAULT_TOL = 1e-9
REPORT_KEYS = (
    "suite_id", "mu", "q", "gamma", "theta", "eta", "n", "a", "kappa", "weight",
    "n_points", "worst_margin", "worst_x", "passed", "runtime_ms",
)
# validation grid for weight fixtures
CLASS_GRID = np.geomspace(1e-4, 1e3, 120)


@dataclass(frozen=True)
class GridSpec:
    """Parameter and x grids for a verification run.

    ``theta_rule`` is ``"standard"`` (the three values ``(1+gamma)/2``,
    ``gamma+0.05`` and ``0.97``), ``"default"`` (``(1+gamma)/2`` only) or an
    explicit tuple.  Values outside a suite's admissible theta range are
    skipped for that suite.
    """

    mu_list: tuple
    q_list: tuple
    gamma_list: tuple
    theta_rule: object = "standard"
    x_lo: float = 1e-5
    x_hi: float = 500.0
    x_count: int = 60
    density: str = "fast"

    def __post_init__(self):
        if self.density not in ("fast", "dense"):
            raise DomainError(f"density must be 'fast' or 'dense' (got {self.density!r})")
        for mu in self.mu_list:
            if not mu > -1:
                raise DomainError(f"grid requires mu > -1 (mu={mu})")
        for q in self.q_list:
            if not q > -1:
                raise DomainError(f"grid requires q > -1 (q={q})")
        for g in self.gamma_list:
            if not 0 < g < 1:
                raise DomainError(f"grid requires 0 < gamma < 1 (gamma={g})")
        if not 0 < self.x_lo < self.x_hi or self.x_count < 2:
            raise DomainError("grid requires 0 < x_lo < x_hi and at least two x points")
        if not isinstance(self.theta_rule, str):
            for th in self.theta_rule:
                if not 0 < th < 1:
                    raise DomainError(f"grid requires 0 < theta < 1 (theta={th})")
        elif self.theta_rule not in ("standard", "default"):
            raise DomainError(f"unknown theta rule {self.theta_rule!r}")

    @classmethod
    def fast(cls):
        return cls((-0.5, 0.0, 1.0, 3.0), (-0.5, 0.0, 1.0, 3.0), (0.1, 0.5, 0.9))

    @classmethod
    def dense(cls):
        return cls(
            (-0.9, -0.5, -0.25, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0),
            (-0.9, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0),
            (0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95),
            x_count=200,
            density="dense",
        )

    @classmethod
    def named(cls, name):
        if name == "fast":
            return cls.fast()
        if name == "dense":
            return cls.dense()
        raise DomainError(f"unknown grid {name!r}; expected 'fast' or 'dense'")

    def x_values(self):
        return np.geomspace(self.x_lo, self.x_hi, self.x_count)

    def thetas(self, gamma, floor=None):
        """Theta values for tilt ``gamma``; ``floor`` (default gamma) is the
        exclusive lower end of the admissible range."""
        floor = gamma if floor is None else floor
        if self.theta_rule == "default":
            cand = [default_theta(floor)]
        elif self.theta_rule == "standard":
            cand = [default_theta(floor), floor + 0.05, 0.97]
        else:
            cand = list(self.theta_rule)
        out = []
        for th in cand:
            if floor < th < 1 and all(abs(th - o) > 1e-12 for o in out):
                out.append(th)
        return out


@dataclass(frozen=True)
class VerificationRecord:
    suite_id: str
    n_points: int
    worst_margin: float
    worst_x: Optional[float]
    passed: bool
    mu: Optional[float] = None
    q: Optional[float] = None
    gamma: Optional[float] = None
    theta: Optional[float] = None
    eta: Optional[float] = None
    n: Optional[float] = None
    a: Optional[float] = None
    kappa: Optional[float] = None
    weight: Optional[str] = None
    runtime_ms: Optional[int] = field(default=None, compare=False)

    def sort_key(self):
        def k(v):
            return (0, 0) if v is None else (1, v)

        return (
            self.suite_id, k(self.mu), k(self.q), k(self.gamma), k(self.theta), k(self.eta),
            k(self.n), k(self.a), k(self.kappa), k(self.weight),
        )

    def as_dict(self, timings=False):
        d = {key: getattr(self, key) for key in REPORT_KEYS}
        if not timings:
            d["runtime_ms"] = None
        return d


def format_scalar(v):
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return "null"
        return format(v, ".17g")
    s = str(v).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def emit_report(records, timings=False):
    """Serialise records as newline-delimited flat JSON objects.

    Ordering is by suite id and then parameters, floats carry 17 significant
    digits, and ``runtime_ms`` is written as null unless ``timings`` is set,
    so that identical runs give byte-identical reports.
    """
    records = list(records)
    if not records:
        raise DomainError("no records to report")
    lines = []
    for r in sorted(records, key=VerificationRecord.sort_key):
        d = r.as_dict(timings)
        lines.append("{" + ", ".join(f'"{k}": {format_scalar(d[k])}' for k in REPORT_KEYS) + "}")
    return "\n".join(lines) + "\n"


def all_passed(records):
    return all(r.passed for r in records)


# ---------------------------------------------------------------- fixtures

LOG_FACTOR = MonotoneFactor.from_function(lambda t: 1.0 + np.log1p(t), "1+ln(1+x)")
BOUNDED_FACTOR = MonotoneFactor.from_function(lambda t: 2.0 - 1.0 / (1.0 + t), "2-1/(1+x)")


def weight_fixture(kind, q=0.0, eta=0.0, terms=None, claim=None):
    """Weight used by the suites, re-validated against its class claim.

    kinds: ``pure``, ``log_factor``, ``bounded_factor``, ``exp_defect``
    (``x^q exp(-eta x)``), ``exp_defect_log`` (``x^q exp(-eta x)(1+ln(1+x))``),
    ``mixture`` (``terms`` of (c, q)) and ``lower_mixture``
    (``x^q + x^(q-0.4)``, a lower q-power weight).

    Raises FixtureError when the weight fails its claimed class on the
    validation grid.
    """
    if kind == "pure":
        w, default_claim = pure_power(q), "upper_q"
    elif kind == "log_factor":
        w, default_claim = power_monotone(q, LOG_FACTOR), "upper_q"
    elif kind == "bounded_factor":
        w, default_claim = power_monotone(q, BOUNDED_FACTOR), "upper_q"
    elif kind == "exp_defect":
        w, default_claim = approx_power(q, eta), "approx_q_eta"
    elif kind == "exp_defect_log":
        w, default_claim = approx_power(q, eta, LOG_FACTOR), "approx_q_eta"
    elif kind == "mixture":
        if not terms:
            raise DomainError("mixture fixture needs terms")
        w, default_claim = mixture(terms), "upper_q"
        q = min(qj for _, qj in w.terms)
    elif kind == "lower_mixture":
        if not q - 0.4 > -1:
            raise DomainError(f"lower_mixture needs q - 0.4 > -1 (q={q})")
        w, default_claim = mixture([(1.0, q), (1.0, q - 0.4)]), "lower_q"
    else:
        raise DomainError(f"unknown fixture kind {kind!r}")
    claim = claim or default_claim
    chk = weight_class_check(w, claim, CLASS_GRID, q=q, eta=eta)
    if not chk.passed:
        raise FixtureError(
            f"fixture {kind} (q={q}, eta={eta}) fails {claim}: margin {chk.worst_margin:g} "
            f"at {chk.worst_pair}"
        )
    return w


# ---------------------------------------------------------------- run state


class _Run:
    """Per-run caches so that suites sharing a quotient compute it once."""

    def __init__(self, grid: GridSpec, tol):
        self.grid = grid
        self.tol = tol
        self.xs = grid.x_values()
        self._log_f = {}
        self._sharp = {}

    def log_f(self, mu, q, gamma, w):
        key = (mu, gamma, w.descriptor())
        if key not in self._log_f:
            self._log_f[key] = log_tilted_integral(self.xs, Params(mu, q, gamma), w)
        return self._log_f[key]

    def quotient(self, mu, q, gamma, w=None, order=None):
        """Endpoint quotient on the run's x grid (pure power t^q by default)."""
        w = pure_power(q) if w is None else w
        return np.exp(self.log_f(mu, q, gamma, w) - log_endpoint_scale(self.xs, mu, gamma, w, order))

    def sharp(self, mu, q, gamma):
        key = (mu, q, gamma)
        if key not in self._sharp:
            self._sharp[key] = sharp_constant(Params(mu, q, gamma))
        return self._sharp[key]


def _rel_slack_upper(values, bound):
    """(bound - value) / bound, with an infinite bound giving slack 1."""
    if not math.isfinite(bound):
        return np.ones_like(values)
    return (bound - values) / bound


def _record(run, suite, margins, xs, tol=None, strict=False, t0=None, **params):
    margins = np.atleast_1d(np.asarray(margins, dtype=float))
    if np.any(np.isnan(margins)):
        k = int(np.argmax(np.isnan(margins)))
        worst = math.nan
    else:
        k = int(np.argmin(margins))
        worst = float(margins[k])
    tol = run.tol if tol is None else tol
    if math.isnan(worst):
        passed = False
    else:
        passed = worst > 0 if strict else worst >= -tol
    wx = None if xs is None else float(np.atleast_1d(xs)[k])
    ms = None if t0 is None else int(round(1000 * (time.perf_counter() - t0)))
    for key in ("mu", "q", "gamma", "theta", "eta", "n", "a", "kappa"):
        if params.get(key) is not None:
            params[key] = float(params[key])
    return VerificationRecord(
        suite_id=suite, n_points=int(margins.size), worst_margin=worst, worst_x=wx,
        passed=bool(passed), runtime_ms=ms, **params,
    )


def _bound_suite(run, suite, mu, q, gamma, w, bound_fn, thetas, eta=None, order=None, **extra):
    """One record per theta for ``quotient <= bound_fn(theta)``."""
    out = []
    t0 = time.perf_counter()
    R = run.quotient(mu, q, gamma, w, order)
    for th in thetas:
        m = _rel_slack_upper(R, bound_fn(th))
        out.append(_record(run, suite, m, run.xs, t0=t0, mu=mu, q=q, gamma=gamma, theta=th,
                           eta=eta, weight=w.descriptor(), **extra))
        t0 = time.perf_counter()
    return out


# ---------------------------------------------------------------- suites


def _suite_ratio(run):
    xs = np.geomspace(1e-4, 500.0, 200)
    out = []
    for alpha in (-0.9, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0, 10.0):
        t0 = time.perf_counter()
        r = bessel_ratio(alpha, xs)
        m = (r - ratio_lower_bound(alpha, xs)) / r
        if alpha >= -0.5:
            m = np.minimum(m, 1.0 - r)
        out.append(_record(run, "ratio_2_1", m, xs, t0=t0, mu=alpha))
    return out


def _suite_power(run):
    out = []
    for mu in run.grid.mu_list:
        for q in run.grid.q_list:
            t0 = time.perf_counter()
            R = run.quotient(mu, q, 0.0)
            K, L = C.k_const(mu, q), C.l_const(mu, q)
            m = np.minimum((K - R) / K, (R - L) / L)
            out.append(_record(run, "power_2_2", m, run.xs, t0=t0, mu=mu, q=q, gamma=0.0,
                               weight=pure_power(q).descriptor()))
    return out


# Order monotonicity is checked on [0, inf) plus the pair (-1/2, 1/2).
# It does not extend to all of [-1/2, 0): I_0(x) > I_{-1/2}(x) for x > ~0.8.
MONOTONE_ORDER_PAIRS = ((-0.5, 0.5), (0.0, 0.25), (0.25, 0.5), (0.5, 1.0), (1.0, 2.0),
                        (2.0, 5.0), (5.0, 10.0))


def _suite_order_monotone(run):
    xs = np.geomspace(1e-4, 500.0, 200)
    out = []
    for a1, a2 in MONOTONE_ORDER_PAIRS:
        t0 = time.perf_counter()
        m = -np.expm1(log_besseli(a2, xs) - log_besseli(a1, xs))
        out.append(_record(run, "order_monotone_5_3", m, xs, t0=t0, mu=a1, kappa=a2 - a1))
    return out


def _growth_margins(mu, q, theta):
    """Margins of the three ratio comparisons and of the exponential growth
    bounds for Y and Z on sampled pairs X <= t < x."""
    X = C.threshold(mu, q, theta)
    beta = C.beta_val(mu, q, theta)
    xs = X * np.geomspace(1.0, 60.0, 30)
    r0 = bessel_ratio(mu, xs)
    r1 = bessel_ratio(mu + 1.0, xs)
    m_ratio = np.minimum.reduce([
        (r0 + q / xs - theta) / theta,
        (r1 + (q + 1.0) / xs - theta) / theta,
        (r0 - beta) / beta,
    ])
    log_y = log_besseli_pow(mu, xs) + q * np.log(xs)
    log_z = log_besseli(mu + 1.0, xs) + (q - mu) * np.log(xs)
    i, j = np.triu_indices(xs.size, k=1)
    gap = theta * (xs[j] - xs[i])
    # log Y(t) - log Y(x) + theta (x - t) <= 0, scaled by the size of the terms
    scale = 1.0 + gap
    m_y = -(log_y[i] - log_y[j] + gap) / scale
    m_z = -(log_z[i] - log_z[j] + gap) / scale
    pair_m = np.minimum(m_y, m_z)
    pair_x = xs[j]
    return np.concatenate([m_ratio, pair_m]), np.concatenate([xs, pair_x])


def _suite_main(run):
    out = []
    g = run.grid
    for mu in g.mu_list:
        for q in g.q_list:
            w = weight_fixture("pure", q)
            for gamma in g.gamma_list:
                out += _bound_suite(run, "main_3_2", mu, q, gamma, w,
                                    lambda th: C.M_value(mu, q, gamma, th), g.thetas(gamma))
            # growth comparison, independent of gamma
            thetas = sorted({th for gamma in g.gamma_list for th in g.thetas(gamma)})
            for th in thetas:
                t0 = time.perf_counter()
                m, xs = _growth_margins(mu, q, th)
                out.append(_record(run, "main_3_2", m, xs, t0=t0, mu=mu, q=q, theta=th,
                                   weight="growth_bound"))
    return out


def approx_eta(gamma):
    """Weight defect used by the approximate-class suites."""
    return 0.3 * (1.0 - gamma)


def _suite_approx(run):
    out = []
    g = run.grid
    for mu in g.mu_list:
        for q in g.q_list:
            for gamma in g.gamma_list:
                eta = approx_eta(gamma)
                w = weight_fixture("exp_defect", q, eta)

                def bound(th, mu=mu, q=q, gamma=gamma, eta=eta):
                    return C.approx_constant(Params(mu, q, gamma, th, eta)).M

                out += _bound_suite(run, "approx_3_5", mu, q, gamma, w, bound,
                                    g.thetas(gamma, gamma + eta), eta=eta)
    return out


LOWER_TOL = 1e-12


def _suite_lower(run):
    out = []
    g = run.grid
    for mu in g.mu_list:
        for q in g.q_list:
            L = C.l_const(mu, q)
            # the second mixture power q - 0.4 must itself exceed -1
            kinds = ("pure", "lower_mixture") if q - 0.4 > -1 else ("pure",)
            for kind in kinds:
                w = weight_fixture(kind, q, claim="lower_q")
                for gamma in (0.0,) + tuple(g.gamma_list):
                    t0 = time.perf_counter()
                    R = run.quotient(mu, q, gamma, w)
                    out.append(_record(run, "lower_4_2", (R - L) / L, run.xs, tol=LOWER_TOL, t0=t0,
                                       mu=mu, q=q, gamma=gamma, weight=w.descriptor()))
    return out


def _suite_two_sided(run):
    out = []
    g = run.grid
    for mu in g.mu_list:
        for q in g.q_list:
            L = C.l_const(mu, q)
            for gamma in g.gamma_list:
                t0 = time.perf_counter()
                R = run.quotient(mu, q, gamma)
                low = (R - L) / L
                for th in g.thetas(gamma):
                    m = np.minimum(low, _rel_slack_upper(R, C.M_value(mu, q, gamma, th)))
                    out.append(_record(run, "two_sided_4_3", m, run.xs, t0=t0, mu=mu, q=q,
                                       gamma=gamma, theta=th, weight=pure_power(q).descriptor()))
                    t0 = time.perf_counter()
    return out


def _shift_grid(run, a_values):
    nus = (-0.4, 0.0, 1.0) if run.grid.density == "fast" else (-0.9, -0.4, 0.0, 0.5, 1.0, 3.0)
    ns = (0.0, 1.0, 2.5) if run.grid.density == "fast" else (-0.5, 0.0, 1.0, 2.5, 4.0)
    for nu in nus:
        for n in ns:
            for a in a_values:
                if nu + n > -1 and a + n > -1:
                    yield nu, n, a


def _shifted_like(run, suite, a_values, order_offsets=(None,)):
    out = []
    g = run.grid
    for nu, n, a in _shift_grid(run, a_values):
        mu, q = nu + n, a + n
        for k in order_offsets:
            if k is not None and not C.endpoint_order_admissible(mu, k):
                continue
            order = None if k is None else mu + k
            for gamma in g.gamma_list:
                def bound(th, nu=nu, n=n, a=a, gamma=gamma):
                    return C.shifted_constant(nu, n, a, gamma, th).M

                out += _bound_suite(run, suite, mu, q, gamma, pure_power(q), bound,
                                    g.thetas(gamma), order=order, n=n, a=a, kappa=k)
    return out


def _suite_shifted(run):
    return _shifted_like(run, "shifted_5_1", (-0.5, 0.0, 1.0))


def _suite_moment(run):
    out = []
    g = run.grid
    for nu in g.mu_list:
        for m in g.q_list:
            for gamma in g.gamma_list:
                out += _bound_suite(run, "moment_5_2", nu, m, gamma, pure_power(m),
                                    lambda th, nu=nu, m=m, gamma=gamma: C.M_value(nu, m, gamma, th),
                                    [default_theta(gamma)], n=0.0, a=m)
    return out


SLOPE_WINDOW = (1e-5, 1e-3)
SLOPE_TOL = 0.05


def endpoint_order_slope(mu, q, gamma, kappa, n=20):
    """Small-x log-log slope of the quotient with an I_{mu+kappa} endpoint."""
    xs = np.geomspace(*SLOPE_WINDOW, n)
    p = Params(mu, q, gamma)
    w = pure_power(q)
    lq = log_tilted_integral(xs, p, w) - log_endpoint_scale(xs, mu, gamma, w, mu + kappa)
    return float(np.polyfit(np.log(xs), lq, 1)[0])


def _suite_endpoint_order_i(run):
    out = []
    g = run.grid
    for mu in g.mu_list:
        for q in g.q_list:
            for gamma in g.gamma_list:
                for kappa in (1.25, 1.5, 2.0):
                    t0 = time.perf_counter()
                    slope = endpoint_order_slope(mu, q, gamma, kappa)
                    m = SLOPE_TOL - abs(slope - (1.0 - kappa))
                    out.append(_record(run, "endpoint_order_5_4i", m, [SLOPE_WINDOW[0]], tol=0.0,
                                       t0=t0, mu=mu, q=q, gamma=gamma, kappa=kappa,
                                       weight=pure_power(q).descriptor()))
    return out


def _suite_endpoint_order_ii(run):
    out = []
    g = run.grid
    for mu in g.mu_list:
        for q in g.q_list:
            for kappa in (-0.25, 0.25, 0.75, 1.0):
                if not C.endpoint_order_admissible(mu, kappa):
                    continue
                for gamma in g.gamma_list:
                    out += _bound_suite(run, "endpoint_order_5_4ii", mu, q, gamma, pure_power(q),
                                        lambda th, mu=mu, q=q, gamma=gamma: C.M_value(mu, q, gamma, th),
                                        g.thetas(gamma), order=mu + kappa, kappa=kappa)
    return out


def _suite_shifted_endpoint(run):
    return _shifted_like(run, "shifted_endpoint_5_5", (0.0, 1.0), order_offsets=(-0.5, 0.5, 1.0))


LIMIT0_X, LIMIT0_RTOL = 1e-4, 3e-4
LIMITINF_X, LIMITINF_RTOL = 300.0, 2e-2
# smallest (1 - gamma) x at which the infinity limit is sampled
LIMITINF_SCALED = 150.0


def limit_inf_point(gamma):
    """Sampling point for the limit at infinity: 300, moved out to
    (1 - gamma) x = 150 when gamma is large (the expansion is in 1/((1-gamma) x))."""
    return max(LIMITINF_X, LIMITINF_SCALED / (1.0 - gamma))


def _suite_limits(run):
    """Endpoint limits near zero and at large x.

    The declared tolerances (3e-4 and 2e-2 relative) are widened by the size
    of the first expansion correction at the sampling point, so the check
    certifies the limit rather than the speed of approach.
    """
    out = []
    g = run.grid
    for mu in g.mu_list:
        for q in g.q_list:
            for gamma in g.gamma_list:
                t0 = time.perf_counter()
                xs = np.array([LIMIT0_X, limit_inf_point(gamma)])
                p = Params(mu, q, gamma)
                c = expansion_coeffs(p)
                R = np.exp(log_tilted_integral(xs, p) - log_endpoint_scale(xs, mu, gamma, pure_power(q)))
                err0 = abs(R[0] / c.limit0 - 1.0)
                allow0 = LIMIT0_RTOL + abs(c.c1_small) * LIMIT0_X
                err1 = abs(R[1] / c.limit_inf - 1.0)
                allow1 = LIMITINF_RTOL + abs(c.c1_large) / (xs[1] * c.limit_inf)
                m = np.array([allow0 - err0, allow1 - err1])
                out.append(_record(run, "limits_6_1", m, xs, t0=t0, mu=mu, q=q, gamma=gamma,
                                   weight=pure_power(q).descriptor()))
    return out


EXPANSION_DOUBLINGS = 3


def _suite_expansions(run):
    """Residual decay of both truncated expansions.

    The zero side uses [1e-4, 1e-2].  At infinity the natural expansion
    variable is 1/((1-gamma) x), so the window [100, 400] is stretched by
    1/(1-gamma) to stay in the asymptotic regime.  Each side asserts decay
    at least as fast as the first omitted order (slope tolerance 0.3).
    When the next coefficient nearly cancels, the x^-3 term dominates well
    past 400 (e.g. mu = q = 5, gamma = 1/2), so a failing infinity window is
    doubled up to EXPANSION_DOUBLINGS times before the record is judged.
    """
    out = []
    g = run.grid
    for mu in g.mu_list:
        for q in g.q_list:
            for gamma in g.gamma_list:
                p = Params(mu, q, gamma)
                lam = 1.0 - gamma
                for side in ("zero", "infinity"):
                    t0 = time.perf_counter()
                    scales = (1,) if side == "zero" else tuple(2 ** k for k in range(EXPANSION_DOUBLINGS + 1))
                    for s in scales:
                        window = None if side == "zero" else (100.0 * s / lam, 400.0 * s / lam)
                        fit = fit_expansion_check(p, side, window=window)
                        if fit.exact:
                            m = 0.3
                        elif side == "zero":
                            m = fit.slope - (fit.expected - 0.3)
                        else:
                            m = (fit.expected + 0.3) - fit.slope
                        if m >= 0:
                            break
                    out.append(_record(run, "expansions_6_2", [m], [fit.xs[0]], tol=0.0, t0=t0,
                                       mu=mu, q=q, gamma=gamma, weight=f"expansion({side})"))
    return out


def _suite_strict(run):
    out = []
    g = run.grid
    small = np.geomspace(1e-5, 1e-2, 20)
    large = np.geomspace(100.0, 500.0, 20)
    for mu in g.mu_list:
        for q in g.q_list:
            for gamma in g.gamma_list:
                t0 = time.perf_counter()
                p = Params(mu, q, gamma)
                c = expansion_coeffs(p)
                w = pure_power(q)
                Rs = np.exp(log_tilted_integral(small, p) - log_endpoint_scale(small, mu, gamma, w))
                k = int(np.argmax(Rs))
                out.append(_record(run, "strict_6_3", [Rs[k] / c.limit0 - 1.0], [small[k]],
                                   strict=True, t0=t0, mu=mu, q=q, gamma=gamma,
                                   weight="strict(zero)"))
                if q < (mu + 0.5) * (2.0 - gamma):
                    t0 = time.perf_counter()
                    Rl = np.exp(log_tilted_integral(large, p) - log_endpoint_scale(large, mu, gamma, w))
                    k = int(np.argmax(Rl))
                    out.append(_record(run, "strict_6_3", [Rl[k] / c.limit_inf - 1.0], [large[k]],
                                       strict=True, t0=t0, mu=mu, q=q, gamma=gamma,
                                       weight="strict(infinity)"))
    return out


STATIONARY_RTOL = 1e-8
DERIVATIVE_ATOL = 1e-8
SHARP_AGREE = 1e-6
# accuracy of the ratio evaluations; sets the conditioning floor below
RATIO_EPS = 1e-14


def stationary_conditioning(p, x):
    """``(sum of |terms|, |sum|)`` for the stationary denominator
    ``r_{mu+1} + (q+1)/x - gamma``, which cancels when R is large."""
    r1 = float(bessel_ratio(p.mu + 1.0, x))
    terms = abs(r1) + abs((p.q + 1.0) / x) + p.gamma
    return terms, abs(r1 + (p.q + 1.0) / x - p.gamma)


def _suite_stationary(run):
    """Stationary identity at every located root and agreement of the two
    sharp-constant estimates.  Margins are normalised slacks 1 - err/tol.

    The identity and |R'| tolerances are 1e-8, widened to RATIO_EPS times the
    conditioning of the stationary denominator when that is larger (only
    when R is in the millions, far above both limits).
    """
    from .sharp import quotient_derivative, quotient_R

    out = []
    g = run.grid
    for mu in g.mu_list:
        for q in g.q_list:
            for gamma in g.gamma_list:
                t0 = time.perf_counter()
                p = Params(mu, q, gamma)
                s = run.sharp(mu, q, gamma)
                ms, xs = [], []
                for x0 in s.stationary_xs:
                    R0 = quotient_R(p, x0)
                    terms, denom = stationary_conditioning(p, x0)
                    rtol = max(STATIONARY_RTOL, RATIO_EPS * terms / denom)
                    # R' = 1/r_mu - denom * R, so rounding in denom costs R * terms * eps
                    atol = max(DERIVATIVE_ATOL, RATIO_EPS * terms * R0)
                    ms.append(1.0 - abs(R0 - stationary_value(p, x0)) / (rtol * R0))
                    ms.append(1.0 - abs(quotient_derivative(p, x0)) / atol)
                    xs += [x0, x0]
                dis = abs(s.M_star - s.direct_estimate) / s.M_star
                ms.append(1.0 - dis / SHARP_AGREE)
                xs.append(s.direct_argmax)
                out.append(_record(run, "stationary_6_4", ms, xs, tol=0.0, t0=t0, mu=mu, q=q,
                                   gamma=gamma, weight=pure_power(q).descriptor()))
    return out


BALANCE_RTOL = 1e-10


def _suite_balance(run):
    """Balance point, optimality over sampled theta, and the sandwich
    max(limits) <= M* <= M-hat, all as slacks relative to M-hat."""
    out = []
    g = run.grid
    for mu in g.mu_list:
        for q in g.q_list:
            for gamma in g.gamma_list:
                t0 = time.perf_counter()
                opt = C.optimized_constant(mu, q, gamma)
                Mh = opt.M_hat
                a_term, c_term = C.balance_terms(mu, q, gamma, opt.gap)
                ms = [(BALANCE_RTOL * Mh - abs(a_term - c_term)) / Mh]
                thetas = gamma + (1.0 - gamma) * np.linspace(0.01, 0.99, 50)
                ms += [(C.M_value(mu, q, gamma, th) - Mh) / Mh for th in thetas]
                s = run.sharp(mu, q, gamma)
                c = expansion_coeffs(Params(mu, q, gamma))
                ms.append((Mh - s.M_star) / Mh)
                ms.append((s.M_star - max(c.limit0, c.limit_inf)) / Mh)
                out.append(_record(run, "balance_6_6", ms, None, t0=t0, mu=mu, q=q, gamma=gamma,
                                   theta=opt.theta_star,
                                   weight="extended" if opt.extended else None))
    return out


MONO_MU = (0.0, 1.0, 2.0)
MONO_Q = (0.0, 1.0, 3.0)
MONO_GAMMA = (0.1, 0.3, 0.6)


def _ordered_margins(values, increasing=True):
    v = np.asarray(values, dtype=float)
    d = np.diff(v) / np.abs(v[:-1])
    return d if increasing else -d


def _suite_constructive_monotone(run):
    out = []
    thetas = (0.8,) if run.grid.density == "fast" else (0.65, 0.8, 0.9)
    for th in thetas:
        for var, strict in (("mu", False), ("q", False), ("gamma", True)):
            t0 = time.perf_counter()
            ms = []
            for u in MONO_MU if var != "mu" else (None,):
                for v in MONO_Q if var != "q" else (None,):
                    for w in MONO_GAMMA if var != "gamma" else (None,):
                        def f(x, u=u, v=v, w=w):
                            mu = x if var == "mu" else u
                            q = x if var == "q" else v
                            gamma = x if var == "gamma" else w
                            return C.M_value(mu, q, gamma, th)

                        seq = {"mu": MONO_MU, "q": MONO_Q, "gamma": MONO_GAMMA}[var]
                        ms.append(_ordered_margins([f(x) for x in seq], increasing=var != "q"))
            out.append(_record(run, "constructive_monotone_7_1", np.concatenate(ms), None,
                               strict=strict, t0=t0, theta=th, weight=f"M_theta:{var}"))
    # optimized constant: nondecreasing in mu and gamma, nonincreasing in q
    for var in ("mu", "q", "gamma"):
        t0 = time.perf_counter()
        ms = []
        for u in MONO_MU if var != "mu" else (None,):
            for v in MONO_Q if var != "q" else (None,):
                for w in MONO_GAMMA if var != "gamma" else (None,):
                    seq = {"mu": MONO_MU, "q": MONO_Q, "gamma": MONO_GAMMA}[var]
                    vals = []
                    for x in seq:
                        mu = x if var == "mu" else u
                        q = x if var == "q" else v
                        gamma = x if var == "gamma" else w
                        vals.append(C.optimized_constant(mu, q, gamma).M_hat)
                    ms.append(_ordered_margins(vals, increasing=var != "q"))
        out.append(_record(run, "constructive_monotone_7_1", np.concatenate(ms), None, t0=t0,
                           weight=f"M_hat:{var}"))
    return out


def _suite_sharp_monotone(run):
    out = []
    g = run.grid
    qs = sorted(g.q_list)
    gs = sorted(g.gamma_list)
    for mu in g.mu_list:
        for gamma in gs:
            t0 = time.perf_counter()
            Rs = [run.quotient(mu, q, gamma) for q in qs]
            m = np.concatenate([(R1 - R2) / R1 for R1, R2 in zip(Rs[:-1], Rs[1:])])
            out.append(_record(run, "sharp_monotone_7_2", m, np.tile(run.xs, len(qs) - 1), t0=t0,
                               mu=mu, gamma=gamma, weight="pointwise:q"))
        for q in qs:
            t0 = time.perf_counter()
            Rs = [run.quotient(mu, q, gamma) for gamma in gs]
            m = np.concatenate([(R2 - R1) / R1 for R1, R2 in zip(Rs[:-1], Rs[1:])])
            out.append(_record(run, "sharp_monotone_7_2", m, np.tile(run.xs, len(gs) - 1), t0=t0,
                               mu=mu, q=q, weight="pointwise:gamma"))
        t0 = time.perf_counter()
        ms = []
        for gamma in gs:
            ms.append(_ordered_margins([run.sharp(mu, q, gamma).M_star for q in qs], increasing=False))
        for q in qs:
            ms.append(_ordered_margins([run.sharp(mu, q, gamma).M_star for gamma in gs]))
        out.append(_record(run, "sharp_monotone_7_2", np.concatenate(ms), None, t0=t0, mu=mu,
                           weight="M_star"))
    return out


BOX_SEED = 20240
BOX_COUNT = 100


def sample_boxes(count=BOX_COUNT, seed=BOX_SEED):
    """Random parameter boxes (mu0, mu1, q0, q1, gamma0, theta)."""
    rng = np.random.default_rng(seed)
    boxes = []
    for _ in range(count):
        mu0 = rng.uniform(-0.9, 2.0)
        mu1 = mu0 + rng.uniform(0.0, 1.0)
        q0 = rng.uniform(0.0, 2.0)
        q1 = q0 + rng.uniform(0.0, 2.0)
        g0 = rng.uniform(0.05, 0.8)
        th = g0 + (1.0 - g0) * rng.uniform(0.1, 0.8)
        boxes.append((mu0, mu1, q0, q1, g0, th))
    return boxes


def box_margins(box, rng, n_inner=20):
    mu0, mu1, q0, q1, g0, th = box
    top = C.M_value(mu1, q0, g0, th)
    pts = [(m, q, g) for m in (mu0, mu1) for q in (q0, q1) for g in (1e-3 * g0, g0)]
    for _ in range(n_inner):
        pts.append((rng.uniform(mu0, mu1), rng.uniform(q0, q1), rng.uniform(1e-3 * g0, g0)))
    return np.array([(top - C.M_value(m, q, g, th)) / top for m, q, g in pts])


def _suite_box(run):
    out = []
    rng = np.random.default_rng(BOX_SEED + 1)
    count = BOX_COUNT if run.grid.density == "fast" else 4 * BOX_COUNT
    for i, box in enumerate(sample_boxes(count)):
        t0 = time.perf_counter()
        m = box_margins(box, rng)
        mu0, mu1, q0, q1, g0, th = box
        out.append(_record(run, "box_7_3", m, None, t0=t0, mu=mu1, q=q0, gamma=g0, theta=th,
                           weight=f"box[{i:03d}]"))
    return out


def _mixture_terms(q):
    return [(1.0, q), (1.0, q + 1.0)]


def _suite_mixture(run):
    out = []
    g = run.grid
    families = [_mixture_terms(q) for q in g.q_list] + [[(0.5, -0.5), (1.0, 0.0), (2.0, 2.0)]]
    for mu in g.mu_list:
        for terms in families:
            w = weight_fixture("mixture", terms=terms)
            qs = [qj for _, qj in terms]
            for gamma in g.gamma_list:
                out += _bound_suite(run, "mixture_8_1", mu, min(qs), gamma, w,
                                    lambda th, mu=mu, gamma=gamma, qs=qs: C.mixture_constant(mu, gamma, th, qs),
                                    g.thetas(gamma))
    return out


def _suite_regular_variation(run):
    out = []
    g = run.grid
    for mu in g.mu_list:
        for q in g.q_list:
            for gamma in g.gamma_list:
                for kind in ("log_factor", "bounded_factor"):
                    w = weight_fixture(kind, q)
                    out += _bound_suite(run, "regular_variation_8_3", mu, q, gamma, w,
                                        lambda th, mu=mu, q=q, gamma=gamma: C.M_value(mu, q, gamma, th),
                                        g.thetas(gamma))
                eta = approx_eta(gamma)
                w = weight_fixture("exp_defect_log", q, eta)

                def bound(th, mu=mu, q=q, gamma=gamma, eta=eta):
                    return C.approx_constant(Params(mu, q, gamma, th, eta)).M

                out += _bound_suite(run, "regular_variation_8_3", mu, q, gamma, w, bound,
                                    g.thetas(gamma, gamma + eta), eta=eta)
    return out


def _suite_gaunt_family(run):
    out = []
    g = run.grid
    for nu in (-0.4, 0.0, 1.0, 3.0):
        for n in (-0.5, 0.0, 1.0, 2.0):
            if not (n > -1 and nu + n > -1):
                continue
            mu, q = nu + n, n
            for gamma in g.gamma_list:
                out += _bound_suite(run, "gaunt_family_9_1", mu, q, gamma, pure_power(q),
                                    lambda th, mu=mu, q=q, gamma=gamma: C.M_value(mu, q, gamma, th),
                                    g.thetas(gamma), n=n, a=0.0)
    return out


OPEN_NU = (-0.4, -0.1, 0.0, 1.0, 3.0, 5.0)
OPEN_GAMMA = (0.05, 0.25, 0.5, 0.75, 0.95)


def open_problem_constant(nu, gamma, theta):
    """The explicit two-term constant of the reciprocal-power Gaunt bound,
    written out independently of :mod:`constants`."""
    a = 2.0 * (nu + 1.0) * math.exp(min(700.0, 2.0 * gamma * (nu + 2.0) * theta / (1.0 - theta)))
    c = (nu + 1.0 + theta) / ((nu + 2.0) * theta * (theta - gamma))
    return max(a, c)


def _suite_open_problem(run):
    out = []
    g = run.grid
    gammas = sorted(set(g.gamma_list) | set(OPEN_GAMMA))
    for nu in OPEN_NU:
        for gamma in gammas:
            out += _bound_suite(run, "open_problem_9_2", nu, 0.0, gamma, pure_power(0.0),
                                lambda th, nu=nu, gamma=gamma: open_problem_constant(nu, gamma, th),
                                g.thetas(gamma), n=0.0, a=0.0)
    return out


def _suite_extra_moment(run):
    return _shifted_like(run, "extra_moment_9_4", (-0.5, 0.5, 2.0))


SUITES = {
    "ratio_2_1": _suite_ratio,
    "power_2_2": _suite_power,
    "main_3_2": _suite_main,
    "approx_3_5": _suite_approx,
    "lower_4_2": _suite_lower,
    "two_sided_4_3": _suite_two_sided,
    "shifted_5_1": _suite_shifted,
    "moment_5_2": _suite_moment,
    "order_monotone_5_3": _suite_order_monotone,
    "endpoint_order_5_4i": _suite_endpoint_order_i,
    "endpoint_order_5_4ii": _suite_endpoint_order_ii,
    "shifted_endpoint_5_5": _suite_shifted_endpoint,
    "limits_6_1": _suite_limits,
    "expansions_6_2": _suite_expansions,
    "strict_6_3": _suite_strict,
    "stationary_6_4": _suite_stationary,
    "balance_6_6": _suite_balance,
    "constructive_monotone_7_1": _suite_constructive_monotone,
    "sharp_monotone_7_2": _suite_sharp_monotone,
    "box_7_3": _suite_box,
    "mixture_8_1": _suite_mixture,
    "regular_variation_8_3": _suite_regular_variation,
    "gaunt_family_9_1": _suite_gaunt_family,
    "open_problem_9_2": _suite_open_problem,
    "extra_moment_9_4": _suite_extra_moment,
}
SUITE_IDS = tuple(SUITES)


def run_suite(suite_id, grid: GridSpec = None, tol=DEFAULT_TOL, _run=None):
    """Run one suite (or ``"all"``) and return its records.

    Raises DomainError for an unknown suite id.
    """
    grid = GridSpec.fast() if grid is None else grid
    run = _run or _Run(grid, tol)
    if suite_id == "all":
        out = []
        for sid in SUITE_IDS:
            out += SUITES[sid](run)
        return out
    if suite_id not in SUITES:
        raise DomainError(f"unknown suite {suite_id!r}; known: all, {', '.join(SUITE_IDS)}")
    return SUITES[suite_id](run)
