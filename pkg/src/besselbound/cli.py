"""Command-line entry point: ``besselbound <subcommand> [flags]``.

Exit status: 0 success, 1 verification failure, 2 usage or parameter-range
error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from . import constants as C
from .bessel import besseli, log_besseli
from .errors import BesselOverflowError, ConvergenceError, DomainError, FixtureError
from .integral import endpoint_quotient
from .params import Params, default_theta
from .sharp import quotient_derivative, quotient_R, sharp_constant
from .verify import SUITE_IDS, GridSpec, all_passed, emit_report, format_scalar, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SYMBOLS = """flag -> symbol:
  --alpha   order alpha of I_alpha
  --x       argument x > 0
  --mu      order mu > -1 of the integrand I_mu
  --q       power q > -1 of the weight t^q
  --gamma   exponential tilt, 0 <= gamma < 1 (0 < gamma < 1 for constants)
  --theta   split parameter, gamma (+ eta) < theta < 1; default (1+gamma)/2
  --eta     weight defect, 0 <= eta < 1 - gamma
  --nu, --n, --a   shifted family: mu = nu + n, q = a + n
  --kappa   endpoint order offset: endpoint uses I_{mu+kappa} (default 1)
  --x-min, --x-max, --points, --log-grid   x sampling for curves
  --scaled  report exp(-x) I_alpha(x) as well
  --optimize  also report the balanced constant M-hat and theta*
  --tol     verification tolerance on relative margins
"""


class UsageError(Exception):
    pass


def _flat(d):
    return "{" + ", ".join(f'"{k}": {format_scalar(v)}' for k, v in d.items()) + "}"


def _print(out, d):
    out.write(_flat(d) + "\n")


def _mu_q(args):
    shifted = args.nu is not None or args.n is not None or args.a is not None
    if shifted:
        if args.mu is not None or args.q is not None:
            raise UsageError("give either --mu/--q or --nu/--n/--a, not both")
        if args.nu is None or args.n is None:
            raise UsageError("shifted family needs --nu and --n (and optionally --a, default 0)")
        a = 0.0 if args.a is None else args.a
        if not args.nu + args.n > -1:
            raise DomainError(f"requires nu + n > -1 (nu + n = {args.nu + args.n})")
        if not a + args.n > -1:
            raise DomainError(f"requires a + n > -1 (a + n = {a + args.n})")
        return args.nu + args.n, a + args.n
    if args.mu is None or args.q is None:
        raise UsageError("--mu and --q are required")
    return args.mu, args.q


def cmd_besseli(args, out):
    if args.alpha is None or args.x is None:
        raise UsageError("--alpha and --x are required")
    r = besseli(args.alpha, args.x)
    d = {"alpha": args.alpha, "x": args.x, "value": r.value, "method": r.method,
         "log_value": float(log_besseli(args.alpha, args.x)) if args.x > 0 else None}
    if args.scaled:
        d["scaled_value"] = besseli(args.alpha, args.x, scaled=True).value
    _print(out, d)
    return EXIT_OK


def cmd_constants(args, out):
    mu, q = _mu_q(args)
    gamma = args.gamma
    if gamma is None:
        raise UsageError("--gamma is required")
    if not 0 < gamma < 1:
        raise DomainError(f"requires 0 < gamma < 1 (gamma={gamma})")
    eta = args.eta or 0.0
    theta = default_theta(gamma, eta) if args.theta is None else args.theta
    p = Params(mu, q, gamma, theta, eta if args.eta is not None else None)
    b = C.approx_constant(p) if args.eta is not None else C.constructive_constant(p)
    d = {"mu": mu, "q": q, "gamma": gamma, "theta": theta, "theta_default": args.theta is None,
         "eta": args.eta, "K": b.K, "L": b.L, "X": b.X, "beta": b.beta, "A_term": b.A_term,
         "C_term": b.C_term, "M": b.M}
    if args.optimize:
        o = C.optimized_constant(mu, q, gamma)
        d.update(theta_star=o.theta_star, theta_gap=o.gap, M_hat=o.M_hat,
                 iterations=o.iterations, extended=o.extended)
    _print(out, d)
    return EXIT_OK


def _x_grid(args):
    lo, hi, n = args.x_min, args.x_max, args.points
    if not 0 < lo < hi:
        raise DomainError(f"requires 0 < x-min < x-max (x-min={lo}, x-max={hi})")
    if n < 1:
        raise DomainError(f"requires points >= 1 (points={n})")
    if n == 1:
        return np.array([lo])
    return np.geomspace(lo, hi, n) if args.log_grid else np.linspace(lo, hi, n)


def cmd_quotient(args, out, err):
    mu, q = _mu_q(args)
    gamma = 0.0 if args.gamma is None else args.gamma
    kappa = 1.0 if args.kappa is None else args.kappa
    p = Params(mu, q, gamma)
    xs = _x_grid(args)
    if gamma > 0:
        theta = default_theta(gamma) if args.theta is None else args.theta
        bound = C.M_value(mu, q, gamma, theta)
        err.write(f"# mu={mu!r} q={q!r} gamma={gamma!r} theta={theta!r}"
                  f"{' (default (1+gamma)/2)' if args.theta is None else ''} kappa={kappa!r}\n")
    else:
        if args.theta is not None:
            raise DomainError("theta is not used when gamma = 0 (bound is K)")
        theta, bound = None, C.k_const(mu, q)
        err.write(f"# mu={mu!r} q={q!r} gamma=0 bound=K kappa={kappa!r}\n")
    if kappa == 1.0:
        R = np.atleast_1d(quotient_R(p, xs))
        dR = np.atleast_1d(quotient_derivative(p, xs))
    else:
        if not mu + kappa > -1:
            raise DomainError(f"requires mu + kappa > -1 (mu + kappa = {mu + kappa})")
        order = mu + kappa
        R = np.atleast_1d(endpoint_quotient(xs, p, order=order))
        # central difference of log R
        h = 1e-5 * xs
        lp = np.log(np.atleast_1d(endpoint_quotient(xs + h, p, order=order)))
        lm = np.log(np.atleast_1d(endpoint_quotient(xs - h, p, order=order)))
        dR = R * (lp - lm) / (2.0 * h)
        if not C.endpoint_order_admissible(mu, kappa):
            bound = math.inf
    out.write("x,R,R_prime,bound\n")
    for x, r, d in zip(xs, R, dR):
        out.write(f"{format_scalar(x)},{format_scalar(r)},{format_scalar(d)},{format(bound, '.17g')}\n")
    return EXIT_OK


def cmd_sharp(args, out):
    mu, q = _mu_q(args)
    if args.gamma is None:
        raise UsageError("--gamma is required")
    p = Params(mu, q, args.gamma)
    s = sharp_constant(p)
    d = {"mu": mu, "q": q, "gamma": args.gamma, "M_star": s.M_star,
         "x_argmax": s.x_argmax if isinstance(s.x_argmax, str) else float(s.x_argmax),
         "stationary_xs": " ".join(format(v, ".17g") for v in s.stationary_xs),
         "stationary_values": " ".join(format(v, ".17g") for v in s.stationary_values),
         "direct_estimate": s.direct_estimate, "direct_argmax": s.direct_argmax,
         "agree": s.agree, "flat": s.flat}
    if args.gamma > 0:
        o = C.optimized_constant(mu, q, args.gamma)
        d.update(M_hat=o.M_hat, theta_star=o.theta_star)
    _print(out, d)
    return EXIT_OK if s.agree else EXIT_NUMERIC


def cmd_verify(args, out, err):
    grid = GridSpec.named(args.grid)
    t0 = time.perf_counter()
    records = run_suite(args.suite, grid, tol=args.tol)
    text = emit_report(records, timings=args.timings)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    bad = [r for r in records if not r.passed]
    err.write(f"# {len(records)} records, {len(bad)} failed"
              + (f", {time.perf_counter() - t0:.1f} s" if args.timings else "") + "\n")
    return EXIT_OK if all_passed(records) else EXIT_VERIFY


def build_parser():
    ap = argparse.ArgumentParser(
        prog="besselbound",
        description="Endpoint bounds for exponentially tilted modified Bessel integrals.",
        epilog=SYMBOLS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, shifted=True):
        sp.add_argument("--mu", type=float, help="order mu of I_mu (mu > -1)")
        sp.add_argument("--q", type=float, help="weight power q (q > -1)")
        sp.add_argument("--gamma", type=float, help="tilt gamma")
        if shifted:
            sp.add_argument("--nu", type=float, help="shifted family: base order nu")
            sp.add_argument("--n", type=float, help="shifted family: shift n")
            sp.add_argument("--a", type=float, help="shifted family: weight offset a (default 0)")

    sp = sub.add_parser("besseli", help="evaluate I_alpha(x)", epilog=SYMBOLS,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--alpha", type=float, help="order alpha (alpha > -1)")
    sp.add_argument("--x", type=float, help="argument x >= 0")
    sp.add_argument("--scaled", action="store_true", help="also print exp(-x) I_alpha(x)")

    sp = sub.add_parser("constants", help="constructive constant M(theta) and its terms",
                        epilog=SYMBOLS, formatter_class=argparse.RawDescriptionHelpFormatter)
    common(sp)
    sp.add_argument("--theta", type=float, help="split theta (default (1+gamma+eta)/2)")
    sp.add_argument("--eta", type=float, help="weight defect eta (approximate weights)")
    sp.add_argument("--optimize", action="store_true", help="also solve the balance equation")

    sp = sub.add_parser("quotient", help="CSV curve x,R,R_prime,bound", epilog=SYMBOLS,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    common(sp)
    sp.add_argument("--theta", type=float, help="split theta for the bound column")
    sp.add_argument("--kappa", type=float, help="endpoint order offset kappa (default 1)")
    sp.add_argument("--x-min", type=float, default=1e-4, help="smallest x")
    sp.add_argument("--x-max", type=float, default=300.0, help="largest x")
    sp.add_argument("--points", type=int, default=50, help="number of x values")
    sp.add_argument("--log-grid", action="store_true", help="log-spaced x (default linear)")

    sp = sub.add_parser("sharp", help="sharp constant M* and its cross-check", epilog=SYMBOLS,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    common(sp)

    sp = sub.add_parser("verify", help="run certification suites", epilog=SYMBOLS,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--suite", default="all", help="suite id or 'all': " + ", ".join(SUITE_IDS))
    sp.add_argument("--grid", default="fast", choices=("fast", "dense"), help="grid density")
    sp.add_argument("--tol", type=float, default=1e-10, help="tolerance on relative margins")
    sp.add_argument("--output", help="report path (default standard output)")
    sp.add_argument("--timings", action="store_true",
                    help="record runtime_ms (reports are then not byte-reproducible)")
    return ap


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "besseli":
            return cmd_besseli(args, out)
        if args.command == "constants":
            return cmd_constants(args, out)
        if args.command == "quotient":
            return cmd_quotient(args, out, err)
        if args.command == "sharp":
            return cmd_sharp(args, out)
        return cmd_verify(args, out, err)
    except (UsageError, DomainError) as e:
        err.write(f"besselbound {args.command}: error: {e}\n")
        return EXIT_USAGE
    except (ConvergenceError, BesselOverflowError, FixtureError, FloatingPointError) as e:
        err.write(f"besselbound {args.command}: numerical failure: {e}\n")
        return EXIT_NUMERIC
    except OSError as e:
        err.write(f"besselbound {args.command}: {e}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
