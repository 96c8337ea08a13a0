"""Exponentially weighted endpoint bounds for modified Bessel integrals.

The central object is the tilted integral

    F(x) = int_0^x exp(-gamma t) w(t) t^(-mu) I_mu(t) dt

and its comparison with the endpoint scale exp(-gamma x) w(x) x^(-mu) I_{mu+1}(x).
"""
from .bessel import EvalResult, bessel_ratio, besseli, log_besseli, ratio_lower_bound
from .constants import (
    ConstantBundle,
    OptimizedConstant,
    approx_constant,
    closed_constant,
    constructive_constant,
    k_const,
    l_const,
    optimized_constant,
)
from .errors import BesselOverflowError, ConvergenceError, DomainError, FixtureError, QuadratureError
from .integral import IntegralResult, endpoint_quotient, log_tilted_integral
from .params import Params, default_theta
from .sharp import SharpResult, expansion_coeffs, quotient_R, sharp_constant
from .verify import GridSpec, VerificationRecord, emit_report, run_suite
from .weights import WeightSpec, approx_power, mixture, power_monotone, pure_power

__version__ = "0.1.0"

__all__ = [
    "EvalResult", "bessel_ratio", "besseli", "log_besseli", "ratio_lower_bound",
    "ConstantBundle", "OptimizedConstant", "approx_constant", "closed_constant",
    "constructive_constant", "k_const", "l_const", "optimized_constant",
    "BesselOverflowError", "ConvergenceError", "DomainError", "FixtureError", "QuadratureError",
    "IntegralResult", "endpoint_quotient", "log_tilted_integral",
    "Params", "default_theta",
    "SharpResult", "expansion_coeffs", "quotient_R", "sharp_constant",
    "GridSpec", "VerificationRecord", "emit_report", "run_suite",
    "WeightSpec", "approx_power", "mixture", "power_monotone", "pure_power",
]
