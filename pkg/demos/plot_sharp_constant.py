"""
The sharp constant
==================

The true supremum of R is the larger of its two endpoint limits and its
values at interior stationary points.  It is cross-checked against a dense
direct scan and sits below the optimized constructive constant.
"""

from besselbound import Params, expansion_coeffs, optimized_constant, sharp_constant

for mu, q, gamma in [(0.0, 0.0, 0.25), (0.0, 3.0, 0.5), (2.0, 0.0, 0.9)]:
    p = Params(mu, q, gamma)
    s = sharp_constant(p)
    c = expansion_coeffs(p)
    print(f"mu={mu} q={q} gamma={gamma}: M*={s.M_star:.6g} at {s.x_argmax}, "
          f"limits {c.limit0:.4g} / {c.limit_inf:.4g}, "
          f"M-hat {optimized_constant(mu, q, gamma).M_hat:.4g}, agree={s.agree}")
