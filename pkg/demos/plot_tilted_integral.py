"""
The tilted integral and its endpoint quotient
=============================================

F(x) = int_0^x exp(-gamma t) w(t) t^(-mu) I_mu(t) dt, computed two ways,
and the quotient R(x) of F against exp(-gamma x) w(x) x^(-mu) I_{mu+1}(x).
"""

import numpy as np

from besselbound import Params, endpoint_quotient, log_tilted_integral, mixture, pure_power

p = Params(mu=0.0, q=0.0, gamma=0.5)
x = np.geomspace(1e-3, 300, 8)

# term-wise incomplete-gamma series against adaptive Gauss-Kronrod
series = log_tilted_integral(x, p, method="series")
quad = log_tilted_integral(x, p, method="quadrature")
print(np.c_[x, series, np.abs(np.expm1(series - quad))])

# R starts at 2(mu+1)/(q+1) = 2 and returns to 1/(1-gamma) = 2 from above
print(np.c_[x, endpoint_quotient(x, p)])

# weights are specs, not callables: a mixture of two powers
w = mixture([(1.0, 0.0), (3.0, 1.5)])
print(endpoint_quotient(x, p, w))

# q = 2 mu + 1 without tilt: the quotient is identically one
print(endpoint_quotient(x, Params(0.5, 2.0, 0.0), pure_power(2.0)))
