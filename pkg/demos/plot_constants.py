"""
Constructive constants and the balance point
============================================

M(theta) = max(A(theta), C(theta)) bounds the quotient for every upper
q-power weight.  A increases and C decreases in theta, so the best choice
is where they cross.
"""

import numpy as np

from besselbound import closed_constant, constructive_constant, optimized_constant, Params

b = constructive_constant(Params(0.0, 0.0, 0.25, theta=0.5))
print(b)

# closed form at theta = (1 + gamma) / 2
print(closed_constant(0.0, 0.0, 0.25))

# the crossing, and a brute-force look at M(theta) around it
opt = optimized_constant(0.0, 0.0, 0.25)
print(opt.theta_star, opt.M_hat)
thetas = np.linspace(0.3, 0.9, 7)
print([round(constructive_constant(Params(0.0, 0.0, 0.25, theta=float(t))).M, 3) for t in thetas])

# large gamma (mu + 2): the crossing hugs gamma, so it is reported as a gap too
opt = optimized_constant(1.0, -0.5, 0.9)
print(opt.gap, opt.M_hat)
