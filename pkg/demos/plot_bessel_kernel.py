"""
Evaluating I_alpha and the ratio I_{alpha+1}/I_alpha
====================================================

Log-domain evaluation keeps large arguments finite; the ratio comes from a
backward continued fraction and always sits above x / (x + 2 alpha + 2).
"""

import numpy as np

from besselbound import bessel_ratio, besseli, log_besseli, ratio_lower_bound

# unscaled values overflow near x = 710, the scaled form does not
print(besseli(0.5, 1.0))
print(besseli(0.0, 1000.0, scaled=True))

# log I_alpha is available on whole arrays
x = np.geomspace(1e-3, 500, 6)
print(np.c_[x, log_besseli(2.0, x)])

# the ratio and its elementary lower bound
for alpha in (-0.5, 0.0, 3.0):
    r = bessel_ratio(alpha, x)
    print(alpha, np.min(r - ratio_lower_bound(alpha, x)))
