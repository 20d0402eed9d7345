"""
Gronwall under a translation group
==================================

On a gridded line the shift (U_t f)(x) = f(x + t) is unitary on interior
functions.  Pointwise coefficients alpha(f) = sin f and
sigma(f) = [0.3 cos f, 0.2 f] satisfy the one-sided condition with
L = 2 + 0.09 + 0.04, and so do their transported versions U_-t alpha(U_t .).
Two solutions started eps apart then stay within eps^2 exp(L t) in mean square.
"""

import numpy as np

from movingframe import SpatialGrid, TimeGrid, TranslationGroup
from movingframe.experiments import nemytskii_coefficients
from movingframe.uniqueness import gronwall_experiment

line = SpatialGrid(-4.0, 4.0, 1.0 / 16)
alpha, sigma = nemytskii_coefficients()
rep = gronwall_experiment(alpha, sigma, TranslationGroup(line), 2.13, np.exp(-line.x**2), 0.1, TimeGrid(1.0, 16), n_paths=64, K=2)

for t, gap, bound in zip(rep.times[::4], rep.mean_sq_gap[::4], rep.bound[::4]):
    print(f"t = {t:.2f}: mean square gap {gap:.5f}  bound {bound:.5f}")
print("identical starts differ by", rep.identical_max_diff)
print("verdict:", "pass" if rep.passed else "fail")
