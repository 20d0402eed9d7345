"""
A unitary dilation you can index into
=====================================

The diagonal contraction semigroup S_t = diag(exp(-k t)) is reproduced by
translating exponential profiles along a gridded line and projecting back.
Run with ``python demos/dilation_walkthrough.py``.
"""

import numpy as np

from movingframe import SpatialGrid, TimeGrid, build_dilation, delta, gamma
from movingframe.semigroups import dilation_diagram_error
from movingframe.spaces import PathRecord, sup_distance

rates = np.arange(1.0, 9.0)
line = SpatialGrid(-12.0, 4.0, 1.0 / 16)
frame = build_dilation(rates, line)
print("points per mode:", frame.n_points)
print("left-boundary tails exp(2 k x_min):", frame.tail_bounds()[:3], "...")

# pi U_t ell e_k should equal exp(-k t) e_k
for t in (0.25, 0.5, 1.0, 2.0):
    print(f"t = {t:4}: diagram error {dilation_diagram_error(frame, [t]):.2e}")

# the only error source is the clipped left tail; a shorter window shows it
for x_min in (-4.0, -8.0, -12.0):
    f = build_dilation(np.array([1.0]), SpatialGrid(x_min, 4.0, 1.0 / 16), tail_tol=1.0)
    print(f"x_min = {x_min:5}: error {dilation_diagram_error(f, [1.0]):.2e}, bound {f.tail_bounds()[0]:.2e}")

# moving frame: Delta sends an H-valued path to the big space, Gamma brings it back
grid = TimeGrid(1.0, 256)
fine = build_dilation(rates, SpatialGrid(-12.0, 1.25, 1.0 / 256), t_end=1.0)
rng = np.random.default_rng(0)
v = PathRecord(grid, rng.standard_normal((257, 8)))
print("sup |Gamma(Delta(v)) - v| =", sup_distance(gamma(fine, delta(fine, v)), v))
