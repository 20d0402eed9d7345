"""
Four knobs of a Riemann-sum Ito integral
========================================

Cut by Hilbert-Schmidt norm (j), keep k noise modes, average over a
trailing window 1/l, freeze on blocks of length 1/m.  Turning all four up
recovers the fine Ito sum.
"""

import numpy as np

from movingframe import TimeGrid, associate_q_wiener, sample_driver
from movingframe.ito_approx import ApproxSchedule, convergence_study
from movingframe.spaces import PathRecord

N = 4
grid = TimeGrid(1.0, 4096)
k = np.arange(1, N + 1)
b_bar = lambda t, x: np.diag(np.exp(-k * t) / k)
x = PathRecord(grid, np.zeros((grid.n_steps + 1, N)))

schedule = ApproxSchedule([(1, 1, 16, 16), (10, 2, 64, 64), (100, 4, 256, 256), (1e12, 4, 4096, 4096)])
q_paths = [associate_q_wiener(sample_driver(grid, N, seed=2, stream_id=p)) for p in range(8)]
report = convergence_study(b_bar, x, q_paths, schedule)

for stage, err in zip(schedule.stages, report.statistics["mean_sup_error"]):
    print("stage j=%-8g k=%d l=%-5g m=%-5g sup error %.3e" % (*stage, err))
