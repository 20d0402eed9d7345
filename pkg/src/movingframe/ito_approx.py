"""Staged approximations of a stochastic integral by Riemann sums.

An operator integrand ``b_bar(t, x)`` returns an ``N x K`` matrix whose
column ``i`` is the image of the ``i``-th eigenvector of ``Q``.  Its
Hilbert-Schmidt norm on ``Q^{1/2}(U)`` is ``|| b_bar diag(sqrt(lam)) ||_F``.
Each stage is a four-tuple ``(j, k, l, m)``:

* ``j``: zero the integrand wherever its HS norm exceeds ``j``;
* ``k``: keep the first ``k`` columns;
* ``l``: average over the trailing window of length ``1/l``;
* ``m``: freeze the integrand on blocks ``[i/m, (i+1)/m)``.

Window averages sample the grid points in ``(t - 1/l, t]`` and treat the
integrand as zero at negative times.  The number of samples is
``round(1/(l dt))`` (at least one), so a one-cell window returns the value
at ``t`` itself and the fully refined stage reproduces the plain Itô sum.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import CommensurabilityError, DimensionError, RangeError
from .noise import QWienerPath, recover_components
from .reports import StatReport
from .solvers import discrete_ito
from .spaces import PathRecord, TimeGrid

OperatorIntegrand = Callable[[float, PathRecord], np.ndarray]


def hs_norm(m: np.ndarray, lam) -> float:
    """Hilbert-Schmidt norm of ``m`` as an operator on ``Q^{1/2}(U)``."""
    return float(np.linalg.norm(np.asarray(m) * np.sqrt(np.asarray(lam, dtype=float))))


def hs_truncate(b_bar: OperatorIntegrand, j: float, lam) -> OperatorIntegrand:
    """Keep ``b_bar(t, x)`` where its HS norm is ``<= j``, else return zero."""
    lam = np.asarray(lam, dtype=float)

    def b_j(t, x):
        m = np.asarray(b_bar(t, x), dtype=float)
        return m if hs_norm(m, lam) <= j else np.zeros_like(m)

    return b_j


def finite_rank(b_j: OperatorIntegrand, k: int, K: int) -> OperatorIntegrand:
    """Keep the first ``k`` columns (eigen-directions of ``Q``)."""
    if k > K:
        raise RangeError(f"rank k={k} exceeds the number of driver modes K={K}")
    if k < 1:
        raise RangeError(f"rank must be positive, got {k}")

    def b_jk(t, x):
        m = np.array(b_j(t, x), dtype=float)
        m[..., k:] = 0.0
        return m

    return b_jk


def window_cells(ell: float, grid: TimeGrid) -> int:
    return max(1, int(round(1.0 / (ell * grid.dt))))


def time_mollify(b_jk: OperatorIntegrand, ell: float, grid: TimeGrid) -> OperatorIntegrand:
    """Trailing average ``l * int_{t - 1/l}^t b(s) ds`` on the grid (zero before time 0)."""
    w = window_cells(ell, grid)

    def b_jkl(t, x):
        i = grid.index_of(t)
        acc = None
        for r in range(max(0, i - w + 1), i + 1):
            v = np.asarray(b_jk(grid.time(r), x), dtype=float)
            acc = v.copy() if acc is None else acc + v
        return acc / w

    return b_jkl


def block_cells(m: int, grid: TimeGrid) -> int:
    """Grid cells per block of length ``1/m``; raises unless ``1/m`` is a multiple of ``dt``."""
    q = 1.0 / (m * grid.dt)
    n = int(round(q))
    if n < 1 or abs(q - n) > 1e-9 * q:
        raise CommensurabilityError(f"block length 1/{m} is not a multiple of dt={grid.dt}")
    return n


def step_discretize(b_jkl: OperatorIntegrand, m: int, grid: TimeGrid) -> OperatorIntegrand:
    """Evaluate at the block start ``floor(m t) / m``."""
    q = block_cells(m, grid)

    def b_jklm(t, x):
        i = grid.index_of(t)
        return b_jkl(grid.time((i // q) * q), x)

    return b_jklm


@dataclass(frozen=True)
class ApproxSchedule:
    """Stages ``(j, k, l, m)`` applied in order; componentwise nondecreasing."""

    stages: tuple

    def __post_init__(self):
        stages = tuple(tuple(s) for s in self.stages)
        if not stages:
            raise ValueError("schedule needs at least one stage")
        for s in stages:
            if len(s) != 4 or any(not (v > 0) for v in s):
                raise ValueError(f"stage {s} must hold four positive entries")
        for a, b in zip(stages, stages[1:]):
            if any(y < x for x, y in zip(a, b)):
                raise ValueError(f"schedule is not nondecreasing at {a} -> {b}")
        object.__setattr__(self, "stages", stages)


def staged_integrand(b_bar: OperatorIntegrand, stage, lam, grid: TimeGrid) -> OperatorIntegrand:
    """Compose all four approximation steps for one stage.

    ``k`` is capped at the number of modes, so stages may keep doubling it.
    """
    j, k, ell, m = stage
    K = len(lam)
    b = hs_truncate(b_bar, j, lam)
    b = finite_rank(b, min(int(k), K), K)
    b = time_mollify(b, ell, grid)
    return step_discretize(b, int(m), grid)


def riemann_In(b_stage: OperatorIntegrand, x: PathRecord, q_path: QWienerPath, m: int, T_max: float | None = None) -> PathRecord:
    """Riemann sums of ``b_stage`` against Q-Wiener increments over blocks of length ``1/m``.

    The returned path interpolates inside each block with the frozen block
    operator, so it agrees with the block sums at every ``i/m`` and is the
    Itô integral of the piecewise-constant integrand.
    """
    grid = q_path.grid
    if not grid.matches(x.grid):
        raise DimensionError("integrand path and noise live on different grids")
    if T_max is not None and T_max > grid.t_end * (1 + 1e-12):
        raise ValueError(f"T_max={T_max} exceeds the noise horizon {grid.t_end}")
    q = block_cells(m, grid)
    n = grid.n_steps
    w = q_path.cumulative
    out = None
    for start in range(0, n, q):
        op = np.asarray(b_stage(grid.time(start), x), dtype=float)
        if out is None:
            out = np.zeros((n + 1,) + op.shape[:-1])
        stop = min(start + q, n)
        dw = w[start + 1 : stop + 1] - w[start]
        out[start + 1 : stop + 1] = out[start] + np.einsum("ik,...k->i...", dw, op)
    return PathRecord(grid, out, x.weight)


def reference_integral(b_bar: OperatorIntegrand, x: PathRecord, q_path: QWienerPath) -> PathRecord:
    """Plain left-endpoint Itô sum of ``b = b_bar J`` against the standard driver."""
    grid = q_path.grid
    j = np.sqrt(np.asarray(q_path.lam, dtype=float))
    mats = np.stack([np.asarray(b_bar(grid.time(i), x), dtype=float) * j for i in range(grid.n_steps)])
    return discrete_ito(mats, recover_components(q_path), x.weight)


def _sup_error(a: PathRecord, b: PathRecord) -> float:
    d = (a.states - b.states).reshape(a.states.shape[0], -1)
    return float(np.sqrt(a.weight * np.einsum("ij,ij->i", d, d)).max())


def convergence_study(
    b_bar: OperatorIntegrand,
    x: PathRecord,
    q_paths: Sequence[QWienerPath] | QWienerPath,
    schedule: ApproxSchedule,
    tol: float = 0.01,
) -> StatReport:
    """Sup-norm error of each stage against the fine reference, averaged over noise paths."""
    if isinstance(q_paths, QWienerPath):
        q_paths = [q_paths]
    errors = np.zeros((len(q_paths), len(schedule.stages)))
    for p, q_path in enumerate(q_paths):
        ref = reference_integral(b_bar, x, q_path)
        for s, stage in enumerate(schedule.stages):
            b_stage = staged_integrand(b_bar, stage, q_path.lam, q_path.grid)
            approx = riemann_In(b_stage, x, q_path, int(stage[3]))
            errors[p, s] = _sup_error(approx, ref)
    mean = errors.mean(axis=0)
    nonincreasing = bool(np.all(np.diff(mean) <= 1e-15))
    final_ok = bool(mean[-1] <= tol)
    return StatReport(
        name="ito-approx convergence",
        statistics={
            "stages": [list(map(_jsonable, s)) for s in schedule.stages],
            "mean_sup_error": mean.tolist(),
            "nonincreasing": nonincreasing,
            "n_paths": len(q_paths),
        },
        tolerance={"final_sup_error": tol},
        passed=nonincreasing and final_ok,
        provenance="ito_approx.convergence_study",
    )


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v.item() if isinstance(v, np.generic) else v


def write_convergence_csv(report: StatReport, path) -> Path:
    """Columns ``stage, j, k, l, m, sup_error``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stage", "j", "k", "l", "m", "sup_error"])
        for i, (stage, err) in enumerate(zip(report.statistics["stages"], report.statistics["mean_sup_error"]), 1):
            writer.writerow([i, *stage, repr(float(err))])
    return path
