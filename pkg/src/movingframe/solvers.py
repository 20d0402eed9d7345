"""Time stepping for path-dependent SDEs and for the mild form of semilinear SPDEs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, DivergenceError
from .moving_frame import CoefficientPair
from .noise import DriverBundle
from .spaces import PathRecord, TimeGrid

DIVERGENCE_NORM = 1e9


@dataclass(frozen=True)
class SolveConfig:
    grid: TimeGrid
    scheme: str
    initial: np.ndarray

    def __post_init__(self):
        if self.scheme not in ("euler_maruyama", "exp_euler_mild"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


def _check(driver: DriverBundle, grid: TimeGrid | None) -> TimeGrid:
    if grid is None:
        return driver.grid
    if not grid.matches(driver.grid):
        raise DimensionError("driver and solve grid differ")
    return grid


def _guard(state: np.ndarray, step: int, weight: float) -> None:
    nrm = float(np.sqrt(weight * np.sum(state * state)))
    if not np.isfinite(nrm) or nrm > DIVERGENCE_NORM:
        raise DivergenceError(step, nrm)


def euler_maruyama(coeffs: CoefficientPair, y0, driver: DriverBundle, grid: TimeGrid | None = None, weight: float = 1.0) -> PathRecord:
    """Explicit Euler-Maruyama for ``dY = alpha(t, Y) dt + sigma(t, Y) dW``.

    Coefficients at step ``i`` see only the path built so far (``Y.prefix(i)``).
    """
    grid = _check(driver, grid)
    dt = grid.dt
    y0 = np.asarray(y0, dtype=float)
    states = np.empty((grid.n_steps + 1,) + y0.shape)
    states[0] = y0
    path = PathRecord(grid, states, weight)
    for i in range(grid.n_steps):
        t = grid.time(i)
        past = path.prefix(i)
        drift = coeffs.alpha(t, past)
        vol = coeffs.sigma(t, past)
        states[i + 1] = states[i] + drift * dt + vol @ driver.increments[i]
        _guard(states[i + 1], i, weight)
    return path


def exp_euler_mild(semigroup, coeffs: CoefficientPair, x0, driver: DriverBundle, grid: TimeGrid | None = None, weight: float | None = None) -> PathRecord:
    """Exponential Euler ``X_{i+1} = S_dt [X_i + alpha_i dt + sigma_i dW_i]``.

    Unrolled this is the left-endpoint discretization of the mild formula,
    ``X_n = S_{t_n} x0 + sum_j S_{t_n - t_j} (alpha_j dt + sigma_j dW_j)``.
    """
    grid = _check(driver, grid)
    if weight is None:
        weight = getattr(semigroup, "weight", 1.0)
    dt = grid.dt
    x0 = np.asarray(x0, dtype=float)
    states = np.empty((grid.n_steps + 1,) + x0.shape)
    states[0] = x0
    path = PathRecord(grid, states, weight)
    for i in range(grid.n_steps):
        t = grid.time(i)
        past = path.prefix(i)
        bracket = states[i] + coeffs.alpha(t, past) * dt + coeffs.sigma(t, past) @ driver.increments[i]
        states[i + 1] = semigroup.apply(dt, bracket)
        _guard(states[i + 1], i, weight)
    return path


def discrete_ito(integrand: Sequence[np.ndarray] | np.ndarray, driver: DriverBundle, weight: float = 1.0) -> PathRecord:
    """Left-endpoint sums ``I(t_i) = sum_{j<i} M_j dW_j`` for matrices ``M_0..M_{n-1}``."""
    m = np.asarray(integrand, dtype=float)
    n = driver.grid.n_steps
    if m.ndim < 2 or m.shape[0] != n or m.shape[-1] != driver.K:
        raise DimensionError(f"integrand shape {m.shape} does not match {n} steps and K={driver.K}")
    steps = np.einsum("i...k,ik->i...", m, driver.increments)
    states = np.zeros((n + 1,) + steps.shape[1:])
    np.cumsum(steps, axis=0, out=states[1:])
    return PathRecord(driver.grid, states, weight)


def mild_residual(semigroup, coeffs: CoefficientPair, X: PathRecord, driver: DriverBundle) -> float:
    """Max defect of ``X`` in the discrete mild identity with left-endpoint kernels.

    Evaluates every ``X(t_n)`` from scratch, so the cost is quadratic in the
    number of steps.
    """
    grid = _check(driver, X.grid)
    dt = grid.dt
    pieces = []
    for j in range(grid.n_steps):
        t = grid.time(j)
        past = X.prefix(j)
        pieces.append(coeffs.alpha(t, past) * dt + coeffs.sigma(t, past) @ driver.increments[j])
    worst = 0.0
    for n in range(grid.n_steps + 1):
        tn = grid.time(n)
        total = semigroup.apply(tn, X.states[0])
        for j in range(n):
            total = total + semigroup.apply(tn - grid.time(j), pieces[j])
        diff = X.states[n] - total
        worst = max(worst, float(np.sqrt(X.weight * np.sum(diff * diff))))
    return worst
