"""Finite truncations of the state spaces and of the path space.

States in the sequence space are plain ``numpy`` arrays.  Functions on a
uniform spatial grid are wrapped in :class:`GridFunction` so that the
grid-weighted inner product travels with the values.  A
:class:`PathRecord` stores a path at the points of a :class:`TimeGrid`;
its ``weight`` is the quadrature weight of the state norm (``1`` for
sequence coordinates, ``h`` for gridded functions).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CommensurabilityError, DimensionError, OffGridError

_REL = 1e-9


def _as_integer_ratio(a: float, b: float, what: str) -> int:
    """Return ``a / b`` as an int, raising if it is not (close to) integral."""
    q = a / b
    n = int(round(q))
    if abs(q - n) > _REL * max(1.0, abs(q)):
        raise CommensurabilityError(f"{what}: {a!r} is not an integer multiple of {b!r}")
    return n


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_i = i * dt`` on ``[0, t_end]`` with ``n_steps`` cells."""

    t_end: float
    n_steps: int

    def __post_init__(self):
        if not self.n_steps >= 1 or int(self.n_steps) != self.n_steps:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps!r}")
        if not (np.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        object.__setattr__(self, "n_steps", int(self.n_steps))
        object.__setattr__(self, "t_end", float(self.t_end))

    @classmethod
    def from_dt(cls, dt: float, n_steps: int) -> "TimeGrid":
        return cls(dt * n_steps, n_steps)

    @property
    def dt(self) -> float:
        return self.t_end / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    def time(self, i: int) -> float:
        return i * self.dt

    def index_of(self, t: float) -> int:
        """Index of grid time ``t``; raises :class:`OffGridError` off the grid."""
        q = t / self.dt
        i = int(round(q))
        if abs(q - i) > _REL * max(1.0, abs(q)) or not 0 <= i <= self.n_steps:
            raise OffGridError(f"t={t!r} is not a point of {self}")
        return i

    def truncate(self, i: int) -> "TimeGrid":
        """The grid restricted to ``[0, t_i]`` (same spacing)."""
        return TimeGrid.from_dt(self.dt, i)

    def refine(self, factor: int) -> "TimeGrid":
        return TimeGrid(self.t_end, self.n_steps * factor)

    def matches(self, other: "TimeGrid") -> bool:
        return self.n_steps == other.n_steps and np.isclose(self.t_end, other.t_end, rtol=1e-12, atol=0)


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid ``x_min, x_min + h, ..., x_max`` on a bounded window of the line."""

    x_min: float
    x_max: float
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"spacing h must be positive, got {self.h!r}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        _as_integer_ratio(self.x_max - self.x_min, self.h, "window length")

    @property
    def n_points(self) -> int:
        return int(round((self.x_max - self.x_min) / self.h)) + 1

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.n_points)

    def steps(self, t: float) -> int:
        """Number of grid cells corresponding to a shift by ``t``."""
        return _as_integer_ratio(t, self.h, "shift")


@dataclass(frozen=True)
class GridFunction:
    """Function on a :class:`SpatialGrid` with the inner product ``h * sum(f * g)``."""

    grid: SpatialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise DimensionError(f"expected {self.grid.n_points} values, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    def inner(self, other: "GridFunction") -> float:
        if other.grid != self.grid:
            raise DimensionError("grid functions live on different grids")
        return float(self.grid.h * np.dot(self.values, other.values))


def norm(v, weight: float = 1.0) -> float:
    """Hilbert norm of a state.

    Euclidean for plain arrays (scaled by ``sqrt(weight)``), grid-weighted
    for :class:`GridFunction`.
    """
    if isinstance(v, GridFunction):
        return float(np.sqrt(v.grid.h * np.sum(v.values**2)))
    a = np.asarray(v, dtype=float)
    return float(np.sqrt(weight * np.sum(a * a)))


@dataclass(frozen=True)
class PathRecord:
    """A path sampled at the points of ``grid``.

    ``states[i]`` is the state at ``grid.time(i)``; all states share one
    shape.  ``weight`` is the quadrature weight used for state norms.
    """

    grid: TimeGrid
    states: np.ndarray
    weight: float = 1.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.ndim < 1 or states.shape[0] != self.grid.n_steps + 1:
            raise DimensionError(
                f"path has {states.shape[0] if states.ndim else 0} states, grid needs {self.grid.n_steps + 1}"
            )
        object.__setattr__(self, "states", states)

    @property
    def state_shape(self) -> tuple:
        return self.states.shape[1:]

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def at(self, t: float) -> np.ndarray:
        return self.states[self.grid.index_of(t)]

    def state_norms(self) -> np.ndarray:
        flat = self.states.reshape(self.states.shape[0], -1)
        return np.sqrt(self.weight * np.einsum("ij,ij->i", flat, flat))

    def prefix(self, i: int) -> "PathRecord":
        """Read-only view of the path on ``[0, t_i]``.

        For ``i == 0`` the initial state is extended constantly over one
        cell, since a grid needs at least one step.
        """
        if i == 0:
            states = np.stack([self.states[0], self.states[0]])
            return PathRecord(self.grid.truncate(1), states, self.weight)
        view = self.states[: i + 1].view()
        view.flags.writeable = False
        return PathRecord(self.grid.truncate(i), view, self.weight)

    def map(self, fn: Callable[[np.ndarray], np.ndarray], weight: float | None = None) -> "PathRecord":
        """Apply ``fn`` to every state."""
        states = np.stack([fn(s) for s in self.states])
        return PathRecord(self.grid, states, self.weight if weight is None else weight)


def _check_same_grid(w1: PathRecord, w2: PathRecord) -> None:
    if not w1.grid.matches(w2.grid) or w1.state_shape != w2.state_shape:
        raise DimensionError("paths do not share grid and state shape")


def sup_distance(w1: PathRecord, w2: PathRecord) -> float:
    """``max_i ||w1(t_i) - w2(t_i)||``."""
    _check_same_grid(w1, w2)
    diff = PathRecord(w1.grid, w1.states - w2.states, w1.weight)
    return float(diff.state_norms().max())


def path_metric_rho(w1: PathRecord, w2: PathRecord, k_max: int) -> float:
    """Truncated Fréchet metric ``sum_{k<=k_max} 2^-k (sup_{t<=k} ||w1 - w2|| ^ 1)``.

    The omitted tail is at most ``2**-k_max``.
    """
    _check_same_grid(w1, w2)
    if k_max < 1 or k_max > w1.grid.t_end * (1 + _REL):
        raise ValueError(f"k_max must lie in [1, t_end], got {k_max}")
    gaps = PathRecord(w1.grid, w1.states - w2.states, w1.weight).state_norms()
    running = np.maximum.accumulate(gaps)
    times = w1.times
    total = 0.0
    for k in range(1, int(k_max) + 1):
        last = np.searchsorted(times, k * (1 + _REL), side="right") - 1
        total += 2.0**-k * min(running[last], 1.0)
    return total


def prefix_freeze(w: PathRecord, t: float) -> PathRecord:
    """Path equal to ``w`` on ``[0, t]`` and constant at ``w(t)`` afterwards."""
    i = w.grid.index_of(t)
    states = w.states.copy()
    states[i + 1 :] = states[i]
    return PathRecord(w.grid, states, w.weight)


def is_adapted(evaluator, w: PathRecord, times=None, atol: float = 0.0) -> bool:
    """Check ``evaluator(t, w) == evaluator(t, prefix_freeze(w, t))`` on grid times."""
    if times is None:
        times = w.times
    for t in times:
        a = np.asarray(evaluator(t, w))
        b = np.asarray(evaluator(t, prefix_freeze(w, t)))
        if a.shape != b.shape or not np.allclose(a, b, rtol=0.0, atol=atol):
            return False
    return True
