"""Diagonal semigroups, translation groups and an explicit unitary dilation.

Every propagator here exposes ``apply(t, x)`` acting along the leading
(state) axis of ``x``; trailing axes are carried along, which lets the
same call transport operator-valued coefficients column by column.

The dilation of ``S_t = diag(exp(-rate_k t))`` lives on ``N`` independent
copies of a gridded line.  Mode ``k`` is embedded as the profile
``f_k(x) = c_k exp(rate_k x)`` for ``x < 0``, normalized so that its discrete
norm is one, and ``U_t`` is left translation ``g(x) -> g(x + t)``.  On a
uniform grid ``<f_k, U_t f_k>`` is a ratio of geometric sums::

    (exp(-r t) - exp(r t + 2 r x_min)) / (1 - exp(2 r x_min))

so the commuting diagram holds up to the left-boundary tail ``exp(2 r x_min)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, WindowError
from .spaces import GridFunction, SpatialGrid


def shift_axis(a: np.ndarray, s: int, axis: int) -> np.ndarray:
    """``out[..., i, ...] = a[..., i + s, ...]`` with zero fill outside the window."""
    a = np.asarray(a)
    out = np.zeros_like(a, dtype=float)
    m = a.shape[axis]
    if s == 0:
        out[...] = a
        return out
    if abs(s) >= m:
        return out
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    if s > 0:
        dst[axis], src[axis] = slice(0, m - s), slice(s, m)
    else:
        dst[axis], src[axis] = slice(-s, m), slice(0, m + s)
    out[tuple(dst)] = a[tuple(src)]
    return out


def _along_states(factors: np.ndarray, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != factors.shape[0]:
        raise DimensionError(f"state has {x.shape[0]} modes, operator has {factors.shape[0]}")
    return factors.reshape((-1,) + (1,) * (x.ndim - 1)) * x


@dataclass(frozen=True)
class DiagonalSemigroup:
    """Contraction semigroup ``S_t e_k = exp(-rates[k] t) e_k``; generator ``diag(-rates)``."""

    rates: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=float)
        if rates.ndim != 1 or rates.size == 0 or np.any(rates <= 0):
            raise ValueError("rates must be a non-empty vector of positive numbers")
        object.__setattr__(self, "rates", rates)

    @classmethod
    def default(cls, n_modes: int) -> "DiagonalSemigroup":
        """Rates ``1, 2, ..., N``."""
        return cls(np.arange(1, n_modes + 1, dtype=float))

    @property
    def n_modes(self) -> int:
        return self.rates.size

    @property
    def generator(self) -> np.ndarray:
        return np.diag(-self.rates)

    def factors(self, t: float) -> np.ndarray:
        if t < 0:
            raise DomainError(f"semigroup is only defined for t >= 0, got t={t}")
        return np.exp(-self.rates * t)

    def apply(self, t: float, v) -> np.ndarray:
        return _along_states(self.factors(t), v)


@dataclass(frozen=True)
class DiagonalGroup(DiagonalSemigroup):
    """Group extension ``exp(-rates t)`` for all real ``t`` (finite truncations only)."""

    def factors(self, t: float) -> np.ndarray:
        return np.exp(-self.rates * t)


@dataclass(frozen=True)
class TranslationGroup:
    """``(U_t f)(x) = f(x + t)`` on a gridded window, with zero inflow.

    Shifts must be integer multiples of ``h``.  On the window ``U_t`` and
    ``U_{-t}`` are exact adjoints of each other and both are contractions;
    norms are preserved while the support stays inside the window.
    """

    grid: SpatialGrid

    @property
    def weight(self) -> float:
        return self.grid.h

    def apply(self, t: float, f):
        s = self.grid.steps(t)
        if isinstance(f, GridFunction):
            if f.grid != self.grid:
                raise DimensionError("grid function lives on a different grid")
            return GridFunction(self.grid, shift_axis(f.values, s, 0))
        f = np.asarray(f, dtype=float)
        if f.shape[0] != self.grid.n_points:
            raise DimensionError(f"expected {self.grid.n_points} grid values, got {f.shape[0]}")
        return shift_axis(f, s, 0)


@dataclass(frozen=True)
class DilationFrame:
    """Isometry ``ell``, projection ``pi = ell*`` and group ``U`` with ``pi U_t ell ~ S_t``.

    Big-space vectors are arrays of shape ``(N, M, ...)``: one gridded line
    of ``M`` points per mode.
    """

    rates: np.ndarray
    grid: SpatialGrid
    profiles: np.ndarray = field(repr=False)

    @property
    def n_modes(self) -> int:
        return self.rates.size

    @property
    def n_points(self) -> int:
        return self.grid.n_points

    @property
    def shape(self) -> tuple:
        return (self.n_modes, self.n_points)

    @property
    def weight(self) -> float:
        return self.grid.h

    @property
    def state_weight(self) -> float:
        return 1.0

    def _bcast(self, ndim: int) -> np.ndarray:
        return self.profiles.reshape(self.profiles.shape + (1,) * (ndim - 1))

    def embed(self, v) -> np.ndarray:
        """``ell v``; trailing axes of ``v`` (e.g. operator columns) are kept."""
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.n_modes:
            raise DimensionError(f"state has {v.shape[0]} modes, frame has {self.n_modes}")
        return self._bcast(v.ndim) * v[:, None, ...]

    def project(self, g) -> np.ndarray:
        """``pi g``, the discrete adjoint of :meth:`embed`."""
        g = np.asarray(g, dtype=float)
        if g.shape[:2] != self.shape:
            raise DimensionError(f"big-space vector has shape {g.shape[:2]}, frame has {self.shape}")
        return self.grid.h * np.sum(self._bcast(g.ndim - 1) * g, axis=1)

    def complement(self, g) -> np.ndarray:
        """Orthogonal projection onto ``ker(pi)``: ``g - ell pi g``."""
        return np.asarray(g, dtype=float) - self.embed(self.project(g))

    def apply(self, t: float, g) -> np.ndarray:
        """Group action ``U_t`` (per-mode translation by ``t``)."""
        g = np.asarray(g, dtype=float)
        if g.shape[:2] != self.shape:
            raise DimensionError(f"big-space vector has shape {g.shape[:2]}, frame has {self.shape}")
        return shift_axis(g, self.grid.steps(t), 1)

    def project_shifted(self, t: float, g) -> np.ndarray:
        """``pi U_t g`` without materializing the shifted vector."""
        s = self.grid.steps(t)
        g = np.asarray(g, dtype=float)
        m = self.n_points
        prof = self._bcast(g.ndim - 1)
        if abs(s) >= m:
            return np.zeros((self.n_modes,) + g.shape[2:])
        if s >= 0:
            return self.grid.h * np.sum(prof[:, : m - s] * g[:, s:], axis=1)
        return self.grid.h * np.sum(prof[:, -s:] * g[:, : m + s], axis=1)

    def inner(self, g1, g2) -> float:
        return float(self.grid.h * np.sum(np.asarray(g1) * np.asarray(g2)))

    def norm(self, g) -> float:
        return float(np.sqrt(self.inner(g, g)))

    def tail_bounds(self) -> np.ndarray:
        """Per-mode left-boundary truncation ``exp(2 rate_k x_min)``."""
        return np.exp(2.0 * self.rates * self.grid.x_min)

    def summary(self) -> dict:
        return {
            "rates": self.rates.tolist(),
            "grid": {"x_min": self.grid.x_min, "x_max": self.grid.x_max, "h": self.grid.h},
            "n_points": self.n_points,
            "tail_bounds": self.tail_bounds().tolist(),
        }


def build_dilation(rates, grid: SpatialGrid, t_end: float | None = None, tail_tol: float = 1e-10) -> DilationFrame:
    """Construct the translation dilation of ``diag(exp(-rates t))`` on ``grid``.

    Raises :class:`WindowError` when ``exp(2 min(rates) x_min) > tail_tol``
    or when ``x_max < t_end`` (transport by ``U_{-t}`` would clip).
    """
    rates = np.asarray(rates, dtype=float)
    if rates.ndim != 1 or rates.size == 0 or np.any(rates <= 0):
        raise ValueError("rates must be a non-empty vector of positive numbers")
    tail = float(np.exp(2.0 * rates.min() * grid.x_min))
    if tail > tail_tol:
        raise WindowError(f"x_min={grid.x_min} leaves tail exp(2 rate x_min)={tail:.3g} > {tail_tol:.3g}")
    if t_end is not None and grid.x_max < t_end:
        raise WindowError(f"x_max={grid.x_max} is smaller than the horizon {t_end}")
    x = grid.x
    neg = x < 0
    if not neg.any():
        raise WindowError("window contains no negative grid points")
    profiles = np.zeros((rates.size, x.size))
    # exponent shifted by x_min keeps the unnormalized profile away from underflow
    raw = np.exp(rates[:, None] * (x[neg][None, :] - x[neg].max()))
    profiles[:, neg] = raw / np.sqrt(grid.h * np.sum(raw * raw, axis=1, keepdims=True))
    return DilationFrame(rates, grid, profiles)


def dilation_diagram_error(frame: DilationFrame, t_list, k_list=None) -> float:
    """``max_{t,k} || pi U_t ell e_k - exp(-rate_k t) e_k ||``."""
    if k_list is None:
        k_list = range(1, frame.n_modes + 1)
    worst = 0.0
    for t in t_list:
        for k in k_list:
            e = np.zeros(frame.n_modes)
            e[k - 1] = 1.0
            got = frame.project_shifted(t, frame.embed(e))
            want = np.exp(-frame.rates * t) * e
            worst = max(worst, float(np.linalg.norm(got - want)))
    return worst


@dataclass(frozen=True)
class GroupFrame:
    """Degenerate frame ``ell = pi = I`` around a group acting on the state space itself."""

    group: object

    @property
    def weight(self) -> float:
        return getattr(self.group, "weight", 1.0)

    @property
    def state_weight(self) -> float:
        return self.weight

    def embed(self, v) -> np.ndarray:
        return np.array(v, dtype=float)

    def project(self, g) -> np.ndarray:
        return np.array(g, dtype=float)

    def complement(self, g) -> np.ndarray:
        return np.zeros_like(np.asarray(g, dtype=float))

    def apply(self, t: float, g) -> np.ndarray:
        return self.group.apply(t, g)

    def project_shifted(self, t: float, g) -> np.ndarray:
        return self.group.apply(t, g)
