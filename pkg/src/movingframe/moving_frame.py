"""Transport between the SPDE on ``H`` and the SDE on the dilation space.

A *frame* is either a :class:`~movingframe.semigroups.DilationFrame` or a
:class:`~movingframe.semigroups.GroupFrame`; both provide ``embed`` (ell),
``project`` (pi), ``complement`` (projection onto ker pi), ``apply``
(the group ``U_t``) and ``project_shifted`` (``pi U_t``).

Coefficients are evaluated on paths.  An evaluator ``alpha(t, w)`` receives
the grid time and a :class:`~movingframe.spaces.PathRecord` that covers at
least ``[0, t]`` and must not look past ``t``.  Pairs flagged ``markov``
only read ``w(t)``, which lets lifted coefficients skip work on the past.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionError
from .noise import DriverBundle
from .spaces import PathRecord

Evaluator = Callable[[float, PathRecord], np.ndarray]


@dataclass(frozen=True)
class CoefficientPair:
    """Drift ``alpha(t, w) -> state`` and volatility ``sigma(t, w) -> state x K``."""

    alpha: Evaluator
    sigma: Evaluator
    markov: bool = False

    @classmethod
    def from_state(cls, alpha, sigma) -> "CoefficientPair":
        """Wrap functions of ``(t, x)`` acting on the current state only."""

        def a(t, w):
            return alpha(t, w.at(t))

        def s(t, w):
            return sigma(t, w.at(t))

        return cls(a, s, markov=True)


def coeff_a(frame, coeffs: CoefficientPair, t: float, w: PathRecord) -> np.ndarray:
    """``a(t, w) = U_{-t} ell alpha(t, w)``."""
    return frame.apply(-t, frame.embed(coeffs.alpha(t, w)))


def coeff_b(frame, coeffs: CoefficientPair, t: float, w: PathRecord) -> np.ndarray:
    """``b(t, w) = U_{-t} ell sigma(t, w)``, applied to each of the K columns."""
    return frame.apply(-t, frame.embed(coeffs.sigma(t, w)))


def gamma_at(frame, w: PathRecord, i: int, correct: bool = True) -> np.ndarray:
    """``Gamma(w)(t_i) = pi U_{t_i} (w(t_i) - Pi_2 w(0))``."""
    state = w.states[i]
    if correct:
        state = state - frame.complement(w.states[0])
    return frame.project_shifted(w.grid.time(i), state)


def gamma(frame, w: PathRecord, correct: bool = True) -> PathRecord:
    """Map a big-space path to an ``H``-valued path.

    With ``correct=False`` the ``Pi_2 w(0)`` term is dropped, which is
    harmless whenever ``w(0)`` lies in the range of ``ell``.
    """
    base = frame.complement(w.states[0]) if correct else 0.0
    states = np.stack([frame.project_shifted(w.grid.time(i), w.states[i] - base) for i in range(w.grid.n_steps + 1)])
    return PathRecord(w.grid, states, frame.state_weight)


def delta(frame, v: PathRecord) -> PathRecord:
    """Explicit right inverse of :func:`gamma`: ``Delta(v)(t) = U_{-t} ell v(t)``."""
    states = np.stack([frame.apply(-v.grid.time(i), frame.embed(v.states[i])) for i in range(v.grid.n_steps + 1)])
    return PathRecord(v.grid, states, frame.weight)


def project_Z_to_X(frame, Z: PathRecord) -> PathRecord:
    """Pointwise ``pi``."""
    return PathRecord(Z.grid, np.stack([frame.project(z) for z in Z.states]), frame.state_weight)


def _projected_path(frame, w: PathRecord, t: float, markov: bool) -> PathRecord:
    if markov:
        # only w(t) is read; every other slot is filled with the same value
        last = frame.project(w.at(t))
        return PathRecord(w.grid, np.broadcast_to(last, (w.grid.n_steps + 1,) + last.shape), frame.state_weight)
    return project_Z_to_X(frame, w)


def _gamma_path(frame, w: PathRecord, t: float, markov: bool) -> PathRecord:
    if markov:
        last = gamma_at(frame, w, w.grid.index_of(t))
        return PathRecord(w.grid, np.broadcast_to(last, (w.grid.n_steps + 1,) + last.shape), frame.state_weight)
    return gamma(frame, w)


def lift_hat_coefficients(frame, coeffs: CoefficientPair) -> CoefficientPair:
    """``alpha_hat(t, w) = ell alpha(t, pi w)``, ``sigma_hat(t, w) = ell sigma(t, pi w)``."""

    def alpha_hat(t, w):
        return frame.embed(coeffs.alpha(t, _projected_path(frame, w, t, coeffs.markov)))

    def sigma_hat(t, w):
        return frame.embed(coeffs.sigma(t, _projected_path(frame, w, t, coeffs.markov)))

    return CoefficientPair(alpha_hat, sigma_hat, coeffs.markov)


def frame_coefficients(frame, coeffs: CoefficientPair) -> CoefficientPair:
    """SDE coefficients ``alpha_bar(t, w) = a(t, Gamma(w))`` and ``sigma_bar(t, w) = b(t, Gamma(w))``.

    For path-dependent pairs ``Gamma`` is recomputed on the whole prefix, so
    a solve costs O(n^2) projections.
    """

    def alpha_bar(t, w):
        return coeff_a(frame, coeffs, t, _gamma_path(frame, w, t, coeffs.markov))

    def sigma_bar(t, w):
        return coeff_b(frame, coeffs, t, _gamma_path(frame, w, t, coeffs.markov))

    return CoefficientPair(alpha_bar, sigma_bar, coeffs.markov)


def y_from_x(frame, coeffs: CoefficientPair, X: PathRecord, driver: DriverBundle) -> PathRecord:
    """``Y = ell X(0) + int a(s, X) ds + int b(s, X) dW`` by left-endpoint sums."""
    if not X.grid.matches(driver.grid):
        raise DimensionError("path and driver live on different grids")
    grid = X.grid
    dt = grid.dt
    y = frame.embed(X.states[0])
    states = np.empty((grid.n_steps + 1,) + y.shape)
    states[0] = y
    for i in range(grid.n_steps):
        t = grid.time(i)
        past = X.prefix(i)
        states[i + 1] = states[i] + coeff_a(frame, coeffs, t, past) * dt + coeff_b(frame, coeffs, t, past) @ driver.increments[i]
    return PathRecord(grid, states, frame.weight)


def x_from_y(frame, Y: PathRecord) -> PathRecord:
    """``X = Gamma(Y)``: recover the SPDE solution from the SDE solution."""
    return gamma(frame, Y)
