"""Truncated cylindrical Wiener drivers and their associated Q-Wiener processes.

Every driver is a deterministic function of ``(seed, stream_id, grid, K)``.
Streams come from the counter-based Philox generator keyed through a
``SeedSequence`` whose spawn key is the stream id, so distinct paths can be
generated independently and in any order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, SingularEmbeddingError
from .spaces import TimeGrid


def stream_generator(seed: int, stream_id: int) -> np.random.Generator:
    """Independent generator for ``(seed, stream_id)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class DriverBundle:
    """Increments of ``K`` independent Brownian motions on ``grid``.

    ``increments[i, k]`` is ``beta_k(t_{i+1}) - beta_k(t_i)``.
    """

    grid: TimeGrid
    increments: np.ndarray
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        inc = np.asarray(self.increments, dtype=float)
        if inc.ndim != 2 or inc.shape[0] != self.grid.n_steps:
            raise DimensionError(f"increments must have shape ({self.grid.n_steps}, K), got {inc.shape}")
        object.__setattr__(self, "increments", inc)

    @property
    def K(self) -> int:
        return self.increments.shape[1]

    def cumulative(self) -> np.ndarray:
        """Brownian paths at grid points, shape ``(n_steps + 1, K)``, starting at 0."""
        out = np.zeros((self.grid.n_steps + 1, self.K))
        np.cumsum(self.increments, axis=0, out=out[1:])
        return out

    def scaled(self, factor: float) -> "DriverBundle":
        return DriverBundle(self.grid, factor * self.increments, self.seed, self.stream_id)

    def coarsen(self, factor: int) -> "DriverBundle":
        """Sum blocks of ``factor`` increments (same Brownian path, coarser grid)."""
        n = self.grid.n_steps
        if n % factor:
            raise DimensionError(f"cannot coarsen {n} steps by {factor}")
        inc = self.increments.reshape(n // factor, factor, self.K).sum(axis=1)
        return DriverBundle(TimeGrid(self.grid.t_end, n // factor), inc, self.seed, self.stream_id)


def sample_driver(grid: TimeGrid, K: int, seed: int, stream_id: int = 0) -> DriverBundle:
    """Draw i.i.d. ``N(0, dt)`` increments for ``K`` modes."""
    if K < 1:
        raise ValueError(f"K must be positive, got {K}")
    rng = stream_generator(seed, stream_id)
    inc = rng.standard_normal((grid.n_steps, K)) * np.sqrt(grid.dt)
    return DriverBundle(grid, inc, int(seed), int(stream_id))


def zero_driver(grid: TimeGrid, K: int) -> DriverBundle:
    return DriverBundle(grid, np.zeros((grid.n_steps, K)))


def default_j_diag(K: int) -> np.ndarray:
    """``J = diag(1/k)``, so ``Q = J J* = diag(1/k^2)``."""
    return 1.0 / np.arange(1, K + 1)


@dataclass(frozen=True)
class QWienerPath:
    """Coordinates of ``W_bar = sum_k beta_k J e_k`` at grid points.

    ``lam`` holds the eigenvalues of ``Q``; column ``k`` of ``cumulative``
    has increments of variance ``lam[k] * dt``.
    """

    grid: TimeGrid
    cumulative: np.ndarray
    lam: np.ndarray
    seed: int = 0
    stream_id: int = 0

    @property
    def K(self) -> int:
        return self.cumulative.shape[1]

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.cumulative, axis=0)


def associate_q_wiener(driver: DriverBundle, j_diag=None) -> QWienerPath:
    """Q-Wiener process associated with ``driver`` through ``J = diag(j_diag)``."""
    if j_diag is None:
        j_diag = default_j_diag(driver.K)
    j = np.asarray(j_diag, dtype=float)
    if j.shape != (driver.K,):
        raise DimensionError(f"j_diag has shape {j.shape}, driver has K={driver.K}")
    if np.any(j <= 0):
        raise ValueError("J must be one-to-one: all j_diag entries must be positive")
    cum = driver.cumulative() * j
    return QWienerPath(driver.grid, cum, j * j, driver.seed, driver.stream_id)


def recover_components(q_path: QWienerPath) -> DriverBundle:
    """Invert :func:`associate_q_wiener`: ``beta_k = <W_bar, e_k> / sqrt(lam_k)``."""
    lam = np.asarray(q_path.lam, dtype=float)
    if np.any(lam <= 0):
        raise SingularEmbeddingError("covariance eigenvalue lam_k = 0; the embedding is not invertible")
    return DriverBundle(q_path.grid, q_path.increments / np.sqrt(lam), q_path.seed, q_path.stream_id)


def write_driver_csv(driver: DriverBundle, path) -> Path:
    """Dump cumulative driver values with header ``t, beta_1, ..., beta_K``."""
    path = Path(path)
    cum = driver.cumulative()
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"beta_{k}" for k in range(1, driver.K + 1)])
        for t, row in zip(driver.grid.times, cum):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in row])
    return path
