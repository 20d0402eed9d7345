"""Uniqueness experiments: the diagonal Tanaka SPDE and monotone coefficients.

The Tanaka SPDE ``dX = A X dt + sigma(X) dW`` with ``A e_k = -k e_k`` and
``sigma(h) = diag(sgn(h_k) / k)`` decouples into scalar modes.  Each mode is
stepped with exponential Euler::

    X_{i+1} = exp(-k dt) (X_i + sgn(X_i) dbeta_i / k)
    B_{i+1} = B_i + sgn(X_i) dbeta_i / k

``X = Phi(B)`` is recovered from ``B`` by ``X(t) = B(t) - k int_0^t exp(-k(t-s)) B(s) ds``
with the trapezoidal rule, written as the stable recursion
``J_{i+1} = exp(-k dt) J_i + dt/2 (exp(-k dt) B_i + B_{i+1})``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import CertificateError, DimensionError, PreconditionError
from .noise import DriverBundle, sample_driver, stream_generator
from .reports import StatReport
from .spaces import PathRecord, TimeGrid

UNDERPOWERED_PATHS = 100


def sgn(x):
    """Sign with ``sgn(0) = -1``: ``+1`` if ``x > 0`` else ``-1``."""
    out = np.where(np.asarray(x) > 0, 1.0, -1.0)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class TanakaConfig:
    n_modes: int
    grid: TimeGrid
    n_paths: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.n_modes + 1, dtype=float)


def _tanaka_step(x, b, dbeta, decay, inv_k):
    s = np.where(x > 0, 1.0, -1.0)
    db = s * dbeta * inv_k
    return decay * (x + db), b + db


def tanaka_simulate(cfg: TanakaConfig, stream_id: int, driver: DriverBundle | None = None):
    """One path of the Tanaka SPDE; returns ``(X, B, driver)``."""
    if driver is None:
        driver = sample_driver(cfg.grid, cfg.n_modes, cfg.seed, stream_id)
    if driver.K != cfg.n_modes or not driver.grid.matches(cfg.grid):
        raise DimensionError("driver does not match the Tanaka configuration")
    n = cfg.grid.n_steps
    decay = np.exp(-cfg.modes * cfg.grid.dt)
    inv_k = 1.0 / cfg.modes
    X = np.zeros((n + 1, cfg.n_modes))
    B = np.zeros((n + 1, cfg.n_modes))
    for i in range(n):
        X[i + 1], B[i + 1] = _tanaka_step(X[i], B[i], driver.increments[i], decay, inv_k)
    return PathRecord(cfg.grid, X), PathRecord(cfg.grid, B), driver


def tanaka_phi_reconstruct(B: PathRecord) -> PathRecord:
    """``Phi(B)^k(t) = B^k(t) - k exp(-k t) int_0^t exp(k s) B^k(s) ds`` (trapezoidal)."""
    b = B.states
    n_modes = b.shape[1]
    k = np.arange(1, n_modes + 1, dtype=float)
    dt = B.grid.dt
    decay = np.exp(-k * dt)
    J = np.zeros_like(b)
    for i in range(B.grid.n_steps):
        J[i + 1] = decay * J[i] + 0.5 * dt * (decay * b[i] + b[i + 1])
    return PathRecord(B.grid, b - k * J, B.weight)


def signflip_residual(X: PathRecord, driver: DriverBundle, cfg: TanakaConfig) -> tuple[float, int]:
    """Defect of ``-X`` in the Tanaka recursion driven by ``driver``.

    Steps where ``X_i^k == 0`` exactly are skipped (``sgn(0) = -1`` breaks the
    symmetry there).  Returns ``(max defect, number of skipped steps)``.
    """
    decay = np.exp(-cfg.modes * cfg.grid.dt)
    y = -X.states
    # same operation order as the forward step, so the comparison is exact
    pred = decay * (y[:-1] + np.where(y[:-1] > 0, 1.0, -1.0) * driver.increments * (1.0 / cfg.modes))
    defect = np.abs(y[1:] - pred)
    zero = X.states[:-1] == 0.0
    defect[zero] = 0.0
    return float(defect.max()), int(zero.sum())


@dataclass
class TanakaEnsemble:
    """Streaming statistics of many Tanaka paths (full paths are not kept)."""

    cfg: TanakaConfig
    stream_ids: np.ndarray
    x_at: dict
    x_sup: np.ndarray
    x_end: np.ndarray
    b_end: np.ndarray
    phi_end: np.ndarray
    phi_sup_error: np.ndarray
    covariation: np.ndarray
    signflip_defect: np.ndarray
    zero_steps: np.ndarray


def tanaka_ensemble(cfg: TanakaConfig, stream_ids=None, sample_times=(), batch: int = 2048, drivers=None) -> TanakaEnsemble:
    """Simulate paths for ``stream_ids`` (default ``0..n_paths-1``) in vectorized batches.

    Path ``p`` uses the driver of stream ``stream_ids[p]``, so results match
    :func:`tanaka_simulate` path by path.
    """
    if drivers is not None:
        drivers = list(drivers)
        stream_ids = np.array([d.stream_id for d in drivers])
    elif stream_ids is None:
        stream_ids = np.arange(cfg.n_paths)
    stream_ids = np.asarray(stream_ids)
    grid = cfg.grid
    n, N, P = grid.n_steps, cfg.n_modes, stream_ids.size
    dt = grid.dt
    sample_idx = {float(t): grid.index_of(t) for t in sample_times}
    decay = np.exp(-cfg.modes * dt)
    inv_k = 1.0 / cfg.modes

    x_at = {t: np.zeros((P, N)) for t in sample_idx}
    x_sup = np.zeros((P, N))
    x_end = np.zeros((P, N))
    b_end = np.zeros((P, N))
    phi_end = np.zeros((P, N))
    phi_err = np.zeros((P, N))
    cov = np.zeros((P, N, N))
    defect = np.zeros(P)
    zeros = np.zeros(P, dtype=int)

    for lo in range(0, P, batch):
        hi = min(lo + batch, P)
        if drivers is not None:
            inc = np.stack([d.increments for d in drivers[lo:hi]], axis=1)
        else:
            inc = np.stack([sample_driver(grid, N, cfg.seed, int(s)).increments for s in stream_ids[lo:hi]], axis=1)
        m = hi - lo
        x = np.zeros((m, N))
        b = np.zeros((m, N))
        J = np.zeros((m, N))
        sup = np.zeros((m, N))
        perr = np.zeros((m, N))
        c = np.zeros((m, N, N))
        dmax = np.zeros(m)
        zc = np.zeros(m, dtype=int)
        for t, i in sample_idx.items():
            if i == 0:
                x_at[t][lo:hi] = x
        for i in range(n):
            dbeta = inc[i]
            x_new, b_new = _tanaka_step(x, b, dbeta, decay, inv_k)
            # sign-flip recursion for -X, skipping exact zeros
            y, y_new = -x, -x_new
            pred = decay * (y + np.where(y > 0, 1.0, -1.0) * dbeta * inv_k)
            d = np.abs(y_new - pred)
            z = x == 0.0
            d[z] = 0.0
            dmax = np.maximum(dmax, d.max(axis=1))
            zc += z.sum(axis=1)
            db = b_new - b
            c += db[:, :, None] * db[:, None, :]
            J = decay * J + 0.5 * dt * (decay * b + b_new)
            phi = b_new - cfg.modes * J
            perr = np.maximum(perr, np.abs(x_new - phi))
            x, b = x_new, b_new
            sup = np.maximum(sup, np.abs(x))
            for t, k in sample_idx.items():
                if k == i + 1:
                    x_at[t][lo:hi] = x
        x_sup[lo:hi] = sup
        x_end[lo:hi] = x
        b_end[lo:hi] = b
        phi_end[lo:hi] = b - cfg.modes * J
        phi_err[lo:hi] = perr
        cov[lo:hi] = c
        defect[lo:hi] = dmax
        zeros[lo:hi] = zc
    return TanakaEnsemble(cfg, stream_ids, x_at, x_sup, x_end, b_end, phi_end, phi_err, cov, defect, zeros)


def second_moment_oracle(k, t):
    """``E[X^k(t)^2] = (1 - exp(-2 k t)) / (2 k^3)`` (Itô isometry, ``sgn^2 = 1``)."""
    k = np.asarray(k, dtype=float)
    return (1.0 - np.exp(-2.0 * k * t)) / (2.0 * k**3)


@dataclass
class LawTestReport:
    statistic: float
    threshold: float
    n_a: int
    n_b: int
    alpha: float
    verdict: str = field(init=False)
    label: str = ""

    def __post_init__(self):
        self.verdict = "pass" if self.statistic <= self.threshold else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "statistic": float(self.statistic),
            "threshold": float(self.threshold),
            "n_a": self.n_a,
            "n_b": self.n_b,
            "alpha": self.alpha,
            "verdict": self.verdict,
        }


def ks_critical_value(alpha: float) -> float:
    """Asymptotic two-sample KS coefficient ``c(alpha) = sqrt(-ln(alpha / 2) / 2)``."""
    return float(np.sqrt(-0.5 * np.log(alpha / 2.0)))


def ks_two_sample(a, b, alpha: float = 0.001, label: str = "") -> LawTestReport:
    """Two-sample Kolmogorov-Smirnov test against the large-sample threshold."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size < 100 or b.size < 100:
        raise PreconditionError(f"KS test needs at least 100 samples per side, got {a.size} and {b.size}")
    d = float(stats.ks_2samp(a, b, method="asymp").statistic)
    thr = ks_critical_value(alpha) * np.sqrt((a.size + b.size) / (a.size * b.size))
    return LawTestReport(d, float(thr), a.size, b.size, alpha, label=label)


def law_flip_test(cfg: TanakaConfig, alpha: float = 0.001, shift: float = 0.0) -> tuple[LawTestReport, LawTestReport]:
    """Compare ``X^1(T)`` with ``-X'^1(T)`` (independent drivers) and with ``Phi(B)^1(T)``.

    ``shift`` is added to the first sample only, to check that the test can fail.
    """
    n = cfg.n_paths
    first = tanaka_ensemble(cfg, np.arange(n))
    second = tanaka_ensemble(cfg, np.arange(n, 2 * n))
    x1 = first.x_end[:, 0] + shift
    flip = ks_two_sample(x1, -second.x_end[:, 0], alpha, label="X^1(T) vs -X'^1(T)")
    recon = ks_two_sample(x1, first.phi_end[:, 0], alpha, label="X^1(T) vs Phi(B)^1(T)")
    return flip, recon


def pathwise_nonuniqueness_demo(cfg: TanakaConfig, threshold: float = 0.1, drivers=None, min_probability: float = 0.9) -> StatReport:
    """With one driver both ``X`` and ``-X`` solve the recursion, yet they differ.

    Reports ``P(sup_t 2|X^1(t)| > threshold)`` and the sign-flip defect.
    """
    ens = tanaka_ensemble(cfg, drivers=drivers)
    gap = 2.0 * ens.x_sup[:, 0]
    prob = float(np.mean(gap > threshold))
    residual = float(ens.signflip_defect.max())
    steps = cfg.grid.n_steps * cfg.n_modes * ens.stream_ids.size
    excluded = int(ens.zero_steps.sum())
    degenerate = excluded == steps
    notes = []
    if degenerate:
        notes.append("every step started from an exact zero state; the sign-flip check is vacuous")
    if ens.stream_ids.size < UNDERPOWERED_PATHS:
        notes.append(f"only {ens.stream_ids.size} paths; probability estimate is underpowered")
    passed = prob >= min_probability and residual == 0.0
    verdict = "pass" if passed else "fail"
    if passed and ens.stream_ids.size < UNDERPOWERED_PATHS:
        verdict = "warn"
    return StatReport(
        name="pathwise non-uniqueness",
        statistics={
            "probability_gap_exceeds": prob,
            "signflip_residual": residual,
            "excluded_steps": excluded,
            "total_steps": steps,
            "degenerate": degenerate,
            "n_paths": int(ens.stream_ids.size),
        },
        tolerance={"threshold": threshold, "min_probability": min_probability, "residual": 0.0},
        passed=passed,
        provenance="uniqueness.pathwise_nonuniqueness_demo",
        verdict=verdict,
        notes=notes,
    )


def _as_L(L):
    return L if callable(L) else (lambda t, n: float(L))


def monotone_certificate(
    alpha,
    sigma,
    L,
    dim: int,
    n_samples: int = 2000,
    radius: float = 1.0,
    t_max: float = 1.0,
    seed: int = 0,
    weight: float = 1.0,
    slack: float = 1e-9,
    times=None,
) -> StatReport:
    """Sample the one-sided Lipschitz condition

    ``2 <x - y, alpha(t,x) - alpha(t,y)> + ||sigma(t,x) - sigma(t,y)||^2 <= L(t, n) ||x - y||^2``

    at random ``t`` and random ``x, y`` in the ball of radius ``n``.
    ``alpha(t, x)`` returns a state, ``sigma(t, x)`` a ``dim x K`` matrix.
    Times are uniform on ``[0, t_max]`` unless a finite set ``times`` is given.
    """
    L_fn = _as_L(L)
    rng = stream_generator(seed, 0)
    worst = -np.inf
    for _ in range(n_samples):
        t = rng.uniform(0.0, t_max) if times is None else float(rng.choice(times))
        pts = []
        for _ in range(2):
            v = rng.standard_normal(dim)
            v *= radius * rng.uniform() ** (1.0 / dim) / np.sqrt(weight * np.dot(v, v))
            pts.append(v)
        x, y = pts
        d = x - y
        da = np.asarray(alpha(t, x)) - np.asarray(alpha(t, y))
        ds = np.asarray(sigma(t, x)) - np.asarray(sigma(t, y))
        lhs = 2.0 * weight * np.dot(d, da) + weight * np.sum(ds * ds)
        worst = max(worst, float(lhs - L_fn(t, radius) * weight * np.dot(d, d)))
    return StatReport(
        name="monotonicity certificate",
        statistics={"max_excess": worst, "n_samples": n_samples, "radius": radius},
        tolerance={"max_excess": slack},
        passed=worst <= slack,
        provenance="uniqueness.monotone_certificate",
    )


def transformed_coefficients(alpha, sigma, group):
    """``alpha_bar(t, x) = U_t* alpha(t, U_t x)``, same for ``sigma``; ``U_t* = U_{-t}``."""

    def alpha_bar(t, x):
        return group.apply(-t, alpha(t, group.apply(t, x)))

    def sigma_bar(t, x):
        return group.apply(-t, sigma(t, group.apply(t, x)))

    return alpha_bar, sigma_bar


@dataclass
class GronwallReport:
    L: float
    eps: float
    times: np.ndarray
    mean_sq_gap: np.ndarray
    bound: np.ndarray
    identical_max_diff: float
    slack: float
    certificate: StatReport
    transformed_certificate: StatReport

    @property
    def passed(self) -> bool:
        return bool(
            np.all(self.mean_sq_gap <= self.slack * self.bound)
            and self.identical_max_diff <= 1e-12
            and self.certificate.passed
            and self.transformed_certificate.passed
        )

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "eps": self.eps,
            "max_ratio_to_bound": float(np.max(self.mean_sq_gap / self.bound)),
            "final_mean_sq_gap": float(self.mean_sq_gap[-1]),
            "final_bound": float(self.bound[-1]),
            "identical_max_diff": self.identical_max_diff,
            "slack": self.slack,
            "certificate": self.certificate.to_dict(),
            "transformed_certificate": self.transformed_certificate.to_dict(),
            "verdict": "pass" if self.passed else "fail",
        }


def gronwall_experiment(
    alpha,
    sigma,
    group,
    L: float,
    y0,
    eps: float,
    grid: TimeGrid,
    n_paths: int,
    K: int,
    seed: int = 0,
    direction=None,
    radius: float | None = None,
    slack: float = 1.1,
    n_samples: int = 500,
) -> GronwallReport:
    """Two Euler-Maruyama runs of the transformed SDE with a common driver.

    Runs from ``y0`` and ``y0 + eps * direction`` and compares the
    mean-square gap with ``eps^2 exp(L t)``.  A third run from ``y0``
    checks that identical inputs give identical paths.  Refuses to run
    unless both the original and the transformed coefficients pass
    :func:`monotone_certificate` with constant ``L``.
    """
    y0 = np.asarray(y0, dtype=float)
    dim = y0.size
    weight = getattr(group, "weight", 1.0)
    if radius is None:
        radius = 2.0 * max(1.0, float(np.sqrt(weight * np.dot(y0, y0))))
    cert = monotone_certificate(alpha, sigma, L, dim, n_samples, radius, grid.t_end, seed, weight)
    if not cert.passed:
        raise CertificateError(f"coefficients violate the monotonicity condition with L={L}: {cert.statistics}")
    a_bar, s_bar = transformed_coefficients(alpha, sigma, group)
    tcert = monotone_certificate(a_bar, s_bar, L, dim, n_samples, radius, grid.t_end, seed + 1, weight, times=grid.times)
    if not tcert.passed:
        raise CertificateError(f"transformed coefficients violate the condition with L={L}")
    if direction is None:
        direction = np.ones(dim)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.sqrt(weight * np.dot(direction, direction))

    dt = grid.dt
    n = grid.n_steps
    gaps = np.zeros((n_paths, n + 1))
    ident = 0.0
    for p in range(n_paths):
        inc = sample_driver(grid, K, seed, p).increments
        y = y0.copy()
        z = y0 + eps * direction
        w = y0.copy()
        gaps[p, 0] = weight * np.sum((y - z) ** 2)
        for i in range(n):
            t = i * dt
            y = y + a_bar(t, y) * dt + s_bar(t, y) @ inc[i]
            z = z + a_bar(t, z) * dt + s_bar(t, z) @ inc[i]
            w = w + a_bar(t, w) * dt + s_bar(t, w) @ inc[i]
            gaps[p, i + 1] = weight * np.sum((y - z) ** 2)
            ident = max(ident, float(np.max(np.abs(y - w))))
    times = grid.times
    return GronwallReport(
        L=float(L),
        eps=float(eps),
        times=times,
        mean_sq_gap=gaps.mean(axis=0),
        bound=eps**2 * np.exp(L * times),
        identical_max_diff=ident,
        slack=slack,
        certificate=cert,
        transformed_certificate=tcert,
    )
