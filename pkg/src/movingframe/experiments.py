"""Named experiments, their parameters and the configuration file format.

A configuration is an INI file read by :mod:`configparser`::

    [experiment]
    name = tanaka
    seed = 7

    [grid]
    n_steps = 512

    [tanaka]
    n_paths = 2000

Keys are ``key = value`` lines inside ``[section]`` headers.  Lines starting
with ``#`` or ``;`` are comments.  Lists are comma separated and schedule
stages are separated by ``;``.  Every key that is not given takes the
experiment's default, and unknown sections or keys are rejected.  The
resolved values are echoed into the report, so a report never relies on a
default that is not written down in it.
"""

from __future__ import annotations

import configparser
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import ito_approx, uniqueness
from .errors import CommensurabilityError, ConfigError
from .moving_frame import CoefficientPair, delta, frame_coefficients, gamma
from .noise import associate_q_wiener, sample_driver, stream_generator, write_driver_csv
from .reports import StatReport, to_jsonable
from .semigroups import DiagonalGroup, DiagonalSemigroup, GroupFrame, TranslationGroup, build_dilation, dilation_diagram_error
from .solvers import euler_maruyama, exp_euler_mild
from .spaces import PathRecord, SpatialGrid, TimeGrid, sup_distance

CSV_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Param:
    section: str
    key: str
    kind: str
    default: object
    unit: str
    doc: str

    @property
    def path(self) -> str:
        return f"{self.section}.{self.key}"


_COMMON = (
    Param("experiment", "seed", "int", 0, "-", "root seed of all random streams"),
    Param("grid", "t_end", "float", 1.0, "time", "horizon T of the time grid"),
    Param("grid", "n_steps", "int", 256, "steps", "number of time cells (dt = t_end / n_steps)"),
    Param("space", "N", "int", 4, "modes", "number of state modes"),
    Param("space", "K", "int", 4, "modes", "number of driver modes"),
    Param("space", "x_min", "float", -12.0, "length", "left end of the spatial window"),
    Param("space", "x_max", "float", 4.0, "length", "right end of the spatial window"),
    Param("space", "h", "float", 0.0625, "length", "spatial grid spacing"),
)


@dataclass
class Outcome:
    """Checks of one run plus deferred file writers (called after aggregation)."""

    checks: list
    writers: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Experiment:
    name: str
    summary: str
    params: tuple
    overrides: dict
    runner: Callable[["ExperimentConfig"], Outcome]

    def all_params(self) -> list:
        out = []
        for p in _COMMON + self.params:
            if p.path in self.overrides:
                p = Param(p.section, p.key, p.kind, self.overrides[p.path], p.unit, p.doc)
            out.append(p)
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    values: dict

    def __getitem__(self, path: str):
        return self.values[path]

    @property
    def seed(self) -> int:
        return self.values["experiment.seed"]

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self["grid.t_end"], self["grid.n_steps"])

    @property
    def space(self) -> SpatialGrid:
        return SpatialGrid(self["space.x_min"], self["space.x_max"], self["space.h"])

    def echo(self) -> dict:
        out = {"experiment": {"name": self.name}}
        for path, value in self.values.items():
            section, key = path.split(".", 1)
            out.setdefault(section, {})[key] = _format_value(value)
        return to_jsonable(out)


# ---------------------------------------------------------------- parsing


def _parse_value(kind: str, raw: str, path: str):
    raw = raw.strip()
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "floats":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind == "ints":
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if kind == "schedule":
            return tuple(tuple(float(v) for v in stage.split(",")) for stage in raw.split(";") if stage.strip())
    except ValueError as exc:
        raise ConfigError(path, f"cannot read {raw!r} as {kind}: {exc}") from None
    raise ConfigError(path, f"unknown parameter kind {kind}")


def _format_value(value):
    if isinstance(value, tuple) and value and isinstance(value[0], tuple):
        return "; ".join(", ".join(_fmt_num(v) for v in stage) for stage in value)
    if isinstance(value, tuple):
        return [v for v in value]
    return value


def _fmt_num(v: float) -> str:
    if math.isinf(v):
        return "inf"
    return repr(int(v)) if float(v).is_integer() and abs(v) < 1e15 else repr(v)


def default_config(name: str) -> ExperimentConfig:
    exp = get_experiment(name)
    return ExperimentConfig(name, {p.path: p.default for p in exp.all_params()})


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate configuration text."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).splitlines()[0]) from None
    if not parser.has_option("experiment", "name"):
        raise ConfigError("experiment.name", "missing; choose one of " + ", ".join(EXPERIMENTS))
    name = parser.get("experiment", "name").strip()
    if name not in EXPERIMENTS:
        raise ConfigError("experiment.name", f"unknown experiment {name!r}; choose one of " + ", ".join(EXPERIMENTS))
    params = {p.path: p for p in EXPERIMENTS[name].all_params()}
    values = {path: p.default for path, p in params.items()}
    for section in parser.sections():
        for key, raw in parser.items(section):
            path = f"{section}.{key}"
            if path == "experiment.name":
                continue
            if path not in params:
                raise ConfigError(path, f"not a parameter of experiment {name!r}")
            values[path] = _parse_value(params[path].kind, raw, path)
    cfg = ExperimentConfig(name, values)
    validate(cfg)
    return cfg


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def with_overrides(cfg: ExperimentConfig, seed: int | None = None, n_paths: int | None = None) -> ExperimentConfig:
    """Apply command-line ``--seed`` and ``--paths`` overrides and revalidate."""
    values = dict(cfg.values)
    if seed is not None:
        values["experiment.seed"] = int(seed)
    if n_paths is not None:
        key = f"{cfg.name}.n_paths"
        if key not in values:
            raise ConfigError(key, f"experiment {cfg.name!r} has no path count to override")
        values[key] = int(n_paths)
    out = ExperimentConfig(cfg.name, values)
    validate(out)
    return out


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ConfigError(path, message)


def _multiple(a: float, b: float) -> bool:
    q = a / b
    return abs(q - round(q)) <= 1e-9 * max(1.0, abs(q)) and round(q) >= 1


def validate(cfg: ExperimentConfig) -> None:
    """Positivity, window and commensurability checks; raises :class:`ConfigError`."""
    v = cfg.values
    _require(v["experiment.seed"] >= 0, "experiment.seed", "must be a non-negative integer")
    _require(v["grid.t_end"] > 0 and math.isfinite(v["grid.t_end"]), "grid.t_end", "must be positive")
    _require(v["grid.n_steps"] >= 1, "grid.n_steps", "must be a positive integer (dt > 0)")
    for key in ("N", "K"):
        _require(v[f"space.{key}"] >= 1, f"space.{key}", "must be a positive integer")
    _require(v["space.h"] > 0, "space.h", "must be positive")
    _require(v["space.x_max"] > v["space.x_min"], "space.x_max", "must exceed space.x_min")
    _require(_multiple(v["space.x_max"] - v["space.x_min"], v["space.h"]), "space.h", "must divide the window length x_max - x_min")
    for path, value in v.items():
        if path.endswith(".n_paths") or path.endswith("_paths") or path.endswith("n_samples") or path.endswith("n_pairs"):
            _require(value >= 1, path, "must be a positive integer")
        if path.split(".", 1)[1].startswith("tol") or path.endswith("eps"):
            _require(value >= 0, path, "must be non-negative")
    VALIDATORS.get(cfg.name, lambda c: None)(cfg)


def _validate_frame_grid(cfg: ExperimentConfig, dts) -> None:
    v = cfg.values
    for dt in dts:
        _require(_multiple(dt, v["space.h"]), "space.h", f"time step {dt!r} must be an integer multiple of h")
    _require(v["space.x_max"] >= v["grid.t_end"], "space.x_max", "must be at least grid.t_end so transport does not clip")
    _require(v["space.x_min"] < 0, "space.x_min", "must be negative (profiles live on x < 0)")


def _validate_dilation(cfg):
    times = cfg["dilation-check.times"]
    _require(len(times) > 0 and all(t >= 0 for t in times), "dilation-check.times", "needs non-negative times")
    for t in times:
        _require(t == 0 or _multiple(t, cfg["space.h"]), "dilation-check.times", f"{t!r} is not a multiple of h")
    _require(cfg["space.x_max"] >= max(times), "space.x_max", "must cover the largest time")


def _validate_roundtrip(cfg):
    _validate_frame_grid(cfg, [cfg.grid.dt])


def _validate_correspondence(cfg):
    factors = cfg["correspondence.coarsen"]
    _require(len(factors) >= 2 and all(f >= 1 for f in factors), "correspondence.coarsen", "needs at least two positive factors")
    for f in factors:
        _require(cfg["grid.n_steps"] % f == 0, "correspondence.coarsen", f"factor {f} does not divide grid.n_steps")
    _validate_frame_grid(cfg, [cfg.grid.dt * f for f in factors])


def _validate_ito(cfg):
    try:
        schedule = ito_approx.ApproxSchedule(cfg["ito-approx.schedule"])
    except ValueError as exc:
        raise ConfigError("ito-approx.schedule", str(exc)) from None
    _require(cfg["space.N"] == cfg["space.K"], "space.K", "the diagonal integrand needs K = N")
    for stage in schedule.stages:
        try:
            ito_approx.block_cells(int(stage[3]), cfg.grid)
        except CommensurabilityError as exc:
            raise ConfigError("ito-approx.schedule", str(exc)) from None
        _require(float(stage[3]).is_integer(), "ito-approx.schedule", f"m={stage[3]} must be an integer")


def _validate_tanaka(cfg):
    _require(0 < cfg["tanaka.alpha"] < 1, "tanaka.alpha", "must lie in (0, 1)")
    _require(cfg["grid.n_steps"] % 2 == 0, "grid.n_steps", "must be even (reconstruction is repeated at 2 dt)")
    _require(cfg["tanaka.moment_modes"] <= cfg["space.N"], "tanaka.moment_modes", "cannot exceed space.N")
    _require(cfg["tanaka.recon_modes"] <= cfg["space.N"], "tanaka.recon_modes", "cannot exceed space.N")


def _validate_monotone(cfg):
    dt = cfg["grid.t_end"] / cfg["monotone.translation_steps"]
    _require(cfg["monotone.translation_steps"] >= 1, "monotone.translation_steps", "must be a positive integer")
    _require(_multiple(dt, cfg["space.h"]), "monotone.translation_steps", f"translation time step {dt!r} must be a multiple of space.h")
    for key in ("L_neg", "L_pos", "L_mult", "L_translation"):
        _require(cfg[f"monotone.{key}"] >= 0, f"monotone.{key}", "must be non-negative")


VALIDATORS = {
    "dilation-check": _validate_dilation,
    "frame-roundtrip": _validate_roundtrip,
    "correspondence": _validate_correspondence,
    "ito-approx": _validate_ito,
    "tanaka": _validate_tanaka,
    "monotone": _validate_monotone,
}


# ---------------------------------------------------------------- helpers


def _check(name, value, tolerance, passed, provenance, verdict="", notes=None, **extra) -> dict:
    stats = {"value": value, **extra}
    return StatReport(name, stats, tolerance, passed, provenance, verdict, list(notes or [])).to_dict()


def _rates(cfg) -> np.ndarray:
    return np.arange(1, cfg["space.N"] + 1, dtype=float)


def _write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------- runners


def run_dilation_check(cfg: ExperimentConfig) -> Outcome:
    rates = _rates(cfg)
    times = cfg["dilation-check.times"]
    frame = build_dilation(rates, cfg.space, t_end=max(times))
    err = dilation_diagram_error(frame, times)
    rng = stream_generator(cfg.seed, 0)
    adj = iso = 0.0
    for _ in range(cfg["dilation-check.n_pairs"]):
        v = rng.standard_normal(frame.n_modes)
        g = rng.standard_normal(frame.shape)
        adj = max(adj, abs(frame.inner(frame.embed(v), g) - float(np.dot(v, frame.project(g)))))
        iso = max(iso, abs(frame.norm(frame.embed(v)) - float(np.linalg.norm(v))))
    tol, tol_adj = cfg["dilation-check.tol_diagram"], cfg["dilation-check.tol_adjoint"]
    checks = [
        _check("dilation diagram", err, {"max_error": tol}, err <= tol, "semigroups.dilation_diagram_error",
               tail_bounds=frame.tail_bounds().tolist()),
        _check("adjointness", adj, {"max_error": tol_adj}, adj <= tol_adj, "semigroups.DilationFrame.project"),
        _check("isometry", iso, {"max_error": tol_adj}, iso <= tol_adj, "semigroups.DilationFrame.embed"),
    ]
    return Outcome(checks)


def run_frame_roundtrip(cfg: ExperimentConfig) -> Outcome:
    rates = _rates(cfg)
    grid = cfg.grid
    frame = build_dilation(rates, cfg.space, t_end=grid.t_end)
    group = GroupFrame(DiagonalGroup(rates))
    rng = stream_generator(cfg.seed, 0)
    n = grid.n_steps + 1
    worst = worst_group = 0.0
    for _ in range(cfg["frame-roundtrip.n_paths"]):
        v = PathRecord(grid, rng.standard_normal((n, frame.n_modes)))
        worst = max(worst, sup_distance(gamma(frame, delta(frame, v)), v))
        w = PathRecord(grid, rng.standard_normal((n, frame.n_modes)))
        worst_group = max(worst_group, sup_distance(delta(group, gamma(group, w)), w), sup_distance(gamma(group, delta(group, w)), w))
    tol = cfg["frame-roundtrip.tol"]
    return Outcome([
        _check("gamma(delta(v)) = v", worst, {"max_error": tol}, worst <= tol, "moving_frame.gamma/delta"),
        _check("group case round trips", worst_group, {"max_error": tol}, worst_group <= tol, "moving_frame.gamma/delta (GroupFrame)"),
    ])


def correspondence_errors(cfg: ExperimentConfig, keep_first: bool = False):
    """Sup distance between the mild scheme and Gamma of the frame SDE, per coarsening factor."""
    N = cfg["space.N"]
    rates = _rates(cfg)
    fine = cfg.grid
    factors = cfg["correspondence.coarsen"]
    coeffs = CoefficientPair.from_state(lambda t, x: -x, lambda t, x: np.diag(1.0 / rates))
    semigroup = DiagonalSemigroup(rates)
    x0 = np.full(N, cfg["correspondence.x0"])
    frame = build_dilation(rates, cfg.space, t_end=fine.t_end)
    lifted = frame_coefficients(frame, coeffs)
    errors = np.zeros((cfg["correspondence.n_paths"], len(factors)))
    first = None
    for p in range(errors.shape[0]):
        driver = sample_driver(fine, N, cfg.seed, p)
        for j, f in enumerate(factors):
            dr = driver.coarsen(int(f))
            X = exp_euler_mild(semigroup, coeffs, x0, dr)
            Y = euler_maruyama(lifted, frame.embed(x0), dr, weight=frame.weight)
            Xf = gamma(frame, Y)
            errors[p, j] = sup_distance(X, Xf)
            if keep_first and p == 0 and j == int(np.argmin(factors)):
                first = (X, Xf)
    return errors, first


def run_correspondence(cfg: ExperimentConfig) -> Outcome:
    errors, first = correspondence_errors(cfg, keep_first=True)
    factors = cfg["correspondence.coarsen"]
    dts = [cfg.grid.dt * f for f in factors]
    order = np.argsort(dts)[::-1]
    mean = errors.mean(axis=0)[order]
    dts = [dts[i] for i in order]
    decreasing = bool(np.all(np.diff(mean) < 0))
    ratio = float(mean[0] / mean[-1]) if mean[-1] > 0 else math.inf
    tol, min_ratio, tol_agree = cfg["correspondence.tol_final"], cfg["correspondence.min_ratio"], cfg["correspondence.tol_agreement"]
    refine_ok = decreasing and ratio >= min_ratio and mean[-1] <= tol
    notes = []
    if mean.max() <= tol_agree:
        notes.append("both schemes use the same left-endpoint sums, so they agree to rounding at every dt; no refinement trend exists")
    checks = [
        _check("mild vs frame refinement", mean.tolist(), {"strictly_decreasing": True, "min_ratio": min_ratio, "final_error": tol},
               refine_ok, "solvers.exp_euler_mild vs moving_frame.gamma(euler_maruyama)", notes=notes,
               dt=dts, ratio=ratio, strictly_decreasing=decreasing),
        _check("mild vs frame agreement", float(mean.max()), {"max_error": tol_agree}, mean.max() <= tol_agree,
               "solvers.exp_euler_mild vs moving_frame.gamma(euler_maruyama)"),
    ]

    def write_paths(out: Path):
        X, Xf = first
        N = X.state_shape[0]
        header = ["t"] + [f"x_mild_{k}" for k in range(1, N + 1)] + [f"x_frame_{k}" for k in range(1, N + 1)]
        rows = [[repr(float(t))] + [repr(float(v)) for v in np.concatenate([a, b])] for t, a, b in zip(X.times, X.states, Xf.states)]
        _write_rows(out / "paths_correspondence.csv", header, rows)

    return Outcome(checks, {"paths_correspondence.csv": write_paths})


def _diagonal_integrand(N: int):
    k = np.arange(1, N + 1, dtype=float)

    def b_bar(t, x):
        return np.diag(np.exp(-k * t) / k)

    return b_bar


def run_ito_approx(cfg: ExperimentConfig) -> Outcome:
    N = cfg["space.N"]
    grid = cfg.grid
    schedule = ito_approx.ApproxSchedule(cfg["ito-approx.schedule"])
    b_bar = _diagonal_integrand(N)
    x = PathRecord(grid, np.zeros((grid.n_steps + 1, N)))
    drivers = [sample_driver(grid, cfg["space.K"], cfg.seed, p) for p in range(cfg["ito-approx.n_paths"])]
    q_paths = [associate_q_wiener(d) for d in drivers]
    report = ito_approx.convergence_study(b_bar, x, q_paths, schedule, cfg["ito-approx.tol"])
    check = report.to_dict()
    check["statistics"]["value"] = check["statistics"]["mean_sup_error"][-1]

    def write_conv(out: Path):
        ito_approx.write_convergence_csv(report, out / "convergence.csv")

    def write_driver(out: Path):
        write_driver_csv(drivers[0], out / "paths_driver.csv")

    return Outcome([check], {"convergence.csv": write_conv, "paths_driver.csv": write_driver})


def run_tanaka(cfg: ExperimentConfig) -> Outcome:
    grid = cfg.grid
    N = cfg["space.N"]
    n = cfg["tanaka.n_paths"]
    T = grid.t_end
    tc = uniqueness.TanakaConfig(N, grid, n, cfg.seed)
    ens = uniqueness.tanaka_ensemble(tc, sample_times=(T / 2, T))
    under = n < uniqueness.UNDERPOWERED_PATHS
    under_note = [f"only {n} paths (< {uniqueness.UNDERPOWERED_PATHS}); statistics are underpowered"] if under else []

    def verdict(ok):
        return "warn" if under else ""

    checks = []
    bias = 5.0 * grid.dt
    worst, ok = 0.0, True
    detail = []
    for k in range(1, cfg["tanaka.moment_modes"] + 1):
        for t in (T / 2, T):
            sq = ens.x_at[float(t)][:, k - 1] ** 2
            se = float(sq.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
            oracle = float(uniqueness.second_moment_oracle(k, t))
            dev = abs(float(sq.mean()) - oracle)
            allowed = 4.0 * se + bias
            ok &= dev <= allowed
            worst = max(worst, dev / allowed if allowed > 0 else math.inf)
            detail.append({"k": k, "t": t, "mean": float(sq.mean()), "oracle": oracle, "se": se})
    checks.append(_check("second-moment oracle", worst, {"se_multiple": 4.0, "bias_allowance": bias}, ok,
                         "uniqueness.second_moment_oracle", verdict(ok), under_note, table=detail))

    cov = ens.covariation
    mean = cov.mean(axis=0)
    se = cov.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.full_like(mean, math.inf)
    target = np.diag(T / np.arange(1, N + 1) ** 2)
    z = np.abs(mean - target) / np.where(se > 0, se, math.inf)
    z = np.where((se == 0) & (mean == target), 0.0, z)
    ok = bool(np.all(z <= 5.0))
    checks.append(_check("covariation of B", float(z.max()), {"se_multiple": 5.0}, ok, "uniqueness.tanaka_ensemble",
                         verdict(ok), under_note, mean=mean.tolist()))

    alpha = cfg["tanaka.alpha"]
    half = n // 2
    if half >= 100:
        a = ens.x_end[:half, 0]
        flip = uniqueness.ks_two_sample(a, -ens.x_end[half : 2 * half, 0], alpha, "X^1(T) vs -X'^1(T)")
        recon = uniqueness.ks_two_sample(a, ens.phi_end[:half, 0], alpha, "X^1(T) vs Phi(B)^1(T)")
        for r in (flip, recon):
            d = r.to_dict()
            checks.append(_check(f"KS {r.label}", d["statistic"], {"threshold": d["threshold"], "alpha": alpha}, r.passed,
                                 "uniqueness.ks_two_sample", n_a=r.n_a, n_b=r.n_b))
    else:
        checks.append(_check("KS law tests", None, {"min_samples_per_side": 100}, False, "uniqueness.ks_two_sample",
                             "warn", [f"skipped: {half} samples per side"]))

    prob = float(np.mean(2.0 * ens.x_sup[:, 0] > cfg["tanaka.threshold"]))
    residual = float(ens.signflip_defect.max())
    ok = prob >= cfg["tanaka.min_probability"] and residual == 0.0
    checks.append(_check("pathwise non-uniqueness", prob,
                         {"threshold": cfg["tanaka.threshold"], "min_probability": cfg["tanaka.min_probability"], "signflip_residual": 0.0},
                         ok, "uniqueness.pathwise_nonuniqueness_demo", verdict(ok), under_note,
                         signflip_residual=residual, excluded_steps=int(ens.zero_steps.sum()),
                         total_steps=int(grid.n_steps * N * n)))

    m = min(n, cfg["tanaka.recon_paths"])
    modes = cfg["tanaka.recon_modes"]
    drivers = [sample_driver(grid, N, cfg.seed, p) for p in range(m)]
    fine = uniqueness.tanaka_ensemble(tc, drivers=drivers).phi_sup_error[:, :modes].mean(axis=0)
    coarse_cfg = uniqueness.TanakaConfig(N, TimeGrid(T, grid.n_steps // 2), m, cfg.seed)
    coarse = uniqueness.tanaka_ensemble(coarse_cfg, drivers=[d.coarsen(2) for d in drivers]).phi_sup_error[:, :modes].mean(axis=0)
    ratio = fine / coarse
    tol = cfg["tanaka.recon_tol"]
    ok = bool(np.all(fine <= tol) and np.all(np.abs(ratio - 0.5) <= 0.15))
    checks.append(_check("Phi(B) reconstruction", fine.tolist(), {"max_error": tol, "halving_ratio": [0.35, 0.65]}, ok,
                         "uniqueness.tanaka_phi_reconstruct", verdict(ok), under_note,
                         coarse=coarse.tolist(), ratio=ratio.tolist(), n_paths=m))
    checks.append({
        "name": "narrative",
        "statistics": {},
        "tolerance": {},
        "passed": True,
        "provenance": "report narrative",
        "verdict": "info",
        "notes": [
            "uniqueness in law is checked through fixed-time marginals and the Phi(B) functional; path-law equality is not claimed",
            "X and -X share one driver, so pathwise uniqueness fails; by the joint-uniqueness theorem no mild solution exists, which no finite run can witness",
        ],
    })

    def write_paths(out: Path):
        k = min(n, cfg["tanaka.n_csv"])
        header = ["path", "t"] + [f"x_{j}" for j in range(1, N + 1)] + [f"b_{j}" for j in range(1, N + 1)]
        rows = []
        for p in range(k):
            X, B, _ = uniqueness.tanaka_simulate(tc, p)
            for t, xs, bs in zip(grid.times, X.states, B.states):
                rows.append([p, repr(float(t))] + [repr(float(v)) for v in np.concatenate([xs, bs])])
        _write_rows(out / "paths_tanaka.csv", header, rows)

    return Outcome(checks, {"paths_tanaka.csv": write_paths})


class _Identity:
    weight = 1.0

    def apply(self, t, x):
        return np.array(x, dtype=float)


def scalar_families(cfg: ExperimentConfig) -> dict:
    """``name -> (alpha, sigma, L)`` for the three one-dimensional families."""
    const = lambda t, x: np.full((np.size(x), 1), 0.5)
    return {
        "alpha=-x, sigma=const": (lambda t, x: -np.asarray(x), const, cfg["monotone.L_neg"]),
        "alpha=x, sigma=const": (lambda t, x: np.asarray(x, dtype=float), const, cfg["monotone.L_pos"]),
        "alpha=0, sigma=x": (lambda t, x: 0.0 * np.asarray(x), lambda t, x: np.asarray(x, dtype=float).reshape(-1, 1), cfg["monotone.L_mult"]),
    }


def nemytskii_coefficients():
    """Pointwise ``alpha(f) = sin f`` and ``sigma(f) = [0.3 cos f, 0.2 f]``: ``L = 2 + 0.09 + 0.04``."""
    alpha = lambda t, f: np.sin(f)
    sigma = lambda t, f: np.stack([0.3 * np.cos(f), 0.2 * f], axis=1)
    return alpha, sigma


def run_monotone(cfg: ExperimentConfig) -> Outcome:
    eps = cfg["monotone.eps"]
    n_paths = cfg["monotone.n_paths"]
    n_samples = cfg["monotone.n_samples"]
    slack = cfg["monotone.slack"]
    checks = []
    for i, (name, (a, s, L)) in enumerate(scalar_families(cfg).items()):
        rep = uniqueness.monotone_certificate(a, s, L, 1, n_samples, seed=cfg.seed + i)
        checks.append(_check(f"certificate {name}, L={L:g}", rep.statistics["max_excess"], rep.tolerance, rep.passed,
                             rep.provenance))
    a, s, _ = scalar_families(cfg)["alpha=x, sigma=const"]
    rej = uniqueness.monotone_certificate(a, s, cfg["monotone.L_reject"], 1, n_samples, seed=cfg.seed)
    checks.append(_check(f"certificate rejects alpha=x with L={cfg['monotone.L_reject']:g}", rej.statistics["max_excess"],
                         {"expected": "fail"}, not rej.passed, rep.provenance))

    grid = cfg.grid
    gronwall_runs = [
        ("alpha=-x, sigma=const", _Identity(), np.array([1.0]), 1, grid),
        ("alpha=x, sigma=const", _Identity(), np.array([1.0]), 1, grid),
    ]
    families = scalar_families(cfg)
    for name, group, y0, K, g in gronwall_runs:
        a, s, L = families[name]
        rep = uniqueness.gronwall_experiment(a, s, group, L, y0, eps, g, n_paths, K, cfg.seed, slack=slack, n_samples=n_samples)
        d = rep.to_dict()
        checks.append(_check(f"gronwall {name}", d["max_ratio_to_bound"], {"ratio_to_bound": slack, "identical_max_diff": 1e-12},
                             rep.passed, "uniqueness.gronwall_experiment", identical_max_diff=d["identical_max_diff"],
                             final_mean_sq_gap=d["final_mean_sq_gap"], final_bound=d["final_bound"]))

    space = cfg.space
    tg = TranslationGroup(space)
    a, s = nemytskii_coefficients()
    tgrid = TimeGrid(grid.t_end, cfg["monotone.translation_steps"])
    rep = uniqueness.gronwall_experiment(a, s, tg, cfg["monotone.L_translation"], np.exp(-space.x**2), eps, tgrid, n_paths, 2,
                                         cfg.seed, slack=slack, n_samples=n_samples)
    d = rep.to_dict()
    checks.append(_check("gronwall translation group (Nemytskii)", d["max_ratio_to_bound"],
                         {"ratio_to_bound": slack, "identical_max_diff": 1e-12}, rep.passed, "uniqueness.gronwall_experiment",
                         identical_max_diff=d["identical_max_diff"], transformed_certificate=d["transformed_certificate"]["statistics"]))

    a, s, L = families["alpha=0, sigma=x"]
    rep = uniqueness.gronwall_experiment(a, s, _Identity(), L, np.array([1.0]), eps, grid, n_paths, 1, cfg.seed, slack=slack,
                                         n_samples=n_samples)
    d = rep.to_dict()
    expected = eps**2 * (1.0 + grid.dt) ** np.arange(grid.n_steps + 1)
    checks.append(_check("gronwall alpha=0, sigma=x (equality case)", d["max_ratio_to_bound"], {"ratio_to_bound": slack},
                         rep.passed, "uniqueness.gronwall_experiment", "info",
                         ["the expected gap eps^2 (1 + dt)^i sits at the bound, so the sample mean crosses 1.1x on many seeds; reported, not graded"],
                         expected_ratio=float(np.max(expected / rep.bound))))
    return Outcome(checks)


def _P(section, key, kind, default, unit, doc):
    return Param(section, key, kind, default, unit, doc)


EXPERIMENTS = {
    "dilation-check": Experiment(
        "dilation-check",
        "pi U_t ell = S_t on the gridded dilation, plus adjointness and isometry of ell",
        (
            _P("dilation-check", "times", "floats", (0.25, 0.5, 1.0, 2.0), "time", "times t at which the diagram is tested"),
            _P("dilation-check", "n_pairs", "int", 100, "count", "random (v, g) pairs for adjointness and isometry"),
            _P("dilation-check", "tol_diagram", "float", 1e-6, "norm", "max allowed diagram error"),
            _P("dilation-check", "tol_adjoint", "float", 1e-12, "norm", "max allowed adjointness and isometry defect"),
        ),
        {"space.N": 8},
        run_dilation_check,
    ),
    "frame-roundtrip": Experiment(
        "frame-roundtrip",
        "Gamma(Delta(v)) = v on the dilation and both round trips for a group",
        (
            _P("frame-roundtrip", "n_paths", "int", 100, "count", "random paths tested"),
            _P("frame-roundtrip", "tol", "float", 1e-12, "norm", "max allowed sup error"),
        ),
        {"space.N": 8, "space.x_max": 1.25, "space.h": 1.0 / 256},
        run_frame_roundtrip,
    ),
    "correspondence": Experiment(
        "correspondence",
        "exponential Euler for the diagonal SPDE vs Gamma of Euler-Maruyama for the frame SDE",
        (
            _P("correspondence", "n_paths", "int", 32, "count", "Monte Carlo paths"),
            _P("correspondence", "coarsen", "ints", (16, 4, 1), "steps", "coarsening factors applied to grid.n_steps"),
            _P("correspondence", "x0", "float", 0.5, "state", "initial value of every mode"),
            _P("correspondence", "tol_final", "float", 0.02, "norm", "max mean sup error at the finest dt"),
            _P("correspondence", "min_ratio", "float", 3.0, "-", "min ratio of coarsest to finest error"),
            _P("correspondence", "tol_agreement", "float", 1e-6, "norm", "max mean sup error at any dt"),
        ),
        {"grid.n_steps": 1024, "space.x_max": 1.25, "space.h": 1.0 / 1024},
        run_correspondence,
    ),
    "ito-approx": Experiment(
        "ito-approx",
        "staged Riemann sums (HS cut j, rank k, mollifier l, blocks m) vs the fine Ito sum",
        (
            _P("ito-approx", "n_paths", "int", 16, "count", "Monte Carlo paths"),
            _P("ito-approx", "schedule", "schedule", ((1.0, 1.0, 16.0, 16.0), (10.0, 2.0, 64.0, 64.0), (100.0, 4.0, 256.0, 256.0), (1e12, 4.0, 4096.0, 4096.0)),
               "(HS norm, modes, 1/time, 1/time)", "stages j, k, l, m; nondecreasing"),
            _P("ito-approx", "tol", "float", 0.01, "norm", "max mean sup error of the last stage"),
        ),
        {"grid.n_steps": 4096},
        run_ito_approx,
    ),
    "tanaka": Experiment(
        "tanaka",
        "diagonal Tanaka SPDE: moments, covariation, law tests, sign flip, Phi(B) reconstruction",
        (
            _P("tanaka", "n_paths", "int", 20000, "count", "Monte Carlo paths (halves feed the two-sample tests)"),
            _P("tanaka", "alpha", "float", 0.001, "probability", "KS significance level"),
            _P("tanaka", "threshold", "float", 0.1, "state", "gap threshold for sup 2|X^1|"),
            _P("tanaka", "min_probability", "float", 0.9, "probability", "required P(sup 2|X^1| > threshold)"),
            _P("tanaka", "moment_modes", "int", 3, "modes", "modes checked against the moment oracle"),
            _P("tanaka", "recon_paths", "int", 500, "count", "paths used for the reconstruction refinement check"),
            _P("tanaka", "recon_modes", "int", 4, "modes", "modes checked for reconstruction"),
            _P("tanaka", "recon_tol", "float", 0.01, "state", "max mean sup reconstruction error"),
            _P("tanaka", "n_csv", "int", 8, "count", "paths written to paths_tanaka.csv"),
        ),
        {"grid.n_steps": 1024},
        run_tanaka,
    ),
    "monotone": Experiment(
        "monotone",
        "monotonicity certificates and Gronwall mean-square gap bounds",
        (
            _P("monotone", "n_paths", "int", 64, "count", "Monte Carlo paths per Gronwall run"),
            _P("monotone", "eps", "float", 0.1, "state", "initial gap"),
            _P("monotone", "slack", "float", 1.1, "-", "allowed factor over eps^2 exp(L t)"),
            _P("monotone", "n_samples", "int", 2000, "count", "random pairs per certificate"),
            _P("monotone", "L_neg", "float", 0.0, "1/time", "constant for alpha=-x"),
            _P("monotone", "L_pos", "float", 2.0, "1/time", "constant for alpha=x"),
            _P("monotone", "L_mult", "float", 1.0, "1/time", "constant for sigma=x"),
            _P("monotone", "L_reject", "float", 1.0, "1/time", "too-small constant for alpha=x (must be rejected)"),
            _P("monotone", "L_translation", "float", 2.13, "1/time", "constant for the Nemytskii coefficients"),
            _P("monotone", "translation_steps", "int", 16, "steps", "time steps of the translation-group run"),
        ),
        {"space.x_min": -4.0, "space.x_max": 4.0, "space.h": 0.0625},
        run_monotone,
    ),
}


def get_experiment(name: str) -> Experiment:
    try:
        return EXPERIMENTS[name]
    except KeyError:
        raise ConfigError("experiment.name", f"unknown experiment {name!r}") from None


def list_experiments() -> str:
    """Text table of experiments with their parameters, units and defaults."""
    lines = []
    for exp in EXPERIMENTS.values():
        lines.append(f"{exp.name}: {exp.summary}")
        for p in exp.all_params():
            default = _format_value(p.default)
            if isinstance(default, list):
                default = ", ".join(_fmt_num(v) if isinstance(v, float) else str(v) for v in default)
            lines.append(f"    {p.path:<32} {str(default):<40} [{p.unit}] {p.doc}")
        lines.append("")
    return "\n".join(lines)


def config_text(cfg: ExperimentConfig) -> str:
    """Render a configuration back into the INI format."""
    sections: dict = {"experiment": [f"name = {cfg.name}"]}
    for path, value in cfg.values.items():
        section, key = path.split(".", 1)
        v = _format_value(value)
        if isinstance(v, list):
            v = ", ".join(_fmt_num(x) if isinstance(x, float) else str(x) for x in v)
        elif isinstance(v, float):
            v = repr(v)
        sections.setdefault(section, []).append(f"{key} = {v}")
    return "\n".join(f"[{s}]\n" + "\n".join(lines) + "\n" for s, lines in sections.items())
