"""Command-line runner: ``movingframe run <config>`` and ``movingframe list``.

Exit status is 0 when no check fails (``warn`` and ``info`` verdicts are
allowed), 1 when a check fails, 2 for an invalid configuration and 3 when a
solver diverges.  Nothing is written unless the whole run completes.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .errors import ConfigError, DivergenceError
from .experiments import EXPERIMENTS, ExperimentConfig, list_experiments, load_config, with_overrides
from .reports import to_jsonable

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3


def overall_verdict(checks) -> str:
    verdicts = {c["verdict"] for c in checks}
    if "fail" in verdicts:
        return "fail"
    return "warn" if "warn" in verdicts else "pass"


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Run ``cfg`` and return the report; files go to ``out_dir`` only on success."""
    start = time.perf_counter()
    outcome = EXPERIMENTS[cfg.name].runner(cfg)
    report = {
        "version": __version__,
        "experiment": cfg.name,
        "seed": cfg.seed,
        "config": cfg.echo(),
        "checks": outcome.checks,
        "verdict": overall_verdict(outcome.checks),
        "files": ["report.json"] + sorted(outcome.writers),
        "wall_time_s": time.perf_counter() - start,
    }
    report = to_jsonable(report)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for write in outcome.writers.values():
            write(out)
        (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="movingframe", description="moving-frame SPDE experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the experiment described by a config file")
    run.add_argument("config", type=Path)
    run.add_argument("--out", type=Path, default=Path("results"), help="output directory (default: results)")
    run.add_argument("--seed", type=int, default=None, help="override experiment.seed")
    run.add_argument("--paths", type=int, default=None, help="override the experiment's n_paths")
    sub.add_parser("list", help="list experiments, parameters and defaults")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        print(list_experiments())
        return EXIT_OK
    try:
        cfg = with_overrides(load_config(args.config), args.seed, args.paths)
    except ConfigError as exc:
        print(f"invalid config {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_experiment(cfg, args.out)
    except DivergenceError as exc:
        print(f"{cfg.name}: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    for check in report["checks"]:
        print(f"[{check['verdict']:>4}] {check['name']}")
    print(f"{cfg.name}: {report['verdict']} ({report['wall_time_s']:.1f} s) -> {args.out}")
    return EXIT_FAIL if report["verdict"] == "fail" else EXIT_OK
