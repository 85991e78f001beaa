"""Command-line entry point.

Exit status: 0 success, 1 invalid configuration or arguments,
2 numerical failure (diverged run or failed self-check), 3 sweep finished
with failed cells.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from lambdachirp import __version__
from lambdachirp.config import ConfigError, load_config
from lambdachirp.core import ValidationError
from lambdachirp.dynamics import EquationVariant, NumericalBlowupError, SimulationConfig, integrate
from lambdachirp.figures import figure3_spec, figure_config
from lambdachirp.outputs import (
    run_manifest,
    sweep_manifest,
    write_sweep_csv,
    write_trajectory_csv,
)
from lambdachirp.sweep import SweepSpec, default_workers, plateau_summary, run_sweep

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_PARTIAL_SWEEP = 3

log = logging.getLogger("lambdachirp")


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lambdachirp",
        description="Non-RWA Lambda-atom dynamics under two cubically chirped few-cycle pulses.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="integrate one configuration and write a trajectory CSV")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--out", required=True, type=Path)
    run.add_argument("--dt", type=_positive_float, help="step size in fs")
    run.add_argument("--t-span", type=_positive_float,
                     help="window length in fs, centred on t = 0")
    run.add_argument("--variant", choices=["derived", "paper-literal"])

    sweep = sub.add_parser("sweep", help="run a two-parameter grid and write a sweep CSV")
    sweep.add_argument("--config", required=True, type=Path)
    sweep.add_argument("--out", required=True, type=Path)
    sweep.add_argument("--workers", type=_positive_int,
                       help="worker processes (default: $LAMBDACHIRP_WORKERS or CPU count)")

    rep = sub.add_parser("reproduce", help="regenerate a reference scenario (2: coherence, 3: robustness map, 4: transfer)")
    rep.add_argument("--figure", required=True, type=int, choices=[2, 3, 4])
    rep.add_argument("--out", required=True, type=Path, help="output directory")
    rep.add_argument("--workers", type=_positive_int)

    sub.add_parser("check", help="run the physics self-test")
    return parser


def _apply_overrides(config: SimulationConfig, args) -> SimulationConfig:
    changes = {}
    if args.dt is not None:
        changes["dt"] = args.dt
    if args.t_span is not None:
        changes["t_start"] = -args.t_span / 2
        changes["t_end"] = args.t_span / 2
    if args.variant is not None:
        changes["equation_variant"] = EquationVariant(args.variant.replace("-", "_"))
    return config.with_changes(**changes) if changes else config


def _run_single(config: SimulationConfig, out: Path) -> int:
    t0 = time.perf_counter()
    traj = integrate(config)
    manifest = run_manifest(config, traj, time.perf_counter() - t0)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(traj, manifest, out)
    log.info("wrote %s (%d samples)", out, len(traj))
    return EXIT_OK


def _run_sweep(spec: SweepSpec, out: Path, workers: int | None) -> int:
    t0 = time.perf_counter()
    result = run_sweep(spec, workers=workers if workers is not None else default_workers())
    manifest = sweep_manifest(result, time.perf_counter() - t0)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(result, out, manifest)
    summary = plateau_summary(result, 0.45)
    log.info("wrote %s: %d cells, %d failed, %.1f%% >= 0.45",
             out, result.values.size, result.n_failed, 100 * summary.fraction)
    if result.n_failed:
        print(f"lambdachirp: {result.n_failed} sweep cell(s) failed; see status column", file=sys.stderr)
        return EXIT_PARTIAL_SWEEP
    return EXIT_OK


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if isinstance(config, SweepSpec):
        raise ConfigError("config has a sweep section; use the `sweep` subcommand")
    return _run_single(_apply_overrides(config, args), args.out)


def _cmd_sweep(args) -> int:
    spec = load_config(args.config)
    if not isinstance(spec, SweepSpec):
        raise ConfigError("config has no sweep section")
    return _run_sweep(spec, args.out, args.workers)


def _cmd_reproduce(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    if args.figure == 3:
        return _run_sweep(figure3_spec(), args.out / "figure3.csv", args.workers)
    return _run_single(figure_config(args.figure), args.out / f"figure{args.figure}.csv")


def _cmd_check(args) -> int:
    from lambdachirp.selfcheck import run_checks

    return EXIT_OK if run_checks() else EXIT_NUMERICAL


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "reproduce": _cmd_reproduce,
    "check": _cmd_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.captureWarnings(True)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValidationError) as exc:
        print(f"lambdachirp: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"lambdachirp: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalBlowupError as exc:
        print(f"lambdachirp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
