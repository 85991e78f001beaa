"""CSV writers and run manifests."""

from __future__ import annotations

import csv
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from lambdachirp import __version__, kernels
from lambdachirp.config import config_to_dict
from lambdachirp.dynamics import SimulationConfig, Trajectory, max_phase_per_step, MAX_PHASE_PER_STEP
from lambdachirp.sweep import SweepResult, SweepSpec

TRAJECTORY_HEADER = (
    "t_fs", "rho11", "rho22", "rho33", "re_rho21", "im_rho21", "abs_rho21",
    "re_rho31", "im_rho31", "re_rho32", "im_rho32", "rho_BB", "rho_DD",
    "trace_err", "purity",
)
SWEEP_HEADER = ("param1", "param2", "observable", "status")
MANIFEST_SUFFIX = ".manifest.yaml"


def fmt(value: float) -> str:
    """12 significant digits; ``nan`` for missing values."""
    return format(float(value), ".12g")


@dataclass
class RunManifest:
    """Sidecar metadata; ``config`` alone is enough to redo the run."""

    config: dict
    equation_variant: str
    wall_clock_s: float
    diagnostics: dict = field(default_factory=dict)
    output: str = ""
    tool: str = "lambdachirp"
    version: str = __version__
    kernel_backend: str = field(default_factory=kernels.backend_name)

    def to_yaml(self) -> str:
        doc = asdict(self)
        ordered = {k: doc[k] for k in ("tool", "version", "kernel_backend", "equation_variant",
                                       "wall_clock_s", "output", "diagnostics", "config")}
        return yaml.safe_dump(ordered, sort_keys=False, default_flow_style=False)


def trajectory_diagnostics(traj: Trajectory, config: SimulationConfig) -> dict:
    phase = max_phase_per_step(config)
    return {
        "samples": len(traj),
        "max_trace_error": float(np.max(traj.trace_error)),
        "max_hermiticity_error": float(np.max(traj.hermiticity_error)),
        "min_purity": float(np.min(traj.purity)),
        "max_phase_per_step_rad": float(phase),
        "resolution_warning": bool(phase > MAX_PHASE_PER_STEP),
    }


def run_manifest(config: SimulationConfig, traj: Trajectory, wall_clock_s: float, output: str = "") -> RunManifest:
    return RunManifest(
        config=config_to_dict(config),
        equation_variant=config.equation_variant.value,
        wall_clock_s=float(wall_clock_s),
        diagnostics=trajectory_diagnostics(traj, config),
        output=output,
    )


def sweep_manifest(result: SweepResult, wall_clock_s: float, output: str = "") -> RunManifest:
    spec: SweepSpec = result.spec
    finite = result.trace_error_max[np.isfinite(result.trace_error_max)]
    return RunManifest(
        config=config_to_dict(spec),
        equation_variant=spec.base.equation_variant.value,
        wall_clock_s=float(wall_clock_s),
        diagnostics={
            "cells": int(result.values.size),
            "failed_cells": result.n_failed,
            "max_trace_error": float(finite.max()) if finite.size else None,
            "max_phase_per_step_rad": float(max_phase_per_step(spec.base)),
            "solver": dict(result.provenance),
        },
        output=output,
    )


def manifest_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + MANIFEST_SUFFIX)


def write_manifest(manifest: RunManifest, path) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(manifest.to_yaml())
    return Path(path)


def write_trajectory_csv(traj: Trajectory, manifest: RunManifest | None, path) -> Path:
    """Write ``traj`` as CSV and its manifest next to it (``<path>.manifest.yaml``)."""
    if len(traj) == 0:
        raise ValueError("refusing to write an empty trajectory")
    path = Path(path)
    cols = traj.columns()
    data = np.column_stack([cols[name] for name in TRAJECTORY_HEADER])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_HEADER)
        for row in data:
            w.writerow([fmt(v) for v in row])
    if manifest is not None:
        manifest.output = os.path.basename(path)
        write_manifest(manifest, manifest_path(path))
    return path


def write_sweep_csv(result: SweepResult, path, manifest: RunManifest | None = None) -> Path:
    """Row-major ``param1,param2,observable,status`` table."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for _, _, v1, v2, value, status in result.cells():
            w.writerow([fmt(v1), fmt(v2), fmt(value), status])
    if manifest is not None:
        manifest.output = os.path.basename(path)
        write_manifest(manifest, manifest_path(path))
    return path


def read_sweep_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[str]]:
    """Load a sweep table back as ``(param1, param2, observable, status)`` columns."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != SWEEP_HEADER:
        raise ValueError(f"unexpected sweep header {rows[0]!r}")
    body = rows[1:]
    cols = [np.array([float(r[k]) for r in body]) for k in range(3)]
    return cols[0], cols[1], cols[2], [r[3] for r in body]
