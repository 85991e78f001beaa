"""Two-parameter grid sweeps over the pulse settings."""

from __future__ import annotations

import enum
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from lambdachirp import kernels
from lambdachirp.core import ValidationError
from lambdachirp.dynamics import (
    NumericalBlowupError,
    ResolutionWarning,
    SimulationConfig,
    check_resolution,
    final_observables,
    integrate,
)

WORKERS_ENV = "LAMBDACHIRP_WORKERS"

PARAM_PATHS = (
    "pulse1.peak_rabi",
    "pulse2.peak_rabi",
    "pulse1.chirp",
    "pulse2.chirp",
    "chirp_both",
    "pulse1.width",
    "pulse2.width",
)


class Observable(str, enum.Enum):
    FINAL_ABS_RHO21 = "final_abs_rho21"
    FINAL_RHO22 = "final_rho22"
    FINAL_RHO_DD = "final_rho_DD"
    MAX_RHO33 = "max_rho33"


_OBSERVABLE_ATTR = {
    Observable.FINAL_ABS_RHO21: "abs_rho21",
    Observable.FINAL_RHO22: "rho22",
    Observable.FINAL_RHO_DD: "rho_dd",
    Observable.MAX_RHO33: "max_rho33",
}


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValidationError(f"{WORKERS_ENV} is a positive integer", f"got {env!r}")
        if n < 1:
            raise ValidationError(f"{WORKERS_ENV} is a positive integer", f"got {env!r}")
        return n
    return os.cpu_count() or 1


def apply_param(config: SimulationConfig, path: str, value: float) -> SimulationConfig:
    """Return a copy of ``config`` with the parameter at ``path`` set to ``value``."""
    if path == "chirp_both":
        return replace(
            config,
            pulse1=replace(config.pulse1, chirp=value),
            pulse2=replace(config.pulse2, chirp=value),
        )
    if path not in PARAM_PATHS:
        raise ValidationError(f"parameter in {PARAM_PATHS}", f"got {path!r}")
    which, attr = path.split(".")
    return replace(config, **{which: replace(getattr(config, which), **{attr: value})})


@dataclass(frozen=True)
class SweepAxis:
    param: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.param not in PARAM_PATHS:
            raise ValidationError(f"param in {PARAM_PATHS}", f"got {self.param!r}")
        if isinstance(self.count, bool) or not isinstance(self.count, int) or self.count < 1:
            raise ValidationError("count >= 1", f"got {self.count!r}")
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ValidationError("min and max are finite")
        if not self.min <= self.max:
            raise ValidationError("min <= max", f"got {self.min} > {self.max}")

    def values(self) -> np.ndarray:
        # k/(n-1) form keeps coinciding points bit-identical under refinement
        if self.count == 1:
            return np.array([float(self.min)])
        k = np.arange(self.count)
        return self.min + (self.max - self.min) * (k / (self.count - 1))


@dataclass(frozen=True)
class SweepSpec:
    base: SimulationConfig
    axis1: SweepAxis
    axis2: SweepAxis
    observable: Observable = Observable.FINAL_ABS_RHO21

    def __post_init__(self):
        object.__setattr__(self, "observable", Observable(self.observable))
        # every corner must be a valid configuration
        for v1 in (self.axis1.min, self.axis1.max):
            for v2 in (self.axis2.min, self.axis2.max):
                try:
                    self.cell_config(v1, v2)
                except ValidationError as exc:
                    raise exc.with_key(f"sweep ({self.axis1.param}={v1}, {self.axis2.param}={v2})")

    def cell_config(self, v1: float, v2: float) -> SimulationConfig:
        cfg = apply_param(self.base, self.axis1.param, float(v1))
        return apply_param(cfg, self.axis2.param, float(v2))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.axis1.count, self.axis2.count)


@dataclass
class SweepResult:
    """Row-major grid of per-cell results.

    ``values`` holds the observable (NaN for failed cells), ``status`` holds
    ``"ok"`` or ``"failed: <reason>"``.
    """

    spec: SweepSpec
    param1: np.ndarray
    param2: np.ndarray
    values: np.ndarray
    trace_error_max: np.ndarray
    status: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def n_failed(self) -> int:
        return int(np.sum(self.status != "ok"))

    def cells(self):
        """Yield ``(i, j, p1, p2, value, status)`` in row-major order."""
        n1, n2 = self.values.shape
        for i in range(n1):
            for j in range(n2):
                yield i, j, self.param1[i], self.param2[j], self.values[i, j], self.status[i, j]

    def nearest_cell(self, v1: float, v2: float) -> tuple[int, int]:
        return int(np.argmin(np.abs(self.param1 - v1))), int(np.argmin(np.abs(self.param2 - v2)))


def _run_cell(args):
    spec, backend, v1, v2 = args
    if kernels.backend_name() != backend:
        kernels.set_backend(backend)
    attr = _OBSERVABLE_ATTR[spec.observable]
    try:
        cfg = spec.cell_config(v1, v2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResolutionWarning)
            traj = integrate(cfg)
    except (NumericalBlowupError, ValidationError, FloatingPointError) as exc:
        return math.nan, math.nan, f"failed: {exc}"
    return getattr(final_observables(traj), attr), float(np.max(traj.trace_error)), "ok"


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Integrate every grid cell and collect ``spec.observable``.

    Cells run in a process pool of ``workers`` processes (``1`` runs inline).
    Results are placed by grid index, so the output does not depend on the
    worker count or completion order. Failed cells are flagged, not dropped.
    """
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ValidationError("workers >= 1", f"got {workers}")
    p1, p2 = spec.axis1.values(), spec.axis2.values()
    backend = kernels.backend_name()
    tasks = [(spec, backend, v1, v2) for v1 in p1 for v2 in p2]

    for v1 in (p1[0], p1[-1]):
        for v2 in (p2[0], p2[-1]):
            check_resolution(spec.cell_config(v1, v2))

    if workers == 1 or len(tasks) == 1:
        out = [_run_cell(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_run_cell, tasks, chunksize=chunk))

    shape = spec.shape
    values = np.array([o[0] for o in out], dtype=float).reshape(shape)
    terr = np.array([o[1] for o in out], dtype=float).reshape(shape)
    status = np.array([o[2] for o in out], dtype=object).reshape(shape)
    base = spec.base
    provenance = {
        "dt": base.dt,
        "t_start": base.t_start,
        "t_end": base.t_end,
        "record_stride": base.record_stride,
        "equation_variant": base.equation_variant.value,
    }
    return SweepResult(spec, p1, p2, values, terr, status, provenance)


@dataclass(frozen=True)
class PlateauSummary:
    """Cells at or above ``threshold`` and the geometry of their regions.

    Bounding boxes are inclusive index ranges ``(i_min, i_max, j_min, j_max)``;
    ``None`` when no cell qualifies.
    """

    threshold: float
    count: int
    fraction: float
    largest_size: int
    largest_bbox: tuple[int, int, int, int] | None
    seed_size: int = 0
    seed_bbox: tuple[int, int, int, int] | None = None


def _bbox(mask: np.ndarray) -> tuple[int, int, int, int]:
    ii, jj = np.nonzero(mask)
    return int(ii.min()), int(ii.max()), int(jj.min()), int(jj.max())


def plateau_summary(
    result: SweepResult, threshold: float, seed: tuple[int, int] | None = None
) -> PlateauSummary:
    """Summarise the region where the observable is ``>= threshold``.

    Connectivity is 4-neighbour. With ``seed`` (a grid index), the region
    containing that cell is also reported.
    """
    mask = np.nan_to_num(result.values, nan=-np.inf) >= threshold
    count = int(mask.sum())
    labels, nlab = ndimage.label(mask)
    largest_size, largest_bbox = 0, None
    if nlab:
        sizes = ndimage.sum_labels(mask, labels, index=np.arange(1, nlab + 1))
        best = int(np.argmax(sizes)) + 1
        largest_size = int(sizes[best - 1])
        largest_bbox = _bbox(labels == best)
    seed_size, seed_bbox = 0, None
    if seed is not None and labels[seed] > 0:
        region = labels == labels[seed]
        seed_size, seed_bbox = int(region.sum()), _bbox(region)
    return PlateauSummary(
        threshold=threshold,
        count=count,
        fraction=count / mask.size,
        largest_size=largest_size,
        largest_bbox=largest_bbox,
        seed_size=seed_size,
        seed_bbox=seed_bbox,
    )
