"""YAML run/sweep configuration: parsing, validation and serialisation.

A minimal document only needs the laser settings; everything else falls
back to the sodium-like defaults (w31 = 3.18, w21 = 1e-5 rad/fs,
width 4.49 fs, carriers on resonance)::

    pulse1: {peak_rabi: 1.0, chirp: 0.397}   # drives |3>-|1>
    pulse2: {peak_rabi: 2.4, chirp: 0.397}   # drives |3>-|2>

Optional sections: ``system``, ``numerics``, ``basis`` and ``sweep`` (the
README lists every key). Unknown keys are rejected.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np
import yaml

from lambdachirp.core import (
    ChirpedPulse,
    LambdaSystem,
    MixingBasis,
    ValidationError,
    field_from_rabi,
    ground_state,
    pure_state,
    rabi_from_field,
)
from lambdachirp.dynamics import DEFAULT_DT, DEFAULT_STRIDE, DEFAULT_T_SPAN, EquationVariant, SimulationConfig
from lambdachirp.sweep import Observable, SweepAxis, SweepSpec

DEFAULT_WIDTH = 4.49

_TOP_KEYS = {"system", "pulse1", "pulse2", "numerics", "basis", "sweep"}
_SYSTEM_KEYS = {"omega31", "omega21", "dipole31", "dipole32"}
_PULSE_KEYS = {"peak_rabi", "peak_field", "width", "carrier", "chirp"}
_NUMERIC_KEYS = {"t_start", "t_end", "dt", "record_stride", "equation_variant", "initial_state"}
_BASIS_KEYS = {"theta", "convention"}
_SWEEP_KEYS = {"axis1", "axis2", "observable"}
_AXIS_KEYS = {"param", "min", "max", "count"}
_STATE_KEYS = {"level", "populations", "amplitudes", "matrix"}


class ConfigError(ValueError):
    """Malformed or invalid configuration document."""


def _key_lines(node, prefix: str = "", out: dict | None = None) -> dict[str, int]:
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
            out[path] = key_node.start_mark.line + 1
            _key_lines(value_node, path, out)
    return out


class _Reader:
    """Walks the parsed document, reporting errors with key paths and line numbers."""

    def __init__(self, lines: dict[str, int]):
        self.lines = lines

    def where(self, path: str) -> str:
        parts = path.split(".")
        while parts:
            line = self.lines.get(".".join(parts))
            if line is not None:
                return f"{path} (line {line})"
            parts.pop()
        return path

    def fail(self, path: str, msg: str) -> ConfigError:
        return ConfigError(f"{self.where(path)}: {msg}")

    def section(self, data: Any, path: str, allowed: set[str]) -> dict:
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise self.fail(path, "expected a mapping")
        for key in data:
            if key not in allowed:
                sub = f"{path}.{key}" if path else str(key)
                raise self.fail(sub, f"unknown key {key!r}; allowed: {', '.join(sorted(allowed))}")
        return data

    def number(self, data: dict, key: str, path: str, default=None) -> float:
        if key not in data:
            if default is None:
                raise self.fail(f"{path}.{key}", "required")
            return default
        v = data[key]
        if isinstance(v, bool):
            raise self.fail(f"{path}.{key}", f"expected a number, got {v!r}")
        if isinstance(v, str):
            try:
                v = float(v)
            except ValueError:
                raise self.fail(f"{path}.{key}", f"expected a number, got {v!r}") from None
        if not isinstance(v, (int, float)):
            raise self.fail(f"{path}.{key}", f"expected a number, got {v!r}")
        v = float(v)
        if not math.isfinite(v):
            raise self.fail(f"{path}.{key}", f"must be finite, got {v!r}")
        return v

    def integer(self, data: dict, key: str, path: str, default: int) -> int:
        v = data.get(key, default)
        if isinstance(v, bool) or not isinstance(v, int):
            raise self.fail(f"{path}.{key}", f"expected an integer, got {v!r}")
        return v

    def build(self, path: str, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            raise self.fail(path, str(exc)) from None


def _read_system(r: _Reader, data) -> LambdaSystem:
    d = r.section(data, "system", _SYSTEM_KEYS)
    ref = LambdaSystem()
    return r.build(
        "system",
        LambdaSystem,
        omega31=r.number(d, "omega31", "system", ref.omega31),
        omega21=r.number(d, "omega21", "system", ref.omega21),
        dipole31=r.number(d, "dipole31", "system", ref.dipole31),
        dipole32=r.number(d, "dipole32", "system", ref.dipole32),
    )


def _read_pulse(r: _Reader, data, name: str, resonance: float, dipole: float) -> ChirpedPulse:
    d = r.section(data, name, _PULSE_KEYS)
    if "peak_rabi" in d and "peak_field" in d:
        raise r.fail(name, "give either peak_rabi or peak_field, not both")
    if "peak_field" in d:
        field = r.number(d, "peak_field", name)
        peak = float(r.build(f"{name}.peak_field", rabi_from_field, field, dipole))
    else:
        peak = r.number(d, "peak_rabi", name, 0.0)
    return r.build(
        name,
        ChirpedPulse,
        peak_rabi=peak,
        width=r.number(d, "width", name, DEFAULT_WIDTH),
        carrier=r.number(d, "carrier", name, resonance),
        chirp=r.number(d, "chirp", name, 0.0),
    )


def _read_initial_state(r: _Reader, data) -> np.ndarray:
    path = "numerics.initial_state"
    if data is None:
        return ground_state(1)
    if isinstance(data, int) and not isinstance(data, bool):
        return r.build(path, ground_state, data)
    d = r.section(data, path, _STATE_KEYS)
    if len(d) != 1:
        raise r.fail(path, "give exactly one of level, populations, amplitudes, matrix")
    (kind, value), = d.items()
    try:
        if kind == "level":
            return r.build(path, ground_state, value)
        if kind == "populations":
            return np.diag(np.array([float(v) for v in value], dtype=complex))
        if kind == "amplitudes":
            return r.build(path, pure_state, [complex(str(v).replace(" ", "")) for v in value])
        rows = [[complex(str(v).replace(" ", "")) for v in row] for row in value]
        return np.array(rows, dtype=complex)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise r.fail(f"{path}.{kind}", f"cannot read state: {exc}") from None


def _read_basis(r: _Reader, data, pulse1: ChirpedPulse, pulse2: ChirpedPulse) -> MixingBasis:
    d = r.section(data, "basis", _BASIS_KEYS)
    if "theta" in d and "convention" in d:
        raise r.fail("basis", "give either theta or convention, not both")
    if "theta" in d:
        return r.build("basis.theta", MixingBasis, r.number(d, "theta", "basis"))
    conv = d.get("convention", "equal")
    if conv == "equal":
        return MixingBasis()
    if conv == "rabi_ratio":
        return MixingBasis.from_rabi_ratio(pulse1.peak_rabi, pulse2.peak_rabi)
    raise r.fail("basis.convention", f"expected 'equal' or 'rabi_ratio', got {conv!r}")


def _read_simulation(r: _Reader, doc: dict) -> SimulationConfig:
    system = _read_system(r, doc.get("system"))
    pulse1 = _read_pulse(r, doc.get("pulse1"), "pulse1", system.omega31, system.dipole31)
    pulse2 = _read_pulse(r, doc.get("pulse2"), "pulse2", system.omega32, system.dipole32)
    num = r.section(doc.get("numerics"), "numerics", _NUMERIC_KEYS)
    variant = str(num.get("equation_variant", EquationVariant.DERIVED.value)).replace("-", "_")
    if variant not in {v.value for v in EquationVariant}:
        raise r.fail("numerics.equation_variant", f"expected 'derived' or 'paper_literal', got {variant!r}")
    return r.build(
        "numerics",
        SimulationConfig,
        pulse1=pulse1,
        pulse2=pulse2,
        system=system,
        t_start=r.number(num, "t_start", "numerics", DEFAULT_T_SPAN[0]),
        t_end=r.number(num, "t_end", "numerics", DEFAULT_T_SPAN[1]),
        dt=r.number(num, "dt", "numerics", DEFAULT_DT),
        record_stride=r.integer(num, "record_stride", "numerics", DEFAULT_STRIDE),
        initial_state=_read_initial_state(r, num.get("initial_state")),
        equation_variant=EquationVariant(variant),
        basis=_read_basis(r, doc.get("basis"), pulse1, pulse2),
    )


def _read_axis(r: _Reader, data, path: str) -> SweepAxis:
    d = r.section(data, path, _AXIS_KEYS)
    for key in ("param", "count"):
        if key not in d:
            raise r.fail(f"{path}.{key}", "required")
    return r.build(
        path,
        SweepAxis,
        param=str(d["param"]),
        min=r.number(d, "min", path),
        max=r.number(d, "max", path),
        count=r.integer(d, "count", path, 0),
    )


def parse_config(text: str) -> SimulationConfig | SweepSpec:
    """Parse a YAML document into a :class:`SimulationConfig` or, if it has a
    ``sweep`` section, a :class:`SweepSpec`.

    Run manifests written by this package are accepted too; their embedded
    ``config`` section is used.

    Raises
    ------
    ConfigError
        On YAML syntax errors, unknown keys, wrong types or violated
        invariants. The message names the key (with its line) and the
        invariant.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    lines = _key_lines(node) if node is not None else {}
    r = _Reader(lines)
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("parse error: top level must be a mapping")
    if "config" in doc and "tool" in doc:
        inner = {k[len("config."):]: v for k, v in lines.items() if k.startswith("config.")}
        r = _Reader(inner)
        doc = doc["config"]
        if not isinstance(doc, dict):
            raise ConfigError("manifest config section must be a mapping")
    r.section(doc, "", _TOP_KEYS)
    sim = _read_simulation(r, doc)
    if "sweep" not in doc:
        return sim
    sw = r.section(doc["sweep"], "sweep", _SWEEP_KEYS)
    axis1 = _read_axis(r, sw.get("axis1"), "sweep.axis1")
    axis2 = _read_axis(r, sw.get("axis2"), "sweep.axis2")
    obs = sw.get("observable", Observable.FINAL_ABS_RHO21.value)
    if obs not in {o.value for o in Observable}:
        raise r.fail("sweep.observable", f"expected one of {[o.value for o in Observable]}, got {obs!r}")
    return r.build("sweep", SweepSpec, base=sim, axis1=axis1, axis2=axis2, observable=Observable(obs))


def load_config(path) -> SimulationConfig | SweepSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _state_to_doc(rho: np.ndarray):
    for level in (1, 2, 3):
        if np.array_equal(rho, ground_state(level)):
            return level
    if np.count_nonzero(rho - np.diag(np.diag(rho))) == 0 and not np.any(np.diag(rho).imag):
        return {"populations": [float(v) for v in np.diag(rho).real]}
    return {"matrix": [[repr(complex(v)) for v in row] for row in rho]}


def config_to_dict(config: SimulationConfig | SweepSpec) -> dict:
    """Fully explicit document for ``config``; :func:`parse_config` inverts it."""
    if isinstance(config, SweepSpec):
        doc = config_to_dict(config.base)
        doc["sweep"] = {
            "axis1": _axis_doc(config.axis1),
            "axis2": _axis_doc(config.axis2),
            "observable": config.observable.value,
        }
        return doc
    s = config.system
    return {
        "system": {"omega31": s.omega31, "omega21": s.omega21, "dipole31": s.dipole31, "dipole32": s.dipole32},
        "pulse1": _pulse_doc(config.pulse1),
        "pulse2": _pulse_doc(config.pulse2),
        "numerics": {
            "t_start": config.t_start,
            "t_end": config.t_end,
            "dt": config.dt,
            "record_stride": config.record_stride,
            "equation_variant": config.equation_variant.value,
            "initial_state": _state_to_doc(config.rho0),
        },
        "basis": {"theta": config.basis.theta},
    }


def _pulse_doc(p: ChirpedPulse) -> dict:
    return {"peak_rabi": p.peak_rabi, "width": p.width, "carrier": p.carrier, "chirp": p.chirp}


def _axis_doc(a: SweepAxis) -> dict:
    return {"param": a.param, "min": a.min, "max": a.max, "count": a.count}


def dump_config(config: SimulationConfig | SweepSpec) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False, default_flow_style=False)


def peak_field(pulse: ChirpedPulse, dipole: float) -> float:
    """Peak field amplitude (V/m) corresponding to ``pulse.peak_rabi``."""
    return float(field_from_rabi(pulse.peak_rabi, dipole))
