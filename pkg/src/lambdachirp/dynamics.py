"""Density-matrix dynamics of the driven Lambda atom without the RWA.

The Hamiltonian, with |1> as the energy origin, is::

    H(t) = diag(0, w21, w31) - W31(t) (|3><1| + |1><3|) - W32(t) (|3><2| + |2><3|)

where ``W31``/``W32`` are the real, oscillating Rabi frequencies of the two
pulses. ``integrate`` marches ``drho/dt = -i[H, rho]`` with fixed-step RK4
(through the compiled kernel when available); ``schrodinger_oracle``
propagates a state vector with exact exponentials of piecewise-constant
Hamiltonians and serves as an independent check.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from lambdachirp import kernels
from lambdachirp.core import (
    ChirpedPulse,
    LambdaSystem,
    MixingBasis,
    ValidationError,
    dark_bright_populations,
    ground_state,
    instantaneous_frequency,
    pulse_rabi,
    purity,
    validate_density_matrix,
)

# +-5 widths of the default 4.49 fs pulse; envelope there is exp(-25)
DEFAULT_T_SPAN = (-22.45, 22.45)
DEFAULT_DT = 5e-4
DEFAULT_STRIDE = 20
# phase advance per step allowed where the envelope exceeds ENVELOPE_FLOOR
MAX_PHASE_PER_STEP = 0.2
ENVELOPE_FLOOR = 1e-4
ORACLE_SUBSTEPS = 4
_ORACLE_CHUNK = 65536


class EquationVariant(str, enum.Enum):
    DERIVED = "derived"
    PAPER_LITERAL = "paper_literal"


class NumericalBlowupError(RuntimeError):
    """An element of rho left the disc ``|rho_ij| <= 2`` (unstable step)."""

    def __init__(self, time: float):
        self.time = time
        super().__init__(f"density matrix diverged near t = {time:.6g} fs; reduce dt")


class ResolutionWarning(UserWarning):
    """The step size under-resolves the fastest phase in the window."""


def _freeze_matrix(rho) -> tuple:
    rho = np.asarray(rho, dtype=complex)
    return tuple(tuple(complex(v) for v in row) for row in rho)


@dataclass(frozen=True)
class SimulationConfig:
    """Everything needed to reproduce one integration.

    ``pulse1`` drives |3>-|1>, ``pulse2`` drives |3>-|2>. ``initial_state``
    is held as an immutable nested tuple; use :attr:`rho0` for an array.
    """

    pulse1: ChirpedPulse
    pulse2: ChirpedPulse
    system: LambdaSystem = field(default_factory=LambdaSystem)
    t_start: float = DEFAULT_T_SPAN[0]
    t_end: float = DEFAULT_T_SPAN[1]
    dt: float = DEFAULT_DT
    record_stride: int = DEFAULT_STRIDE
    initial_state: tuple = field(default_factory=lambda: _freeze_matrix(ground_state(1)))
    equation_variant: EquationVariant = EquationVariant.DERIVED
    basis: MixingBasis = field(default_factory=MixingBasis)

    def __post_init__(self):
        object.__setattr__(self, "equation_variant", EquationVariant(self.equation_variant))
        if not isinstance(self.initial_state, tuple):
            object.__setattr__(self, "initial_state", _freeze_matrix(self.initial_state))
        for name in ("t_start", "t_end", "dt"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} is finite")
        if not self.t_start < self.t_end:
            raise ValidationError("t_start < t_end", f"got {self.t_start} >= {self.t_end}")
        if not self.dt > 0:
            raise ValidationError("dt > 0", f"got {self.dt!r}")
        if not self.dt < self.t_end - self.t_start:
            raise ValidationError("dt < t_end - t_start")
        if isinstance(self.record_stride, bool) or not isinstance(self.record_stride, int) or self.record_stride < 1:
            raise ValidationError("record_stride >= 1 (integer)", f"got {self.record_stride!r}")
        validate_density_matrix(self.rho0)

    @property
    def rho0(self) -> np.ndarray:
        return np.array(self.initial_state, dtype=complex)

    def kernel_params(self) -> np.ndarray:
        return np.array(
            [*self.pulse1.as_params(), *self.pulse2.as_params(),
             self.system.omega31, self.system.omega21],
            dtype=float,
        )

    def with_changes(self, **changes) -> "SimulationConfig":
        return replace(self, **changes)


def resonant_pulses(
    system: LambdaSystem,
    peak1: float,
    peak2: float,
    chirp1: float,
    chirp2: float,
    width: float = 4.49,
) -> tuple[ChirpedPulse, ChirpedPulse]:
    """Pulse pair with carriers on resonance with w31 and w32."""
    return (
        ChirpedPulse(peak1, width, system.omega31, chirp1),
        ChirpedPulse(peak2, width, system.omega32, chirp2),
    )


def max_phase_per_step(config: SimulationConfig) -> float:
    """Largest phase (rad) advanced in one step where the dynamics are non-trivial.

    Considers the bare Bohr frequency w31 and each pulse's instantaneous
    frequency over the part of the window where its envelope exceeds
    ``ENVELOPE_FLOOR`` of peak.
    """
    worst = config.system.omega31
    for pulse in (config.pulse1, config.pulse2):
        if pulse.peak_rabi == 0:
            continue
        reach = pulse.width * math.sqrt(-math.log(ENVELOPE_FLOOR))
        lo, hi = max(config.t_start, -reach), min(config.t_end, reach)
        if lo > hi:
            continue
        candidates = [lo, hi] + ([0.0] if lo <= 0.0 <= hi else [])
        worst = max(worst, max(abs(instantaneous_frequency(t, pulse)) for t in candidates))
    return worst * config.dt


def check_resolution(config: SimulationConfig) -> bool:
    """Warn (and return False) when a step advances more than 0.2 rad of phase."""
    phase = max_phase_per_step(config)
    if phase > MAX_PHASE_PER_STEP:
        warnings.warn(
            f"dt = {config.dt:g} fs advances {phase:.3f} rad per step "
            f"(limit {MAX_PHASE_PER_STEP}); results may be inaccurate",
            ResolutionWarning,
            stacklevel=3,
        )
        return False
    return True


@dataclass
class Trajectory:
    """Recorded samples of rho.

    ``t`` has shape ``(n,)`` and ``rho`` shape ``(n, 3, 3)``. Derived
    observables are computed on access.
    """

    t: np.ndarray
    rho: np.ndarray
    basis: MixingBasis = field(default_factory=MixingBasis)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diagonal(self.rho, axis1=1, axis2=2))

    @property
    def rho21(self) -> np.ndarray:
        return self.rho[:, 1, 0]

    @property
    def trace_error(self) -> np.ndarray:
        return np.abs(np.real(np.trace(self.rho, axis1=1, axis2=2)) - 1.0)

    @property
    def hermiticity_error(self) -> np.ndarray:
        return np.max(np.abs(self.rho - np.conj(np.swapaxes(self.rho, 1, 2))), axis=(1, 2))

    @property
    def purity(self) -> np.ndarray:
        return purity(self.rho)

    def dark_bright(self) -> tuple[np.ndarray, np.ndarray]:
        return dark_bright_populations(self.rho, self.basis)

    def columns(self) -> dict[str, np.ndarray]:
        """Per-sample observables keyed by their CSV column names, in order."""
        pops = self.populations
        bb, dd = self.dark_bright()
        r21, r31, r32 = self.rho[:, 1, 0], self.rho[:, 2, 0], self.rho[:, 2, 1]
        return {
            "t_fs": self.t,
            "rho11": pops[:, 0],
            "rho22": pops[:, 1],
            "rho33": pops[:, 2],
            "re_rho21": r21.real,
            "im_rho21": r21.imag,
            "abs_rho21": np.abs(r21),
            "re_rho31": r31.real,
            "im_rho31": r31.imag,
            "re_rho32": r32.real,
            "im_rho32": r32.imag,
            "rho_BB": bb,
            "rho_DD": dd,
            "trace_err": self.trace_error,
            "purity": self.purity,
        }


def _hamiltonian(t, config: SimulationConfig) -> np.ndarray:
    """H(t)/hbar in rad/fs; vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    a = np.asarray(pulse_rabi(t, config.pulse1))
    b = np.asarray(pulse_rabi(t, config.pulse2))
    h = np.zeros(t.shape + (3, 3), dtype=complex)
    h[..., 1, 1] = config.system.omega21
    h[..., 2, 2] = config.system.omega31
    h[..., 2, 0] = h[..., 0, 2] = -a
    h[..., 2, 1] = h[..., 1, 2] = -b
    return h


def bloch_rhs(t: float, rho, config: SimulationConfig) -> np.ndarray:
    """``drho/dt`` at time ``t``.

    ``derived``: the commutator ``-i[H(t), rho]``. ``paper_literal``: same,
    except the population-inversion factor in the rho_32 equation is
    ``(rho33 - rho11)`` instead of ``(rho33 - rho22)``; rho_23 is kept as
    the conjugate.
    """
    rho = np.asarray(rho, dtype=complex)
    h = _hamiltonian(t, config)
    d = -1j * (h @ rho - rho @ h)
    if config.equation_variant is EquationVariant.PAPER_LITERAL:
        b = pulse_rabi(t, config.pulse2)
        d[2, 1] += -1j * b * (rho[1, 1] - rho[0, 0])
        d[1, 2] = np.conj(d[2, 1])
    return d


def rk4_step(t: float, rho, dt: float, config: SimulationConfig) -> np.ndarray:
    """One classic RK4 step on the full 3x3 matrix, re-Hermitised on exit."""
    rho = np.asarray(rho, dtype=complex)
    k1 = bloch_rhs(t, rho, config)
    k2 = bloch_rhs(t + dt / 2, rho + dt / 2 * k1, config)
    k3 = bloch_rhs(t + dt / 2, rho + dt / 2 * k2, config)
    k4 = bloch_rhs(t + dt, rho + dt * k3, config)
    out = rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return 0.5 * (out + out.conj().T)


def pack_state(rho) -> np.ndarray:
    """3x3 Hermitian matrix -> nine reals used by the kernels."""
    rho = np.asarray(rho, dtype=complex)
    return np.array(
        [rho[0, 0].real, rho[1, 1].real, rho[2, 2].real,
         rho[1, 0].real, rho[1, 0].imag,
         rho[2, 0].real, rho[2, 0].imag,
         rho[2, 1].real, rho[2, 1].imag],
        dtype=float,
    )


def unpack_states(y) -> np.ndarray:
    """Inverse of :func:`pack_state`, vectorised over leading axes."""
    y = np.asarray(y, dtype=float)
    rho = np.zeros(y.shape[:-1] + (3, 3), dtype=complex)
    for k in range(3):
        rho[..., k, k] = y[..., k]
    for (i, j), col in (((1, 0), 3), ((2, 0), 5), ((2, 1), 7)):
        z = y[..., col] + 1j * y[..., col + 1]
        rho[..., i, j] = z
        rho[..., j, i] = np.conj(z)
    return rho


def _step_plan(t_from: float, t_to: float, dt: float) -> tuple[int, float, float]:
    """Split ``t_from -> t_to`` into whole steps plus one shorter final step.

    Returns ``(nsteps, signed_dt, h_last)``.
    """
    span = t_to - t_from
    h = math.copysign(dt, span)
    n = round(span / h)
    if abs(n * h - span) <= 1e-9 * dt:
        return n, h, 0.0
    n = int(math.floor(span / h))
    return n, h, span - n * h


def _run_kernel(config, rho0, t_from, t_to, stride):
    nsteps, h, h_last = _step_plan(t_from, t_to, config.dt)
    nrec = nsteps // stride + 2
    rec = np.zeros((nrec, 9))
    trec = np.zeros(nrec)
    state = pack_state(rho0)
    literal = int(config.equation_variant is EquationVariant.PAPER_LITERAL)
    n = kernels.get().rk4_evolve(
        state, float(t_from), float(h), int(nsteps), float(h_last),
        config.kernel_params(), literal, int(stride), rec, trec,
    )
    if n < 0:
        raise NumericalBlowupError(t_from + (-n) * h)
    trec = trec[:n]
    trec[-1] = t_to
    return trec, unpack_states(rec[:n])


def integrate(config: SimulationConfig) -> Trajectory:
    """Integrate from ``t_start`` to ``t_end``, recording every ``record_stride`` steps.

    The first sample is the initial state and the last sits exactly at
    ``t_end`` (after a shortened final step if needed).

    Raises
    ------
    NumericalBlowupError
        If any ``|rho_ij|`` exceeds 2 during the run.
    """
    check_resolution(config)
    t, rho = _run_kernel(config, config.rho0, config.t_start, config.t_end, config.record_stride)
    return Trajectory(t, rho, config.basis)


def evolve(config: SimulationConfig, rho, t_from: float, t_to: float) -> np.ndarray:
    """Propagate ``rho`` from ``t_from`` to ``t_to`` (either direction); return the end state."""
    if t_from == t_to:
        return np.asarray(rho, dtype=complex).copy()
    nsteps, _, _ = _step_plan(t_from, t_to, config.dt)
    _, states = _run_kernel(config, rho, t_from, t_to, max(nsteps, 1))
    return states[-1]


def _oracle_unitaries(config: SimulationConfig, midpoints: np.ndarray, h: float) -> np.ndarray:
    vals, vecs = np.linalg.eigh(_hamiltonian(midpoints, config))
    phases = np.exp(-1j * h * vals)
    return np.einsum("nij,nj,nkj->nik", vecs, phases, vecs.conj())


def schrodinger_oracle(config: SimulationConfig) -> Trajectory:
    """Independent pure-state propagation with the same ``H(t)``.

    Each RK4 step of ``dt`` is split into four substeps; on each substep
    ``H`` is frozen at the substep midpoint and exponentiated exactly.
    Samples are taken at the same times as :func:`integrate`.
    """
    rho0 = config.rho0
    if abs(purity(rho0) - 1.0) > 1e-10:
        raise ValidationError("initial state is pure (Tr rho^2 == 1)", f"purity {purity(rho0):.12g}")
    vals, vecs = np.linalg.eigh(rho0)
    psi = np.ascontiguousarray(vecs[:, np.argmax(vals)], dtype=complex)

    nsteps, h, h_last = _step_plan(config.t_start, config.t_end, config.dt)
    stride = config.record_stride
    sub = ORACLE_SUBSTEPS
    nrec = nsteps // stride + 2
    out = np.zeros((nrec, 3), dtype=complex)
    times = [config.t_start]
    out[0] = psi
    nout = 1
    kern = kernels.get()
    offsets = (np.arange(sub) + 0.5) / sub

    total_sub = nsteps * sub
    for start in range(0, total_sub, _ORACLE_CHUNK):
        idx = np.arange(start, min(start + _ORACLE_CHUNK, total_sub))
        step, part = np.divmod(idx, sub)
        mids = config.t_start + step * h + offsets[part] * h
        us = np.ascontiguousarray(_oracle_unitaries(config, mids, h / sub))
        before = nout
        nout = kern.apply_unitaries(us, psi, int(start), int(stride * sub), out, nout)
        for k in range(before, nout):
            times.append(config.t_start + k * stride * h)
    if h_last != 0.0:
        mids = config.t_start + nsteps * h + offsets * h_last
        us = np.ascontiguousarray(_oracle_unitaries(config, mids, h_last / sub))
        for u in us:
            psi = u @ psi
    if h_last != 0.0 or nsteps % stride != 0:
        out[nout] = psi
        times.append(config.t_end)
        nout += 1
    times[-1] = config.t_end
    states = out[:nout]
    rho = np.einsum("ni,nj->nij", states, states.conj())
    return Trajectory(np.array(times), rho, config.basis)


@dataclass(frozen=True)
class FinalObservables:
    abs_rho21: float
    re_rho21: float
    rho11: float
    rho22: float
    rho33: float
    rho_dd: float
    rho_bb: float
    max_rho33: float


def final_observables(traj: Trajectory) -> FinalObservables:
    """End-of-run readouts; ``max_rho33`` is taken over every recorded sample."""
    if len(traj) == 0:
        raise ValueError("cannot extract observables from an empty trajectory")
    last = traj.rho[-1]
    bb, dd = dark_bright_populations(last, traj.basis)
    return FinalObservables(
        abs_rho21=float(abs(last[1, 0])),
        re_rho21=float(last[1, 0].real),
        rho11=float(last[0, 0].real),
        rho22=float(last[1, 1].real),
        rho33=float(last[2, 2].real),
        rho_dd=dd,
        rho_bb=bb,
        max_rho33=float(np.max(traj.populations[:, 2])),
    )
