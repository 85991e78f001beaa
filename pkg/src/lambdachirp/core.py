"""Domain types and closed-form field evaluation.

Units throughout: time in fs, angular frequency in rad/fs, cubic chirp in
fs^-3, dipole moments in e*a0, fields in V/m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

# e*a0 / hbar in (rad/s) per (V/m), scaled to rad/fs
_BOHR_RADIUS = constants.physical_constants["Bohr radius"][0]
_DIPOLE_AU_OVER_HBAR = constants.e * _BOHR_RADIUS / constants.hbar * 1e-15

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


class ValidationError(ValueError):
    """A parameter violates a documented invariant.

    ``invariant`` holds the violated condition as text (e.g. ``"width > 0"``)
    and ``key`` the dotted config path when known.
    """

    def __init__(self, invariant: str, detail: str = "", key: str | None = None):
        self.invariant = invariant
        self.key = key
        self.detail = detail
        where = f"{key}: " if key else ""
        extra = f" ({detail})" if detail else ""
        super().__init__(f"{where}invariant `{invariant}` violated{extra}")

    def with_key(self, key: str) -> "ValidationError":
        return ValidationError(self.invariant, self.detail, key)


@dataclass(frozen=True)
class ChirpedPulse:
    """Real few-cycle field ``peak_rabi * exp(-t^2/width^2) * cos(carrier*t + chirp*t^3)``.

    The field is expressed directly as the Rabi frequency it drives on its
    transition.
    """

    peak_rabi: float
    width: float
    carrier: float
    chirp: float = 0.0

    def __post_init__(self):
        for name in ("peak_rabi", "width", "carrier", "chirp"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValidationError(f"{name} is finite", f"got {v!r}")
        if not self.width > 0:
            raise ValidationError("width > 0", f"got {self.width!r}")
        if not self.peak_rabi >= 0:
            raise ValidationError("peak_rabi >= 0", f"got {self.peak_rabi!r}")
        if not self.carrier >= 0:
            raise ValidationError("carrier >= 0", f"got {self.carrier!r}")

    def as_params(self) -> tuple[float, float, float, float]:
        return (self.peak_rabi, self.width, self.carrier, self.chirp)


@dataclass(frozen=True)
class LambdaSystem:
    """Level splittings (and dipoles) of the Lambda atom.

    Level |1> is the energy origin; only differences enter the dynamics.
    """

    omega31: float = 3.18
    omega21: float = 1e-5
    dipole31: float = 2.49
    dipole32: float = 2.49

    def __post_init__(self):
        for name in ("omega31", "omega21", "dipole31", "dipole32"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValidationError(f"{name} is finite", f"got {v!r}")
        if not self.omega21 >= 0:
            raise ValidationError("omega21 >= 0", f"got {self.omega21!r}")
        if not self.omega31 > self.omega21:
            raise ValidationError(
                "omega31 > omega21", f"got {self.omega31!r} <= {self.omega21!r}"
            )
        if not (self.dipole31 > 0 and self.dipole32 > 0):
            raise ValidationError("dipole > 0")

    @property
    def omega32(self) -> float:
        return self.omega31 - self.omega21

    def hamiltonian_diagonal(self) -> np.ndarray:
        """Bare energies (rad/fs) with |1> at zero."""
        return np.array([0.0, self.omega21, self.omega31])


@dataclass(frozen=True)
class MixingBasis:
    """Bright/dark superpositions of the two lower levels.

    ``|B> = sin(theta)|1> + cos(theta)|2>`` and
    ``|D> = cos(theta)|1> - sin(theta)|2>``.
    """

    theta: float = math.pi / 4

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi / 2):
            raise ValidationError("0 <= theta <= pi/2", f"got {self.theta!r}")

    @classmethod
    def from_rabi_ratio(cls, omega1: float, omega2: float) -> "MixingBasis":
        """Basis whose bright state is proportional to ``omega1|1> + omega2|2>``."""
        return cls(math.atan2(omega1, omega2))

    def bright(self) -> np.ndarray:
        return np.array([math.sin(self.theta), math.cos(self.theta), 0.0], dtype=complex)

    def dark(self) -> np.ndarray:
        return np.array([math.cos(self.theta), -math.sin(self.theta), 0.0], dtype=complex)


def pulse_rabi(t, pulse: ChirpedPulse):
    """Instantaneous Rabi frequency of ``pulse`` at time(s) ``t`` (fs).

    Carries the full real carrier oscillation; accepts scalars or arrays.
    """
    t = np.asarray(t, dtype=float)
    out = (
        pulse.peak_rabi
        * np.exp(-(t * t) / (pulse.width * pulse.width))
        * np.cos(pulse.carrier * t + pulse.chirp * t * t * t)
    )
    return float(out) if out.ndim == 0 else out


def instantaneous_frequency(t, pulse: ChirpedPulse):
    """Time derivative of the pulse phase, ``carrier + 3*chirp*t^2``."""
    t = np.asarray(t, dtype=float)
    out = pulse.carrier + 3.0 * pulse.chirp * t * t
    return float(out) if out.ndim == 0 else out


def rabi_from_field(field_amplitude, dipole: float):
    """Rabi frequency (rad/fs) for a field in V/m on a dipole in e*a0."""
    if not dipole > 0:
        raise ValidationError("dipole > 0", f"got {dipole!r}")
    out = dipole * _DIPOLE_AU_OVER_HBAR * np.asarray(field_amplitude, dtype=float)
    return float(out) if out.ndim == 0 else out


def field_from_rabi(rabi, dipole: float):
    """Inverse of :func:`rabi_from_field`: field amplitude in V/m."""
    if not dipole > 0:
        raise ValidationError("dipole > 0", f"got {dipole!r}")
    out = np.asarray(rabi, dtype=float) / (dipole * _DIPOLE_AU_OVER_HBAR)
    return float(out) if out.ndim == 0 else out


def ground_state(level: int = 1) -> np.ndarray:
    """Projector onto bare level ``level`` (1-based)."""
    if level not in (1, 2, 3):
        raise ValidationError("level in {1, 2, 3}", f"got {level!r}")
    rho = np.zeros((3, 3), dtype=complex)
    rho[level - 1, level - 1] = 1.0
    return rho


def pure_state(amplitudes) -> np.ndarray:
    """Density matrix ``|psi><psi|`` of the normalised amplitude vector."""
    psi = np.asarray(amplitudes, dtype=complex).reshape(3)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValidationError("state vector is non-zero")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def validate_density_matrix(rho, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``rho`` as a 3x3 complex array after checking the state invariants."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (3, 3):
        raise ValidationError("shape == (3, 3)", f"got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValidationError("elements are finite")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValidationError("rho_ij == conj(rho_ji)")
    if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
        raise ValidationError("trace == 1", f"got {np.trace(rho).real!r}")
    diag = np.diag(rho).real
    if np.any(diag < -PSD_TOL) or np.any(diag > 1 + PSD_TOL):
        raise ValidationError("0 <= rho_kk <= 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -PSD_TOL:
        raise ValidationError("rho positive semidefinite")
    return rho


def purity(rho) -> float:
    """``Tr(rho^2)`` of a state or a stack of states."""
    p = np.einsum("...ij,...ji->...", rho, rho).real
    return float(p) if p.ndim == 0 else p


def dark_bright_populations(rho, basis: MixingBasis = MixingBasis()) -> tuple[float, float]:
    """Return ``(rho_BB, rho_DD)`` for a state (or stack of states) ``rho``."""
    rho = np.asarray(rho)
    s, c = math.sin(basis.theta), math.cos(basis.theta)
    r11 = rho[..., 0, 0].real
    r22 = rho[..., 1, 1].real
    re12 = rho[..., 0, 1].real
    cross = 2.0 * s * c * re12
    bb = s * s * r11 + c * c * r22 + cross
    dd = c * c * r11 + s * s * r22 - cross
    if rho.ndim == 2:
        return float(bb), float(dd)
    return bb, dd
