"""Built-in reference scenarios (numbered 2, 3 and 4).

Parameters are the sodium-like set: w31 = 3.18 rad/fs, w21 = 1e-5 rad/fs,
pulse width 4.49 fs, dipoles 2.49 e*a0, both carriers resonant, all
population initially in |1>.
"""

from __future__ import annotations

from lambdachirp.core import LambdaSystem
from lambdachirp.dynamics import SimulationConfig, resonant_pulses
from lambdachirp.sweep import Observable, SweepAxis, SweepSpec

SODIUM = LambdaSystem(omega31=3.18, omega21=1e-5, dipole31=2.49, dipole32=2.49)
PULSE_WIDTH = 4.49

# (peak_rabi1, peak_rabi2, chirp1, chirp2)
FIGURE_LASERS = {
    2: (1.0, 2.4, 0.397, 0.397),
    4: (1.67, 2.5, 0.6, 0.4),
}

# Fig. 3 axes: chirp (both pulses) x peak Rabi of pulse 2, with the Fig. 2
# point (0.397, 2.4) landing exactly on grid index (12, 12)
FIG3_CHIRP = (0.197, 0.597)
FIG3_RABI2 = (1.6, 3.2)
FIG3_COUNT = 25


def figure_config(figure: int, **overrides) -> SimulationConfig:
    """Single-run configuration for figure 2 or 4."""
    if figure not in FIGURE_LASERS:
        raise ValueError(f"no single-run configuration for figure {figure}")
    peak1, peak2, chirp1, chirp2 = FIGURE_LASERS[figure]
    p1, p2 = resonant_pulses(SODIUM, peak1, peak2, chirp1, chirp2, width=PULSE_WIDTH)
    return SimulationConfig(pulse1=p1, pulse2=p2, system=SODIUM).with_changes(**overrides)


def figure3_spec(count: int = FIG3_COUNT, base: SimulationConfig | None = None) -> SweepSpec:
    """Coherence robustness grid: ``chirp_both`` x ``pulse2.peak_rabi`` at fixed pulse-1 strength."""
    return SweepSpec(
        base=base if base is not None else figure_config(2),
        axis1=SweepAxis("chirp_both", *FIG3_CHIRP, count),
        axis2=SweepAxis("pulse2.peak_rabi", *FIG3_RABI2, count),
        observable=Observable.FINAL_ABS_RHO21,
    )
