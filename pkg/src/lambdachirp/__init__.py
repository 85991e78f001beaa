"""Non-RWA coherent dynamics of a Lambda atom driven by two cubically chirped few-cycle pulses."""

__version__ = "0.1.0"

from lambdachirp.core import (  # noqa: E402
    ChirpedPulse,
    LambdaSystem,
    MixingBasis,
    ValidationError,
    dark_bright_populations,
    field_from_rabi,
    instantaneous_frequency,
    pulse_rabi,
    rabi_from_field,
)
from lambdachirp.dynamics import (  # noqa: E402
    EquationVariant,
    FinalObservables,
    NumericalBlowupError,
    ResolutionWarning,
    SimulationConfig,
    Trajectory,
    bloch_rhs,
    evolve,
    final_observables,
    integrate,
    rk4_step,
    schrodinger_oracle,
)
from lambdachirp.config import load_config, parse_config  # noqa: E402
from lambdachirp.figures import figure3_spec, figure_config  # noqa: E402
from lambdachirp.sweep import (  # noqa: E402
    Observable,
    SweepAxis,
    SweepResult,
    SweepSpec,
    plateau_summary,
    run_sweep,
)

__all__ = [
    "ChirpedPulse",
    "EquationVariant",
    "FinalObservables",
    "LambdaSystem",
    "MixingBasis",
    "NumericalBlowupError",
    "Observable",
    "ResolutionWarning",
    "SimulationConfig",
    "SweepAxis",
    "SweepResult",
    "SweepSpec",
    "Trajectory",
    "ValidationError",
    "bloch_rhs",
    "dark_bright_populations",
    "evolve",
    "field_from_rabi",
    "figure3_spec",
    "figure_config",
    "final_observables",
    "instantaneous_frequency",
    "integrate",
    "load_config",
    "parse_config",
    "plateau_summary",
    "pulse_rabi",
    "rabi_from_field",
    "rk4_step",
    "run_sweep",
    "schrodinger_oracle",
]
