"""Post-install physics self-test behind ``lambdachirp check``.

Each check returns ``(passed, detail)``. The set is a fast subset of the
test suite: conservation laws, the Schrodinger cross-check, backend
agreement and the figure endpoints.
"""

from __future__ import annotations

import time
from typing import Callable

import numpy as np

from lambdachirp import kernels
from lambdachirp.dynamics import (
    bloch_rhs,
    evolve,
    final_observables,
    integrate,
    schrodinger_oracle,
)
from lambdachirp.figures import figure_config


def _conservation():
    traj = integrate(figure_config(2))
    tr = float(traj.trace_error.max())
    herm = float(traj.hermiticity_error.max())
    pur = float(np.abs(traj.purity - 1).max())
    ok = tr <= 1e-9 and herm <= 1e-12 and pur <= 1e-6
    return ok, f"trace {tr:.2e}, hermiticity {herm:.2e}, purity {pur:.2e}"


def _oracle():
    cfg = figure_config(2)
    diff = float(np.abs(integrate(cfg).rho - schrodinger_oracle(cfg).rho).max())
    return diff <= 1e-6, f"max |rho_ij| difference {diff:.2e}"


def _rhs_structure():
    rng = np.random.default_rng(7)
    cfg = figure_config(2)
    worst = 0.0
    for _ in range(20):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        d = bloch_rhs(rng.uniform(-5, 5), rho, cfg)
        worst = max(worst, abs(np.trace(d)), np.abs(d - d.conj().T).max())
    return worst <= 1e-12, f"max trace/anti-Hermitian residue {worst:.2e}"


def _backends():
    if "compiled" not in kernels.available():
        return True, "compiled kernels not built; fallback only"
    cfg = figure_config(2, t_start=-2.0, t_end=2.0)
    current = kernels.backend_name()
    try:
        kernels.set_backend("compiled")
        a = integrate(cfg).rho
        kernels.set_backend("python")
        b = integrate(cfg).rho
    finally:
        kernels.set_backend(current)
    diff = float(np.abs(a - b).max())
    return diff <= 1e-13, f"compiled vs python {diff:.2e}"


def _reversal():
    cfg = figure_config(2)
    there = evolve(cfg, cfg.rho0, cfg.t_start, cfg.t_end)
    back = evolve(cfg, there, cfg.t_end, cfg.t_start)
    diff = float(np.abs(back - cfg.rho0).max())
    return diff <= 1e-6, f"round-trip error {diff:.2e}"


def _figure2():
    obs = final_observables(integrate(figure_config(2)))
    ok = (abs(obs.abs_rho21 - 0.5) <= 0.05 and obs.rho33 <= 0.05
          and abs(obs.rho11 - 0.5) <= 0.05 and abs(obs.rho22 - 0.5) <= 0.05
          and obs.rho_dd >= 0.9 and obs.rho_bb <= 0.1)
    return ok, (f"|rho21| {obs.abs_rho21:.4f}, rho33 {obs.rho33:.4f}, "
                f"rho_DD {obs.rho_dd:.4f}")


def _figure4():
    obs = final_observables(integrate(figure_config(4)))
    ok = obs.rho22 >= 0.85 and obs.rho22 > obs.rho11 and obs.rho22 > obs.rho33
    return ok, f"rho11 {obs.rho11:.4f}, rho22 {obs.rho22:.4f}, rho33 {obs.rho33:.4f}"


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("commutator structure of drho/dt", _rhs_structure),
    ("trace/hermiticity/purity conservation", _conservation),
    ("Schrodinger oracle agreement", _oracle),
    ("compiled and python kernels agree", _backends),
    ("forward-backward time reversal", _reversal),
    ("figure 2 coherence and dark-state trapping", _figure2),
    ("figure 4 population transfer", _figure4),
]


def run_checks(out=print) -> bool:
    all_ok = True
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # report, keep going
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        out(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail} ({time.perf_counter() - t0:.2f} s)")
    return all_ok
