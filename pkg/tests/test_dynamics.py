import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambdachirp.core import ChirpedPulse, LambdaSystem, ValidationError, ground_state, pure_state
from lambdachirp.dynamics import (
    EquationVariant,
    NumericalBlowupError,
    ResolutionWarning,
    SimulationConfig,
    Trajectory,
    bloch_rhs,
    check_resolution,
    evolve,
    final_observables,
    integrate,
    max_phase_per_step,
    rk4_step,
    schrodinger_oracle,
)

from conftest import random_density_matrix


def dark_config(**kw):
    off = ChirpedPulse(0.0, 4.49, 3.18, 0.0)
    return SimulationConfig(pulse1=off, pulse2=off, **kw)


def only_pulse1_config(peak=1.3):
    return SimulationConfig(
        pulse1=ChirpedPulse(peak, 4.49, 3.18, 0.397),
        pulse2=ChirpedPulse(0.0, 4.49, 3.17999, 0.397),
    )


def eq1_upper(t, rho, cfg, literal=False):
    """Upper-left six equations exactly as written out by hand."""
    a = np.cos(cfg.pulse1.carrier * t + cfg.pulse1.chirp * t**3) * cfg.pulse1.peak_rabi * np.exp(-(t / cfg.pulse1.width) ** 2)
    b = np.cos(cfg.pulse2.carrier * t + cfg.pulse2.chirp * t**3) * cfg.pulse2.peak_rabi * np.exp(-(t / cfg.pulse2.width) ** 2)
    w31, w21 = cfg.system.omega31, cfg.system.omega21
    w32 = w31 - w21
    r = rho
    inv32 = r[2, 2] - (r[0, 0] if literal else r[1, 1])
    return {
        (2, 0): -1j * w31 * r[2, 0] + 1j * b * r[1, 0] - 1j * a * (r[2, 2] - r[0, 0]),
        (2, 1): -1j * w32 * r[2, 1] + 1j * a * r[0, 1] - 1j * b * inv32,
        (1, 0): -1j * w21 * r[1, 0] + 1j * b * r[2, 0] - 1j * a * r[1, 2],
        (0, 0): 1j * a * (r[2, 0] - r[0, 2]),
        (1, 1): 1j * b * (r[2, 1] - r[1, 2]),
        (2, 2): 1j * a * (r[0, 2] - r[2, 0]) + 1j * b * (r[1, 2] - r[2, 1]),
    }


class TestConfig:
    def test_defaults(self, fig2_config):
        assert fig2_config.t_start == -22.45 and fig2_config.t_end == 22.45
        assert fig2_config.dt == 5e-4 and fig2_config.record_stride == 20
        assert fig2_config.equation_variant is EquationVariant.DERIVED
        assert np.array_equal(fig2_config.rho0, ground_state(1))

    @pytest.mark.parametrize(
        "kw,invariant",
        [
            (dict(t_start=1.0, t_end=0.0), "t_start < t_end"),
            (dict(dt=0.0), "dt > 0"),
            (dict(dt=50.0), "dt < t_end - t_start"),
            (dict(record_stride=0), "record_stride >= 1 (integer)"),
        ],
    )
    def test_invalid(self, kw, invariant):
        with pytest.raises(ValidationError) as err:
            dark_config(**kw)
        assert err.value.invariant == invariant

    def test_rejects_invalid_initial_state(self):
        with pytest.raises(ValidationError):
            dark_config(initial_state=np.diag([0.5, 0.4, 0.0]))

    def test_default_step_resolves_figures(self, fig2_config, fig4_config):
        assert max_phase_per_step(fig2_config) <= 0.2
        assert max_phase_per_step(fig4_config) <= 0.2

    def test_coarse_step_warns(self, fig2_config):
        with pytest.warns(ResolutionWarning):
            assert not check_resolution(fig2_config.with_changes(dt=4e-3))


class TestBlochRhs:
    def test_free_diagonal_state(self):
        d = bloch_rhs(0.3, np.diag([0.2, 0.5, 0.3]).astype(complex), dark_config())
        assert np.all(d == 0)

    def test_single_field_from_ground(self):
        cfg = only_pulse1_config()
        t = 0.71
        omega = cfg.pulse1.peak_rabi * math.exp(-(t / 4.49) ** 2) * math.cos(3.18 * t + 0.397 * t**3)
        d = bloch_rhs(t, ground_state(1), cfg)
        assert d[2, 0] == pytest.approx(1j * omega, abs=1e-15)
        d[2, 0] = d[0, 2] = 0
        assert np.all(d == 0)

    @pytest.mark.parametrize("literal", [False, True])
    def test_matches_written_equations(self, fig2_config, literal):
        rng = np.random.default_rng(11)
        cfg = fig2_config.with_changes(
            equation_variant="paper_literal" if literal else "derived"
        )
        for _ in range(10):
            rho = random_density_matrix(rng)
            t = rng.uniform(-6, 6)
            d = bloch_rhs(t, rho, cfg)
            for (i, j), v in eq1_upper(t, rho, cfg, literal).items():
                assert d[i, j] == pytest.approx(v, abs=1e-13)
                assert d[j, i] == pytest.approx(np.conj(v), abs=1e-13)

    @settings(max_examples=100)
    @given(st.integers(0, 2**32 - 1), st.floats(-20, 20))
    def test_commutator_structure(self, seed, t):
        from lambdachirp.figures import figure_config

        rho = random_density_matrix(np.random.default_rng(seed))
        d = bloch_rhs(t, rho, figure_config(2))
        assert abs(np.trace(d)) < 1e-13
        assert np.abs(d - d.conj().T).max() < 1e-13

    def test_literal_variant_keeps_trace(self, fig2_config):
        rho = random_density_matrix(np.random.default_rng(5))
        d = bloch_rhs(0.4, rho, fig2_config.with_changes(equation_variant="paper_literal"))
        assert abs(np.trace(d)) < 1e-13


class TestRk4Step:
    def test_static_without_fields(self):
        rho = np.diag([0.1, 0.6, 0.3]).astype(complex)
        assert np.array_equal(rk4_step(0.0, rho, 0.37, dark_config()), rho)

    def test_local_error_is_fifth_order(self, fig2_config):
        def local_error(h):
            one = rk4_step(0.0, fig2_config.rho0, h, fig2_config)
            half = rk4_step(0.0, fig2_config.rho0, h / 2, fig2_config)
            two = rk4_step(h / 2, half, h / 2, fig2_config)
            return np.abs(one - two).max()

        # Richardson: halving h divides the local error by 2**5
        assert local_error(0.02) / local_error(0.01) == pytest.approx(32, rel=0.05)

    def test_free_precession(self):
        cfg = dark_config(system=LambdaSystem(omega31=3.18, omega21=0.1), dt=1e-3)
        rho = np.zeros((3, 3), complex)
        rho[0, 0] = rho[1, 1] = 0.5
        rho[1, 0] = rho[0, 1] = 0.5
        for i in range(1000):
            rho = rk4_step(i * 1e-3, rho, 1e-3, cfg)
        assert abs(rho[1, 0] - 0.5 * np.exp(-0.1j)) <= 1e-10

    def test_output_hermitian(self, fig2_config):
        rho = random_density_matrix(np.random.default_rng(2))
        out = rk4_step(0.1, rho, 0.01, fig2_config)
        assert np.array_equal(out, out.conj().T)


class TestIntegrate:
    def test_matches_stepwise_reference(self, backend, fig2_config):
        cfg = fig2_config.with_changes(t_start=-1.0, t_end=1.0, dt=0.01, record_stride=1)
        traj = integrate(cfg)
        rho = cfg.rho0
        for i in range(200):
            rho = rk4_step(-1.0 + i * 0.01, rho, 0.01, cfg)
            assert np.abs(traj.rho[i + 1] - rho).max() < 1e-14

    def test_free_precession_closed_form(self, backend):
        rho0 = np.zeros((3, 3), complex)
        rho0[0, 0] = rho0[1, 1] = 0.5
        rho0[1, 0] = rho0[0, 1] = 0.5
        cfg = dark_config(
            system=LambdaSystem(omega31=3.18, omega21=0.1),
            t_start=0.0, t_end=1.0, dt=1e-3, initial_state=rho0,
        )
        traj = integrate(cfg)
        assert abs(traj.rho[-1, 1, 0] - 0.5 * np.exp(-0.1j)) <= 1e-10

    def test_no_fields_populations_constant(self):
        cfg = dark_config(initial_state=np.diag([0.2, 0.3, 0.5]))
        pops = integrate(cfg).populations
        assert np.abs(pops - [0.2, 0.3, 0.5]).max() < 1e-15

    def test_sampling(self, fig2_traj, fig2_config):
        t = fig2_traj.t
        assert t[0] == -22.45 and t[-1] == 22.45
        assert len(t) == 89800 // 20 + 1
        assert np.allclose(np.diff(t), 20 * 5e-4, rtol=0, atol=1e-12)

    def test_partial_final_step(self, fig2_config):
        cfg = fig2_config.with_changes(t_start=-1.0, t_end=1.0013, dt=1e-3, record_stride=7)
        traj = integrate(cfg)
        assert traj.t[-1] == 1.0013
        assert np.all(np.diff(traj.t) > 0)
        # 2001 full steps, records at 0,7,...,1995 plus the end
        assert len(traj) == 2001 // 7 + 2
        ref = integrate(cfg.with_changes(dt=1.0013e-4, record_stride=10**6))
        assert np.abs(traj.rho[-1] - ref.rho[-1]).max() < 1e-10

    def test_blowup_detected(self, backend):
        cfg = SimulationConfig(
            pulse1=ChirpedPulse(50.0, 4.49, 3.18, 0.0),
            pulse2=ChirpedPulse(50.0, 4.49, 3.17999, 0.0),
            t_start=-3.0, t_end=3.0, dt=0.2,
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResolutionWarning)
            with pytest.raises(NumericalBlowupError):
                integrate(cfg)

    def test_conservation(self, fig2_traj, fig4_traj):
        for traj in (fig2_traj, fig4_traj):
            assert traj.trace_error.max() <= 1e-9
            assert traj.hermiticity_error.max() <= 1e-12
            assert np.abs(traj.purity - 1).max() <= 1e-6
            pops = traj.populations
            assert pops.min() >= -1e-9 and pops.max() <= 1 + 1e-9

    def test_time_reversal(self, fig2_config):
        there = evolve(fig2_config, fig2_config.rho0, -22.45, 22.45)
        back = evolve(fig2_config, there, 22.45, -22.45)
        assert np.abs(back - fig2_config.rho0).max() <= 1e-6

    def test_evolve_matches_integrate(self, fig2_config, fig2_traj):
        end = evolve(fig2_config, fig2_config.rho0, fig2_config.t_start, fig2_config.t_end)
        assert np.array_equal(end, fig2_traj.rho[-1])

    def test_mixed_initial_state_allowed(self, fig2_config):
        traj = integrate(fig2_config.with_changes(initial_state=np.diag([0.5, 0.5, 0.0])))
        assert traj.trace_error.max() < 1e-9
        # purity of a mixed state is also conserved by unitary dynamics
        assert abs(traj.purity[-1] - 0.5) < 1e-6


class TestOracle:
    def test_zero_fields_only_phases(self):
        amps = np.array([0.6, 0.8j, 0.0])
        cfg = dark_config(initial_state=pure_state(amps), t_start=0.0, t_end=2.0, dt=1e-2)
        traj = schrodinger_oracle(cfg)
        assert np.abs(traj.populations - [0.36, 0.64, 0.0]).max() < 1e-12
        expected = 0.8j * 0.6 * np.exp(-1j * 1e-5 * 2.0)
        assert abs(traj.rho[-1, 1, 0] - expected) < 1e-13

    def test_agrees_with_rk4(self, fig2_config, fig2_traj):
        oracle = schrodinger_oracle(fig2_config)
        assert np.array_equal(oracle.t, fig2_traj.t)
        assert np.abs(oracle.rho - fig2_traj.rho).max() <= 1e-6

    def test_norm_preserved(self, fig2_config):
        oracle = schrodinger_oracle(fig2_config)
        assert np.abs(np.trace(oracle.rho, axis1=1, axis2=2).real - 1).max() <= 1e-10

    def test_partial_final_step(self, fig2_config):
        cfg = fig2_config.with_changes(t_start=-3.0, t_end=3.0007, dt=1e-3, record_stride=13)
        oracle = schrodinger_oracle(cfg)
        traj = integrate(cfg)
        assert np.array_equal(oracle.t, traj.t)
        assert np.abs(oracle.rho - traj.rho).max() < 1e-6

    def test_rejects_mixed_state(self, fig2_config):
        cfg = fig2_config.with_changes(initial_state=np.diag([0.5, 0.5, 0.0]))
        with pytest.raises(ValidationError, match="pure"):
            schrodinger_oracle(cfg)


class TestFinalObservables:
    def test_single_sample(self):
        rho = np.zeros((1, 3, 3), complex)
        rho[0, 0, 0] = rho[0, 1, 1] = 0.5
        rho[0, 1, 0] = rho[0, 0, 1] = -0.5
        obs = final_observables(Trajectory(np.array([0.0]), rho))
        assert obs.abs_rho21 == 0.5 and obs.re_rho21 == -0.5
        assert (obs.rho11, obs.rho22, obs.rho33, obs.max_rho33) == (0.5, 0.5, 0.0, 0.0)
        assert obs.rho_dd == pytest.approx(1.0)

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            final_observables(Trajectory(np.zeros(0), np.zeros((0, 3, 3), complex)))

    def test_figure2(self, fig2_traj):
        obs = final_observables(fig2_traj)
        assert obs.abs_rho21 == pytest.approx(0.5, abs=0.05)
        assert obs.max_rho33 >= obs.rho33

    def test_figure4(self, fig4_traj):
        obs = final_observables(fig4_traj)
        assert obs.rho22 > max(obs.rho11, obs.rho33)
