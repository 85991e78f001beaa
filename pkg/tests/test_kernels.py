import numpy as np
import pytest

from lambdachirp import _pykernels, kernels
from lambdachirp.dynamics import integrate, pack_state, schrodinger_oracle, unpack_states

from conftest import random_density_matrix

needs_compiled = pytest.mark.skipif(
    "compiled" not in kernels.available(), reason="compiled kernels not built"
)


def test_pack_round_trip():
    rho = random_density_matrix(np.random.default_rng(1))
    assert np.allclose(unpack_states(pack_state(rho)), rho, rtol=0, atol=1e-16)


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_python_backend_selectable():
    previous = kernels.backend_name()
    kernels.set_backend("python")
    try:
        assert kernels.get() is _pykernels
    finally:
        kernels.set_backend(previous)


@needs_compiled
@pytest.mark.parametrize("variant", ["derived", "paper_literal"])
def test_backends_agree(fig4_config, variant):
    cfg = fig4_config.with_changes(t_start=-4.0, t_end=4.0003, equation_variant=variant)
    out = {}
    for name in ("compiled", "python"):
        kernels.set_backend(name)
        out[name] = integrate(cfg)
    kernels.set_backend("compiled")
    assert np.array_equal(out["compiled"].t, out["python"].t)
    assert np.abs(out["compiled"].rho - out["python"].rho).max() < 1e-13


@needs_compiled
def test_oracle_backends_agree(fig2_config):
    cfg = fig2_config.with_changes(t_start=-2.0, t_end=2.0)
    out = {}
    for name in ("compiled", "python"):
        kernels.set_backend(name)
        out[name] = schrodinger_oracle(cfg)
    kernels.set_backend("compiled")
    assert np.abs(out["compiled"].rho - out["python"].rho).max() < 1e-13


def test_apply_unitaries_recording():
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    us = np.ascontiguousarray(np.broadcast_to(q, (6, 3, 3)))
    for name in kernels.available():
        kernels.set_backend(name)
        psi = np.array([1, 0, 0], dtype=complex)
        out = np.zeros((4, 3), complex)
        n = kernels.get().apply_unitaries(us, psi, 1, 2, out, 0)
        # offset 1: records after products 1, 3 and 5
        assert n == 3
        assert np.allclose(out[0], q @ [1, 0, 0])
        assert np.allclose(psi, np.linalg.matrix_power(q, 6) @ [1, 0, 0])
    kernels.set_backend(kernels.available()[0])
