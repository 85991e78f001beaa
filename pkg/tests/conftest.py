import numpy as np
import pytest

from lambdachirp import kernels
from lambdachirp.dynamics import integrate
from lambdachirp.figures import figure_config


@pytest.fixture(scope="session")
def fig2_config():
    return figure_config(2)


@pytest.fixture(scope="session")
def fig4_config():
    return figure_config(4)


@pytest.fixture(scope="session")
def fig2_traj(fig2_config):
    return integrate(fig2_config)


@pytest.fixture(scope="session")
def fig4_traj(fig4_config):
    return integrate(fig4_config)


@pytest.fixture(params=kernels.available())
def backend(request):
    previous = kernels.backend_name()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


def random_density_matrix(rng, rank=3):
    a = rng.normal(size=(3, rank)) + 1j * rng.normal(size=(3, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
