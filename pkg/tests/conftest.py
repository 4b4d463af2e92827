import numpy as np
import pytest
from hypothesis import settings

from gblab.fock import Mode, Polarization, build_basis, photon_modes

settings.register_profile("gblab", database=None, deadline=None, derandomize=True, max_examples=50)
settings.load_profile("gblab")

Z = (0.0, 0.0, 1.0)

# filled by test_acceptance; printed once at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def full4():
    """One momentum along z, all four polarizations, n_max = 4."""
    return build_basis(photon_modes([Z]), 4)


@pytest.fixture(scope="session")
def scalar_mode():
    return Mode(Z, Polarization.SCALAR)
