import numpy as np
import pytest

from qwi.potential import PotentialProfile, UnitSystem

_ACCEPTANCE_LINES = []


def random_well(rng, hbar=1.0, mass=1.0):
    """3-region profile with U1, U3 in [1, 20], U2 in [-20, -1], a in [0.5, 5]."""
    u1, u3 = rng.uniform(1.0, 20.0, size=2)
    u2 = rng.uniform(-20.0, -1.0)
    a = rng.uniform(0.5, 5.0)
    return PotentialProfile([0.0, a], [u1, u2, u3]), UnitSystem(hbar, mass)


def random_wells(n, seed):
    rng = np.random.default_rng(seed)
    return [random_well(rng) for _ in range(n)]


@pytest.fixture
def units():
    return UnitSystem()


@pytest.fixture
def asym_well():
    return PotentialProfile([0.0, 2.0], [5.0, -10.0, 8.0])


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
