import numpy as np
import pytest

from unsharp.observables import PAULI_X, PAULI_Y, PAULI_Z


@pytest.fixture
def rng():
    return np.random.default_rng(20260418)


@pytest.fixture
def paulis():
    return PAULI_X, PAULI_Y, PAULI_Z


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
