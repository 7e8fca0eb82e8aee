import numpy as np
import pytest

from phasekit.statevector import Rng

_CRITERIA = []


@pytest.fixture
def gen():
    return np.random.default_rng(20240611)


@pytest.fixture
def rng():
    return Rng(7)


@pytest.fixture
def criterion():
    """Record an acceptance verdict; echoed in the terminal summary."""

    def record(label, passed, detail=""):
        _CRITERIA.append((label, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
