import numpy as np
import pytest

from nltsa.series import LogisticParams, generate_trajectory, random_initial_value

_ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    """Record one pass/fail line per acceptance criterion."""

    def record(name, passed, detail=""):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def logistic_series(seed, length=100_000, transient=100):
    return generate_trajectory(random_initial_value(seed), LogisticParams(4.0), length, transient)


@pytest.fixture(scope="session")
def logistic_1e5():
    return logistic_series(0)


@pytest.fixture(scope="session")
def logistic_1e4():
    return logistic_series(1, length=10_000)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
