import numpy as np
import pytest

from romc.model import ObjectiveProblem


class FnObjective:
    """Deterministic analytic objective with the same interface as ``Objective``."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, theta):
        self.calls += 1
        return float(self.fn(np.asarray(theta, dtype=float)))

    def batch(self, thetas):
        return np.array([self(t) for t in np.atleast_2d(thetas)])


def make_problem(fn, bounds, index=0):
    return ObjectiveProblem(index=index, seed=0, objective=FnObjective(fn), bounds=np.asarray(bounds, dtype=float))


@pytest.fixture
def problem_factory():
    return make_problem


_ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    """Record one acceptance line; all lines are repeated in the terminal summary."""

    def record(line):
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
