import numpy as np
import pytest

from sqie.qstate import random_state


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_pair(rng):
    def make(m, n):
        return random_state(m, rng), random_state(n, rng)

    return make


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
