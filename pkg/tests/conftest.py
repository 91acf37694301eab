"""Shared fixtures and the acceptance summary printed at the end of a run."""

import mpmath
import pytest

ACCEPTANCE_LINES = []


@pytest.fixture(autouse=True)
def _mp_precision():
    # independent mpmath oracles run at about 100 digits
    with mpmath.workdps(100):
        yield


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split()[0])):
            terminalreporter.write_line(line)
