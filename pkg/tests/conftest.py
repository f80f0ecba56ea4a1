"""Shared fixtures and the acceptance-criteria summary hook."""

import numpy as np
import pytest

# one (label, passed, detail) triple per acceptance criterion, appended by
# tests/test_acceptance.py and echoed after the run
ACCEPTANCE_RESULTS = []


def record_criterion(label: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((label, passed, detail))
    print(f"[{'PASS' if passed else 'FAIL'}] {label}" + (f" ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE_RESULTS:
        line = f"[{'PASS' if passed else 'FAIL'}] {label}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
