import numpy as np
import pytest

_CRITERIA = []


def record(label, ok, detail=""):
    _CRITERIA.append((label, bool(ok), detail))
    return ok


@pytest.fixture
def criterion():
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {label} {detail}".rstrip())


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)
