import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20231016)


_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion reported in the summary")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    outcome = "PASS" if call.excinfo is None else "FAIL"
    _ACCEPTANCE.append((marker.args[0], outcome, call.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome, duration in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{outcome}  {label}  ({duration:.1f}s)")
