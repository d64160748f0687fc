import sys

import pytest

from wpmec.model import SystemParams


def reference_params(**changes) -> SystemParams:
    """P = 0 dBW, sigma^2 = -50 dBm, alpha = 3, r = 10 m, B = 1 MHz."""
    return SystemParams.from_db(0.0, -50.0).replace(**changes)


@pytest.fixture
def params() -> SystemParams:
    return reference_params()


@pytest.fixture
def narrowband() -> SystemParams:
    return reference_params(bandwidth_hz=1e5)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
