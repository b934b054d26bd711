import sys

import pytest
from mpmath import mp


@pytest.fixture(autouse=True)
def working_precision():
    # 50 requested digits + 10 guard digits
    with mp.workdps(60):
        yield


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance")
        for line in sorted(lines):
            terminalreporter.write_line(line)
