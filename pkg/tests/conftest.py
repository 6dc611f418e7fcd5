import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.failed or report.skipped:
        if report.failed:
            _ACCEPTANCE[n] = "FAIL"
        elif report.when == "call":
            _ACCEPTANCE.setdefault(n, "PASS")
        elif report.skipped:
            _ACCEPTANCE.setdefault(n, "SKIP")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"ACCEPTANCE criterion {n}: {_ACCEPTANCE[n]}")


@pytest.fixture
def rng():
    import random

    return random.Random(20261016)
