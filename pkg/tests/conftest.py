import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_RESULTS = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = None
    for key, _ in report.user_properties:
        if key == "criterion":
            crit = _
    if crit is None:
        return
    ACCEPTANCE_RESULTS.setdefault(crit, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE_RESULTS):
        results = ACCEPTANCE_RESULTS[crit]
        verdict = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"{verdict} criterion {crit:>2} "
                                    f"({sum(results)}/{len(results)} checks)")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def sample_z():
    """20 complex points with |z| <= 2."""
    r = np.random.default_rng(7)
    rad = 2.0 * np.sqrt(r.uniform(0, 1, 20))
    ang = r.uniform(0, 2 * math.pi, 20)
    return rad * np.exp(1j * ang)
