import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

PINNED = json.loads((HERE / "oracles" / "pinned.json").read_text())


@pytest.fixture(scope="session")
def pinned():
    return PINNED


def bisect_cubic(eta, tol=1e-15):
    """Plain bisection on x^3 + 3x^2 - 4 - eta^2 over [1, 1 + eta^2]."""
    f = lambda x: x ** 3 + 3 * x ** 2 - 4 - eta * eta
    lo, hi = 1.0, 1.0 + eta * eta
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    return 0.5 * (lo + hi)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# One line per acceptance criterion, shown after the run.
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
