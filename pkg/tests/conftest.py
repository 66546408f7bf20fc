import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def kn_loops(a, b):
    """Kulkarni-Nomizu product by explicit loops."""
    n = a.shape[0]
    out = np.zeros((n,) * 4)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        out[i, j, k, l] = a[i, k] * b[j, l] - a[i, l] * b[j, k] - a[j, k] * b[i, l] + a[j, l] * b[i, k]
    return out


def cubic1_loops(w):
    n = w.shape[0]
    return sum(
        w[i, j, k, l] * w[i, p, k, q] * w[p, j, q, l]
        for i, j, k, l, p, q in itertools.product(range(n), repeat=6)
    )


def cubic2_loops(w):
    n = w.shape[0]
    return sum(
        w[i, j, k, l] * w[k, l, p, q] * w[p, q, i, j]
        for i, j, k, l, p, q in itertools.product(range(n), repeat=6)
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


#: acceptance criterion number -> (passed, summary); filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        passed, summary = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'}  {summary}")
