import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def invertible(rng, n, scale=0.5):
    while True:
        h = np.eye(n) + scale * rng.standard_normal((n, n))
        if abs(np.linalg.det(h)) > 0.2:
            return h


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
