import sys

import pytest
from hypothesis import HealthCheck, settings

# unrollings nest deeply; the default limit is too tight for F_150 fillings
sys.setrecursionlimit(20_000)

settings.register_profile(
    "default", max_examples=200, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")


@pytest.fixture
def identity():
    from compactlab import specs
    return specs.load("identity")


@pytest.fixture
def loop():
    from compactlab import specs
    return specs.load("loop")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(RESULTS):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
