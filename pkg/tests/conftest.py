import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_SCENARIO_CACHE = {}


@pytest.fixture(scope="session")
def builtin_run():
    """Run a built-in scenario once per session and hand out its report."""
    from voidcell.harness.config import builtin_suite, load_suite
    from voidcell.harness.runner import run_experiment

    cfgs = {c.scenario: c for c in load_suite(builtin_suite())}

    def get(name):
        if name not in _SCENARIO_CACHE:
            import time
            t0 = time.perf_counter()
            rep = run_experiment(cfgs[name], None, 1, render=False)
            rep["seconds"] = time.perf_counter() - t0
            _SCENARIO_CACHE[name] = rep
        return _SCENARIO_CACHE[name]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary."""
    def add(number, ok, detail, seconds=None):
        t = f" [{seconds:.1f} s]" if seconds is not None else ""
        ACCEPTANCE_LINES.append((number, f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}{t}"))
    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
