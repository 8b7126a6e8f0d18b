import os
import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "xsimp", deadline=None, max_examples=int(os.environ.get("XSIMP_EXAMPLES", 40)),
    derandomize=True, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("xsimp")

SUITE_BUDGET = 300.0
_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._xsimp_start = time.perf_counter()


@pytest.fixture
def suite_elapsed(request):
    return lambda: time.perf_counter() - request.config._xsimp_start


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, {"title": title, "passed": True, "seconds": 0.0})
    entry["passed"] &= rep.passed
    entry["seconds"] += rep.duration


def pytest_terminal_summary(terminalreporter, config):
    if not _criteria:
        return
    total = time.perf_counter() - config._xsimp_start
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        ok = e["passed"]
        extra = ""
        if number == 14:
            ok = ok and total < SUITE_BUDGET
            extra = f"; session wall clock {total:.1f}s of {SUITE_BUDGET:.0f}s"
        tr.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {e['title']}"
                      f"  ({e['seconds']:.2f}s{extra})")


def pytest_sessionfinish(session, exitstatus):
    total = time.perf_counter() - session.config._xsimp_start
    if 14 in _criteria and total >= SUITE_BUDGET and exitstatus == 0:
        session.exitstatus = 1
