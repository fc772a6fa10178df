import time
from pathlib import Path

import pytest

SUITE_BUDGET_S = 60.0
_started = time.perf_counter()
_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    number, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    passed = report.passed if report.when == "call" else False
    prev = _results.get(number)
    _results[number] = (title, passed and (prev is None or prev[1]), detail)


def pytest_terminal_summary(terminalreporter):
    if _results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_results):
            title, passed, detail = _results[number]
            line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}"
            terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
    elapsed = time.perf_counter() - _started
    terminalreporter.write_line(f"suite wall time {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)")


def pytest_sessionfinish(session, exitstatus):
    """Fail a whole-suite run that exceeds the time budget."""
    elapsed = time.perf_counter() - _started
    modules = {Path(i.fspath).name for i in session.items}
    everything = {p.name for p in Path(__file__).parent.glob("test_*.py")}
    if modules == everything and elapsed > SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = pytest.ExitCode.TESTS_FAILED
