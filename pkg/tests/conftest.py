import re

import pytest

_results: dict[int, tuple[str, bool]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_c(\d+)_(\w+)", report.nodeid)
    if not m or report.when != "call" and not report.failed:
        return
    n = int(m.group(1))
    ok = report.passed and _results.get(n, ("", True))[1]
    _results[n] = (m.group(2), ok)


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        name, ok = _results[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {name}")
