"""Shared fixtures and the acceptance summary hook."""

import re

import pytest

# nodeid fragment -> (criterion number, short name), filled in by
# test_acceptance.py; the hook prints one line per criterion at the end.
ACCEPTANCE_TESTS = {}
_results = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    m = re.search(r"test_acceptance\.py::(\w+)", report.nodeid)
    if not m:
        return
    name = m.group(1)
    if name in ACCEPTANCE_TESTS:
        _results[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name, (num, label) in sorted(
        ACCEPTANCE_TESTS.items(), key=lambda kv: kv[1][0]
    ):
        outcome = _results.get(name)
        if outcome is None:
            continue
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE CRITERION {num}: {status} - {label}")
