"""Pytest wiring: one printed verdict line per acceptance criterion.

Acceptance tests are named test_<NN>_<slug>; their call-phase outcomes are
collected here and echoed as an "acceptance NN slug: PASS|FAIL" block in the
terminal summary, where output capture cannot swallow them.
"""
from __future__ import annotations

_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    module, _, name = report.nodeid.rpartition("::")
    if not module.endswith("test_acceptance.py"):
        return
    parts = name.split("_")
    if len(parts) < 3 or not parts[1].isdigit():
        return
    label = f"acceptance {parts[1]} {'-'.join(parts[2:])}"
    _results.append((label, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for label, verdict in _results:
        terminalreporter.write_line(f"{label}: {verdict}")
