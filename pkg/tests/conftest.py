"""Shared test configuration.

Acceptance tests register one verdict per criterion through
record_criterion; a terminal-summary hook replays them as one line each
so the final report always shows the per-criterion outcome, pass or
fail, without digging through the pytest output.
"""

from __future__ import annotations

_CRITERIA: dict[int, tuple[str, bool]] = {}


def record_criterion(number: int, title: str, passed: bool) -> str:
    """Store and format the verdict line for one acceptance criterion."""
    _CRITERIA[number] = (title, passed)
    verdict = "PASS" if passed else "FAIL"
    return f"criterion {number} ({title}): {verdict}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed = _CRITERIA[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {number}: {title}")
