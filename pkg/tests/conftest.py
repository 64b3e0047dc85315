from __future__ import annotations

import pytest

_LINES: list[str] = []


@pytest.fixture
def report_line():
    """Record one human-readable verdict line; all of them are echoed at the end."""

    def record(label: str, passed: bool, detail: str) -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}"
        _LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
