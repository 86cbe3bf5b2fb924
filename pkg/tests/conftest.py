"""Shared fixtures; the acceptance recorder prints one line per criterion at the end of the run."""

from __future__ import annotations

import pytest

ACCEPTANCE_LINES: list = []


class Recorder:
    def __init__(self, sink):
        self.sink = sink

    def __call__(self, number: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" -- {detail}" if detail else "")
        self.sink.append(line)
        print(line)
        return ok


@pytest.fixture
def record():
    return Recorder(ACCEPTANCE_LINES)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
