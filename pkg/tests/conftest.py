"""Shared pytest hooks: acceptance verdict lines are echoed after the run."""

import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one ``[PASS]``/``[FAIL]``/``[WARN]`` line for the summary."""

    def record(name: str, ok: bool, detail: str, soft: bool = False) -> bool:
        tag = "PASS" if ok else ("WARN" if soft else "FAIL")
        line = f"[{tag}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance verdicts")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
