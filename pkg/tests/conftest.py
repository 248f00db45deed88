import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one verdict line; the summary hook prints them together."""

    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append((number, f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} | {detail}"))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
