import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line and fail the test when the check fails."""
    def record(name: str, ok: bool, detail: str) -> None:
        line = f"{name} {'PASS' if ok else 'FAIL'}: {detail}"
        _LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
