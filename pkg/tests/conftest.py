import pytest

_LINES: list = []


@pytest.fixture
def report():
    """Record a one-line criterion verdict for the terminal summary."""

    def record(name: str, passed: bool, detail: str):
        _LINES.append(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
