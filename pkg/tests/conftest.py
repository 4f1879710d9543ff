import pytest

_criterion_lines = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion.

    The line is printed immediately (visible with -s or on failure) and
    echoed in the terminal summary so it shows up in plain `pytest -v` runs.
    """

    def record(num: int, ok: bool, detail: str = ""):
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] acceptance criterion {num}: {detail}"
        _criterion_lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criterion_lines):
            terminalreporter.write_line(line)
