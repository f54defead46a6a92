import pytest

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def record():
    """record(k, ok, detail) stores the one-line verdict for acceptance criterion k."""
    def _record(k: int, ok: bool, detail: str) -> bool:
        line = f"ACCEPTANCE {k:2d} {'PASS' if ok else 'FAIL'}: {detail}"
        ACCEPTANCE_LINES[k] = line
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
