import pytest

ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance_line(capsys):
    """Record and print one pass/fail line for an acceptance criterion."""

    def emit(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        ACCEPTANCE[number] = line
        with capsys.disabled():
            print("\n" + line)
        return passed

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
