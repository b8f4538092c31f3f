import pytest

from goldbach_lab.mangoldt import build_mangoldt_table, build_unit_table


@pytest.fixture(scope="session")
def lam_small():
    return build_mangoldt_table(2**16)


@pytest.fixture(scope="session")
def unit_small():
    return build_unit_table(2**16)


@pytest.fixture(scope="session")
def lam_big():
    # covers the truncation length for N up to 2^16 at epsilon = 1e-9
    return build_mangoldt_table(2**22)


@pytest.fixture(scope="session")
def unit_big():
    return build_unit_table(2**22)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion, then assert it."""

    def record(number, title, passed, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}")
        assert passed, f"criterion {number} ({title}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(".")[0].split()[-1])):
            terminalreporter.write_line(line)
