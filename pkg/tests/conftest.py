import pytest

from grassmacs.setcore import SetFamily

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def delta_example1():
    return SetFamily.from_sets(4, [[1], [1, 2, 3], [1, 3, 4], [1, 2, 4]])


@pytest.fixture
def d_example1():
    return SetFamily.from_sets(4, [[2], [2, 3, 4], [1, 2, 3]])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
