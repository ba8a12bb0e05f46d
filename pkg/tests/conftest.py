import pytest

from twistlab.hecke import build_integer_coefficients

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def eigen_small():
    return build_integer_coefficients(12, 2000)


@pytest.fixture(scope="session")
def eigen_large():
    return build_integer_coefficients(12, 100_000)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
