import pytest

from blowup import load_spec


@pytest.fixture(scope="session")
def goldenb():
    return load_spec("goldenb")


@pytest.fixture(scope="session")
def square():
    return load_spec("square")


@pytest.fixture(scope="session")
def cantor():
    return load_spec("cantor")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
