import hypothesis
import pytest

from invphase import coeffsys

hypothesis.settings.register_profile("default", deadline=None, max_examples=100)
hypothesis.settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def spin():
    return coeffsys.load_builtin("spin")


@pytest.fixture(scope="session")
def spin_z2():
    return coeffsys.load_builtin("spin_z2")


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
