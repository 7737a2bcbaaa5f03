import pytest

from shipnn.harness.config import Config
from shipnn.harness.pipeline import reproduce

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


@pytest.fixture(scope="session")
def reproduced(tmp_path_factory):
    """Full default pipeline (data, training, course-change runs), run once."""
    out = tmp_path_factory.mktemp("reproduce_a")
    return reproduce(Config(), out), out


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
