import datetime as dt

import pytest

from synthload import fixtures

# (criterion, passed, detail) lines collected by the acceptance tests
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_fixture(tmp_path_factory):
    """30 households, two days; enough for end-to-end plumbing tests."""
    root = tmp_path_factory.mktemp("small")
    path = fixtures.write_fixture(root, n_households=30, dates=[dt.date(2019, 1, 15), dt.date(2019, 7, 15)], n_diaries=80, n_buildings=60)
    return path
