import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture
def data_dir():
    import rankfair
    return os.path.join(os.path.dirname(rankfair.__file__), "data")


@pytest.fixture
def ratings_path(data_dir):
    return os.path.join(data_dir, "ratings.dat")


@pytest.fixture
def users_path(data_dir):
    return os.path.join(data_dir, "users.dat")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion, printed at the end."""
    try:
        from test_acceptance import CRITERIA
    except ImportError:
        return
    if not CRITERIA.results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for number in sorted(CRITERIA.results):
        ok, label = CRITERIA.results[number]
        terminalreporter.write_line(
            "  criterion %2d: %s  (%s)" % (number, "PASS" if ok else "FAIL", label))
