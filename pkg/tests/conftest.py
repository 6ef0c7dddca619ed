import numpy as np
import pytest

from stiknn.core import Dataset

_criteria: dict = {}


def line_fixture(train_labels, test_label):
    """Training points at x = 1..n on a line, one test point at x = 0.

    Rank order therefore equals index order.
    """
    n = len(train_labels)
    train = Dataset(np.arange(1.0, n + 1).reshape(-1, 1), np.array(train_labels), "train")
    test = Dataset(np.array([[0.0]]), np.array([test_label]), "test")
    return train, test


@pytest.fixture
def match_1011():
    """k = 3; match flags by rank [1, 0, 1, 1]."""
    return line_fixture(["a", "b", "a", "a"], "a")


@pytest.fixture
def match_0101():
    """k = 2; match flags by rank [0, 1, 0, 1]."""
    return line_fixture(["b", "a", "b", "a"], "a")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    prev = _criteria.get(number, (title, True))
    _criteria[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")
