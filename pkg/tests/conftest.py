import itertools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from skelbary.polytope import build_polytope  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def square():
    return build_polytope([(-1, -1), (1, -1), (1, 1), (-1, 1)], name="square")


@pytest.fixture(scope="session")
def cube3():
    return build_polytope(list(itertools.product((-1, 1), repeat=3)), name="cube3")


@pytest.fixture(scope="session")
def segment():
    return build_polytope([(0,), (1,)], name="segment")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
