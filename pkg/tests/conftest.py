import numpy as np
import pytest

from dmm.field import PrimeField


@pytest.fixture
def f13():
    return PrimeField(13)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


class ZeroRng:
    """Stand-in generator whose uniform draws are all zero."""

    def integers(self, low, high, size=None, dtype=np.int64):
        return np.zeros(size, dtype=dtype)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
