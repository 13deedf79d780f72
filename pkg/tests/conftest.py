import numpy as np
import pytest

from dsfft.digit_slicing import SliceParams
from dsfft.fixedpoint import QFormat

Q8 = QFormat(8, 7)
Q9 = QFormat(9, 8)
Q16 = QFormat(16, 15)
P4B2 = SliceParams(4, 2)
P4B4 = SliceParams(4, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
