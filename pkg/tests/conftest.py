import numpy as np
import pytest

from blerkit import bundled_code


@pytest.fixture(scope="session")
def hamming():
    return bundled_code("hamming_7_4")


@pytest.fixture(scope="session")
def ldpc96():
    return bundled_code("ldpc_96_48")


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import CRITERION_LINES
    except ImportError:
        return
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERION_LINES):
            terminalreporter.write_line(line)
