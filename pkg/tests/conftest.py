from pathlib import Path

import pytest

from zetalab.primes import sieve_primes
from zetalab.zeros import find_zeros

DATA = Path(__file__).parent / "data"

# Height of the 100000th zero lies in (74920.82, 74920.9).
T_1E5 = 74920.9

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def zeros_1e5():
    return find_zeros(T_1E5)


@pytest.fixture(scope="session")
def zeros_1e4(zeros_1e5):
    return zeros_1e5.restrict(1e4)


@pytest.fixture(scope="session")
def zeros_1000():
    return find_zeros(1000.0)


@pytest.fixture(scope="session")
def table_1e5():
    return sieve_primes(100_000)


@pytest.fixture(scope="session")
def table_small():
    return sieve_primes(10_000)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
