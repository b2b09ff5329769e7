import random

import pytest

from xtrvmss.xtr import generate_params, params_from_primes

TOY_P, TOY_Q = 23, 13


@pytest.fixture(scope="session")
def toy():
    """p = 23, q = 13 (p² - p + 1 = 3·13²)."""
    return params_from_primes(TOY_P, TOY_Q, random.Random(1), lam=5)


@pytest.fixture(scope="session")
def mid():
    """A seeded 32-bit parameter set (q has 22 bits)."""
    return generate_params(32, random.Random(2024))


# One line per acceptance criterion, printed after the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
