import numpy as np
import pytest

from ergophase import models

ACCEPTANCE = []


def record(number, passed, detail):
    """Store an acceptance line; printed again in the terminal summary."""
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE.append((number, line))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section('acceptance criteria')
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope='session')
def qubit():
    return models.qubit()


@pytest.fixture(scope='session')
def ladder16():
    return models.ladder(16)
