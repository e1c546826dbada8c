import os
import random

import pytest

from homcirc.instances import families

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(int(os.environ.get("HOMCIRC_TEST_SEED", "20240601")))


@pytest.fixture
def projective():
    return families.projective_loop()


@pytest.fixture
def klein():
    return families.klein_bouquet()


@pytest.fixture
def torus():
    return families.torus_bouquet()


@pytest.fixture
def triangle():
    return families.sphere_cycle(3)
