from fractions import Fraction

import pytest

from orbitrsh.bundle import LineBundle
from orbitrsh.dynsys import Odometer, Rotation
from orbitrsh.model import Model

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def golden():
    return Rotation.from_theta("golden")


@pytest.fixture(scope="session")
def golden_model(golden):
    return Model.build(LineBundle.circle(golden, 1), golden.arc(0, Fraction(1, 2)))


@pytest.fixture(scope="session")
def trivial_model(golden):
    return Model.build(LineBundle.trivial(golden), golden.arc(0, Fraction(1, 2)))


@pytest.fixture(scope="session")
def odometer():
    return Odometer.for_region_depth((2, 3), 1)


@pytest.fixture(scope="session")
def odometer_model(odometer):
    return Model.build(LineBundle.trivial(odometer), odometer.cylinder([0]))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
