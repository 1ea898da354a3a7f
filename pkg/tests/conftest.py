import math

import pytest
from hypothesis import HealthCheck, settings

from trace_sobolev import Curves, PhiCurve, QuadratureSpec

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# closed forms at n = 3, p = 2
PI = math.pi
T0_32 = PI ** 0.25 * (8 / PI ** 2) ** (1 / 6)
TE_32 = PI ** 0.25 / (PI / 6) ** (1 / 6)
GE_32 = PI ** 0.5 / (PI / 6) ** (1 / 6)
E_32 = PI ** 0.25
S_32 = math.sqrt(3) * (PI / 2) ** (2 / 3)


@pytest.fixture(scope="session")
def quad():
    return QuadratureSpec()


@pytest.fixture(scope="session")
def curves32(quad):
    return Curves.for_pair(3, 2, quad)


@pytest.fixture(scope="session")
def phi32(curves32):
    return PhiCurve(curves32)


@pytest.fixture(scope="session")
def const32(curves32):
    return curves32.constants()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
