import pytest
from hypothesis import HealthCheck, settings

from isostab.forms import HyperbolicSpace
from isostab.ring import Ring

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def F3():
    return Ring(3)


@pytest.fixture
def F5():
    return Ring(5)


@pytest.fixture
def Z9():
    return Ring(3, 2)


@pytest.fixture
def H2(F3):
    return HyperbolicSpace(F3, 2)


@pytest.fixture
def H3(F3):
    return HyperbolicSpace(F3, 3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
