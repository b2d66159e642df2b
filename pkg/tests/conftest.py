import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cayleyset.moduli import special_pair
from cayleyset.pencil import ConicPair, circles_pair

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def chapple():
    return circles_pair(3.0, 1.0, np.sqrt(3.0))


@pytest.fixture(scope="session")
def fuss():
    return circles_pair(2.0, 1.0, np.sqrt(5 - np.sqrt(17)))


@pytest.fixture(scope="session")
def negative():
    return ConicPair(np.eye(3), np.diag([1.0, 2.0, 3.0]))


@pytest.fixture(scope="session")
def cayley_diag():
    return ConicPair(np.eye(3), np.diag([6 + 4 * np.sqrt(2), 2.0, 1.0]))


@pytest.fixture(scope="session")
def special():
    return special_pair()
