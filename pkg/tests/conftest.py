import functools

import pytest
from hypothesis import HealthCheck, settings

from lightlike import catalog, frame_for

settings.register_profile("lightlike", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lightlike")

ADMISSIBLE = [
    "tube-gamma1",
    "tube-gamma2",
    "tube-circle",
    "tube-gamma4",
    "ribbon-cubic",
    "ribbon-quartic",
    "ribbon-parabola",
    "graph-paraboloid",
]


@functools.lru_cache(maxsize=None)
def cached_frame(name, samples=None):
    return frame_for(catalog(name), samples=samples)[2]


@pytest.fixture(scope="session")
def circle_frame():
    return cached_frame("tube-circle")


@pytest.fixture(scope="session")
def gamma4_frame():
    return cached_frame("tube-gamma4")


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
