import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from steinerlab.geom2d import Direction, area, normalize, polygon  # noqa: E402

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SQUARE = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)]
TRIANGLE = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]


@pytest.fixture
def square():
    return polygon(SQUARE)


@pytest.fixture
def triangle():
    return polygon(TRIANGLE)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


coords = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
point_lists = st.lists(st.tuples(coords, coords), min_size=3, max_size=14)


@st.composite
def polygons(draw):
    """Hulls of random point sets with area at least 1e-3."""
    pts = draw(point_lists)
    K = normalize(pts)
    assume(K.is_polygon and area(K) > 1e-3)
    return K


@st.composite
def bodies(draw):
    """Polygons, plus segments and points now and then."""
    pts = draw(st.lists(st.tuples(coords, coords), min_size=1, max_size=10))
    return normalize(pts)


directions = st.floats(0.0, math.pi, allow_nan=False).map(Direction.from_angle)


# criterion lines collected by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
