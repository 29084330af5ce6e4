from __future__ import annotations

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from heiscr.hgroup import HPoint

settings.register_profile(
    "heiscr", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("heiscr")

# Lines reported by the acceptance tests, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []

coord = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)
dims = st.integers(1, 3)


@st.composite
def points(draw, n: int | None = None, lo: float = -3.0, hi: float = 3.0):
    n = draw(dims) if n is None else n
    c = draw(st.lists(st.floats(lo, hi, allow_nan=False), min_size=2 * n + 1,
                      max_size=2 * n + 1))
    return HPoint.from_coords(np.array(c))


@st.composite
def point_tuples(draw, k: int):
    n = draw(dims)
    return tuple(draw(points(n)) for _ in range(k))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
