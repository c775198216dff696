import math
import time

import numpy as np
import pytest
from hypothesis import settings, strategies as st

settings.register_profile("onecomp", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("onecomp")


@st.composite
def disk_points(draw, max_radius=0.999):
    r = draw(st.floats(0.0, max_radius))
    t = draw(st.floats(0.0, 2.0 * math.pi))
    return complex(r * math.cos(t), r * math.sin(t))


@st.composite
def finite_zero_lists(draw, min_size=1, max_size=4, max_radius=0.95):
    return draw(st.lists(disk_points(max_radius), min_size=min_size, max_size=max_size))


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


# --------------------------------------------------------------------------
# acceptance bookkeeping: one pass/fail line per criterion
# --------------------------------------------------------------------------

_CRITERIA: list[str] = []


class _Criterion:
    def __init__(self, number, title, limit=None):
        self.number, self.title, self.limit = number, title, limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        slow = self.limit is not None and elapsed >= self.limit
        ok = exc_type is None and not slow
        budget = f" (limit {self.limit:g} s)" if self.limit is not None else ""
        line = f"criterion {self.number}: {'PASS' if ok else 'FAIL'}  {self.title}  {elapsed:.2f} s{budget}"
        _CRITERIA.append(line)
        print(line)
        if exc_type is None and slow:
            raise AssertionError(f"criterion {self.number} took {elapsed:.2f} s, limit {self.limit} s")
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
