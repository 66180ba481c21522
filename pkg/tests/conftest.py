import numpy as np
import pytest

from rolle import ParamPoint


def random_param_points(n, seed=0, strict=True):
    """Uniform points of the simplex 0 <= a <= b <= c <= 1."""
    rng = np.random.default_rng(seed)
    pts = np.sort(rng.random((n, 3)), axis=1)
    if strict:
        ok = (pts[:, 0] > 0) & (np.diff(pts, axis=1).min(axis=1) > 0) & (pts[:, 2] < 1)
        pts = pts[ok]
    return pts


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sample_points():
    return [ParamPoint(*map(float, p)) for p in random_param_points(200, seed=7)]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
