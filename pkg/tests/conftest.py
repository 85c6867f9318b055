import numpy as np
import pytest

ACCEPTANCE_LINES = []


def grid_range(f, lo, hi, n=10_000):
    """Brute-force range of a scalar function on a uniform grid.

    Returns ``(min, max, max_step_change)``; the last value bounds how far
    the true extrema can sit from the grid extrema.
    """
    xs = np.linspace(lo, hi, n)
    ys = f(xs)
    step = float(np.max(np.abs(np.diff(ys)))) if n > 1 else 0.0
    return float(ys.min()), float(ys.max()), step


def box_samples(box, rng, count=1000, max_corner_dim=10):
    """Uniform interior samples plus every vertex when the box is small."""
    pts = [box.sample(rng, count)]
    if box.dim <= max_corner_dim:
        pts.append(box.corners())
    return np.vstack(pts)


def escape(points, box):
    """Largest relative violation of the box by any point (<= 0 means inside)."""
    scale = 1.0 + np.maximum(np.abs(box.lo), np.abs(box.hi))
    below = (box.lo - points) / scale
    above = (points - box.hi) / scale
    return float(np.max(np.maximum(below, above)))


def record(criterion, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
