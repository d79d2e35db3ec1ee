import math

import numpy as np
import pytest

from fracks import make_grid, transform_forward
from fracks.spectral_core import SpectralField


@pytest.fixture
def grid2():
    return make_grid(2, 32)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_real_field(grid, rng, band=None):
    """Real random field, optionally cut to |k_i| <= band."""
    f = transform_forward(rng.standard_normal(grid.shape), grid)
    if band is None:
        return f
    keep = np.ones(grid.shape, dtype=bool)
    for k in grid.k_axes:
        keep &= np.broadcast_to(np.abs(k) <= band, grid.shape)
    return SpectralField(grid, np.where(keep, f.coeffs, 0.0))


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


TWO_PI = 2 * math.pi


_CRITERIA = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_CRITERIA] = []


@pytest.fixture
def report(request):
    """Record ``criterion k: PASS/FAIL ...`` and echo it; repeated at session end."""

    def emit(k, ok, detail):
        line = f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}"
        request.config.stash[_CRITERIA].append((k, line))
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
