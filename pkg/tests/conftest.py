import functools

import numpy as np
import pytest

from frontlab import catalog
from frontlab.gauss_bonnet import Analysis

ACCEPTANCE = {}


@functools.lru_cache(maxsize=None)
def analysis(name, grid=256, **params):
    return Analysis(catalog.build(name, **params), grid=(grid, grid))


def random_points(surface, n, rng, margin=0.05):
    """Uniform chart samples kept ``margin`` away from poles and open edges."""
    d = surface.domain
    lo_u, hi_u = d.u_range
    lo_v, hi_v = d.v_range
    if not d.u_periodic:
        lo_u, hi_u = lo_u + margin, hi_u - margin
    if not d.v_periodic:
        lo_v, hi_v = lo_v + margin, hi_v - margin
    return np.stack([rng.uniform(lo_u, hi_u, n), rng.uniform(lo_v, hi_v, n)], -1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
