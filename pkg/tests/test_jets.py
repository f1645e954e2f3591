import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frontlab.jets import TPoly, cross, dot, monomials, normalize

coord = st.floats(-2.0, 2.0, allow_nan=False)


def test_monomial_count():
    for n in range(6):
        assert len(monomials(n)) == (n + 1) * (n + 2) // 2


@given(coord, coord)
def test_product_rule_matches_closed_form(u, v):
    tu, tv = TPoly.variables(u, v, 3)
    p = (tu * tu * tv).exp()  # exp(u^2 v)
    e = math.exp(u * u * v)
    assert p.partial(0, 0) == pytest.approx(e)
    assert p.partial(1, 0) == pytest.approx(2 * u * v * e)
    assert p.partial(0, 1) == pytest.approx(u * u * e)
    assert p.partial(1, 1) == pytest.approx((2 * u + 2 * u ** 3 * v) * e)
    assert p.partial(0, 2) == pytest.approx(u ** 4 * e)


@given(coord, coord)
def test_pythagoras(u, v):
    tu, tv = TPoly.variables(u, v, 4)
    w = tu * tv + tu.sin()
    one = w.sin() ** 2 + w.cos() ** 2
    assert np.allclose(one.c[0], 1.0)
    assert np.allclose(one.c[1:], 0.0, atol=1e-9)


@given(st.floats(0.2, 3.0), coord)
def test_reciprocal_and_sqrt(u, v):
    tu, tv = TPoly.variables(u, v, 3)
    x = tu + tv * tv
    if x.value <= 0.05:
        return
    r = x * x.reciprocal()
    assert np.allclose(r.c, TPoly.variables(u, v, 3)[0]._coerce(1.0).c, atol=1e-9)
    s = x.sqrt()
    assert np.allclose((s * s).c, x.c, atol=1e-9)


def test_diff_lowers_order():
    tu, tv = TPoly.variables(0.3, -0.7, 3)
    p = tu ** 3 + tu * tv
    d = p.diff(0)
    assert d.order == 2
    assert d.partial(0, 0) == pytest.approx(3 * 0.09 - 0.7)
    assert d.partial(1, 0) == pytest.approx(6 * 0.3)


def test_vector_helpers():
    tu, tv = TPoly.variables(np.array([0.1, 0.5]), np.array([0.2, -0.3]), 2)
    a = (tu, tv, tu * 0.0 + 1.0)
    n = normalize(a)
    assert np.allclose(dot(n, n).value, 1.0)
    c = cross(a, (tv, tu, tu * 0.0))
    assert np.allclose(dot(c, a).value, 0.0)


def test_negative_power_matches_reciprocal():
    tu, _ = TPoly.variables(1.3, 0.0, 3)
    assert np.allclose((tu ** -1).c, tu.reciprocal().c)
