import math

import numpy as np
import pytest

from frontlab import catalog
from frontlab.catalog import CatalogError, flip_orientation, unduloid_period
from frontlab.geometry import eval_jet


def test_listing_is_sorted_and_complete():
    rows = catalog.listing()
    names = [r["name"] for r in rows]
    assert names == sorted(names) == catalog.names()
    for r in rows:
        assert set(r) >= {"name", "mode", "ambient", "topology", "closed", "params", "doc"}


def test_aliases():
    assert catalog.build("ellipsoid-parallel").name == "ellipsoid_parallel"
    assert catalog.build("clifford").name == "clifford_torus"


def test_unknown_and_bad_params():
    with pytest.raises(CatalogError):
        catalog.build("klein_bottle")
    with pytest.raises(CatalogError):
        catalog.build("torus", R=1.0, r=2.0)
    with pytest.raises(CatalogError):
        catalog.build("torus", nope=1.0)


def test_ellipsoid_is_on_its_quadric():
    s = catalog.build("ellipsoid")
    a, b, c = s.params["a"], s.params["b"], s.params["c"]
    q = np.stack(np.meshgrid(np.linspace(0.1, 3.0, 9), np.linspace(0, 6, 9)), -1).reshape(-1, 2)
    x, y, z = eval_jet(s, q).f.p.T
    assert np.allclose((x / a) ** 2 + (y / b) ** 2 + (z / c) ** 2, 1.0)


def test_parallel_front_shares_normal():
    base = catalog.build("ellipsoid")
    par = catalog.build("ellipsoid_parallel", t=2.0)
    q = np.array([[0.7, 2.1], [2.0, 0.4]])
    jb, jp = eval_jet(base, q), eval_jet(par, q)
    assert np.allclose(jp.nu.p, jb.nu.p)
    assert np.allclose(jp.f.p, jb.f.p - 2.0 * jb.nu.p)


def test_flip_orientation_reverses_jacobian():
    from frontlab.bundle import jacobian
    s = catalog.build("torus")
    f = flip_orientation(s)
    q = np.array([[0.3, 1.0]])
    assert np.sign(jacobian(s, q)) == -np.sign(jacobian(f, q))
    assert flip_orientation(f) == s


def test_unduloid_closes_up():
    s = catalog.build("unduloid")
    B = s.params["B"]
    assert unduloid_period(B) > 0
    lo, hi = s.domain.u_range
    j = eval_jet(s, np.array([[lo + 1e-9, 0.3], [hi - 1e-9, 0.3]]))
    assert np.allclose(j.nu.p[0], j.nu.p[1], atol=1e-6)


def test_clifford_lies_in_s3():
    s = catalog.build("clifford_torus")
    q = np.random.default_rng(0).uniform(0, 2 * math.pi, (20, 2))
    p = eval_jet(s, q).f.p
    assert np.allclose(np.sum(p * p, -1), 1.0)
