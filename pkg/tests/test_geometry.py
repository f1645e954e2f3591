import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_points
from frontlab import catalog
from frontlab.geometry import (Ambient, AmbientModel, DomainError, ParamDomain, StepError, eval_jet,
                               finite_difference_jet, mu_form)


@pytest.mark.parametrize("name", catalog.names())
def test_analytic_jets_match_finite_differences(name, rng):
    s = catalog.build(name)
    q = random_points(s, 50, rng, margin=0.02)
    jet = eval_jet(s, q)
    fd = finite_difference_jet(s, q)
    for k in ("p_u", "p_v", "p_uu", "p_uv", "p_vv"):
        a = getattr(jet.f, k)
        assert np.max(np.abs(a - getattr(fd, k)) / np.maximum(np.abs(a), 1.0)) < 1e-6


def test_fd_step_floor():
    with pytest.raises(StepError):
        finite_difference_jet(catalog.build("sphere"), np.array([[1.0, 1.0]]), h=1e-9)


def test_domain_validation():
    with pytest.raises(DomainError):
        ParamDomain((1.0, 0.0), (0.0, 1.0))
    with pytest.raises(DomainError):
        ParamDomain((0.0, 1.0), (0.0, 1.0), pole_at_u_min=True)


@pytest.mark.parametrize("name,topology,chi", [("sphere", "sphere", 2), ("torus", "torus", 0),
                                              ("cusp_nf", "plane", 1), ("sine_rotation", "cylinder", 0)])
def test_topology(name, topology, chi):
    d = catalog.build(name).domain
    assert d.topology == topology and d.euler_characteristic == chi


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_wrap_lands_in_fundamental_rectangle(u, v):
    d = catalog.build("torus").domain
    wu, wv = d.wrap(u, v)
    assert d.u_range[0] <= wu <= d.u_range[1] and d.v_range[0] <= wv <= d.v_range[1]
    assert math.isclose(math.cos(wu), math.cos(u), abs_tol=1e-9)


def test_eval_outside_domain_rejected():
    with pytest.raises(DomainError):
        eval_jet(catalog.build("cusp_nf"), np.array([[5.0, 0.0]]))


def test_sphere3_inner_and_mu_form():
    s = catalog.build("clifford_torus")
    jet = eval_jet(s, np.array([[0.4, 1.1]]))
    m = s.ambient
    assert m.kind is Ambient.SPHERE3
    assert np.allclose(m.inner(jet.f.p, jet.f.p), 1.0)
    assert np.allclose(m.inner(jet.f.p, jet.nu.p), 0.0)
    lam = mu_form(m, jet, jet.f.p_u, jet.f.p_v)
    assert abs(lam[0]) > 0.1


def test_lorentz_inner():
    m = AmbientModel(Ambient.HYPERBOLIC3)
    x = np.array([1.0, 0.0, 0.0, 0.0])
    assert m.inner(x, x) == -1.0
