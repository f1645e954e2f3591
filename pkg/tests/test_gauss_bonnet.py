import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import analysis
from frontlab import catalog
from frontlab.gauss_bonnet import (ATOL, FORMULAS, HypothesisError, Report, applicable_checks,
                                   gb_formula, mapping_degree, rotation_index, tolerance_for, verify_theorem)
from frontlab.regions import TopologyError

CLOSED = [n for n in catalog.names() if catalog.build(n).closed]


@pytest.mark.parametrize("name", CLOSED)
def test_every_applicable_check_passes(name):
    an = analysis(name)
    checks = applicable_checks(an)
    assert checks, name
    for kind, cid in checks:
        rep = gb_formula(an, cid) if kind == "formula" else verify_theorem(an, cid)
        assert rep.passed, rep.to_dict()


@pytest.mark.parametrize("name,expected", [
    ("torus", {"1p", "1m", "2p", "2m", "c", "c1"}),
    ("ellipsoid_parallel", {"1p", "1m", "2p", "2m", "b", "d", "d1", "infty"}),
    ("clifford_torus", {"1p", "1m", "2p", "2m", "e", "g"}),
    ("torus_gauss_map", {"1p", "1m", "quine", "id"}),
    ("sphere_projection", {"1p", "1m", "levine", "id"}),
])
def test_applicable_checks_include(name, expected):
    got = {cid for _, cid in applicable_checks(analysis(name))}
    assert expected <= got, got


def test_formula_split_sum_matches_signed_integral():
    rep = gb_formula(analysis("ellipsoid_parallel"), "1p")
    assert rep.terms["split_sum"] == pytest.approx(rep.terms["int_K_dAhat"], rel=1e-6)


def test_report_json_round_trip_reproduces_decision():
    an = analysis("torus")
    for rep in (gb_formula(an, f) for f in FORMULAS):
        d = json.loads(json.dumps(rep.to_dict()))
        again = Report(d["surface"], d["params"], d["role"], "formula", d["formula"], d["identity"],
                       d["lhs"], d["rhs"], d["terms"], d["tolerance"], d["relation"], d["warnings"])
        assert again.passed == d["pass"] == rep.passed


@pytest.mark.parametrize("lhs,rhs,relation,ok", [
    (1.0, 1.0005, "==", True), (1.0, 1.1, "==", False), (-0.2, 0.0, "<", True),
    (0.0, 0.0, "<", False), (1.0, 1.0, "<=", True), (1.0, 2.0, ">=", False),
])
def test_report_relations(lhs, rhs, relation, ok):
    r = Report("x", {}, "phi", "theorem", "t", "", lhs, rhs, {}, 1e-3, relation)
    assert r.passed is ok


def test_tolerance_policy():
    assert tolerance_for(0.0) == ATOL
    assert tolerance_for(1e4) == pytest.approx(10.0)


@pytest.mark.parametrize("name,check", [
    ("sphere", "g"), ("clifford_torus", "c"), ("torus_gauss_map", "levine"),
    ("sphere_projection", "quine"), ("torus", "e"), ("sphere_identity", "b"),
])
def test_hypotheses_are_enforced(name, check):
    with pytest.raises(HypothesisError):
        verify_theorem(analysis(name), check)


def test_open_domain_refused():
    with pytest.raises(TopologyError):
        gb_formula(analysis("cusp_nf"), "1p")


def test_orientation_flip_keeps_identities():
    s = catalog.flip_orientation(catalog.build("ellipsoid_parallel", t=5.5))
    from frontlab.gauss_bonnet import Analysis
    an = Analysis(s, grid=(128, 128))
    for f in FORMULAS:
        assert gb_formula(an, f).passed
    summ = an.singular_summary("phi")
    assert (summ["S_plus"], summ["S_minus"]) == (4, 0)


@settings(max_examples=25, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_sphere_identity_has_degree_one(a, b):
    y = np.array([math.cos(a) * math.cos(b), math.sin(a) * math.cos(b), math.sin(b)])
    assert mapping_degree(catalog.build("sphere_identity"), y) == 1


def test_torus_gauss_map_has_degree_zero():
    assert mapping_degree(catalog.build("torus_gauss_map"), np.array([0.3, 0.4, 0.866])) == 0


def _ellipse(a, b, phase, n=400):
    t = phase + np.linspace(0, 2 * np.pi, n, endpoint=False)
    return np.stack([a * np.cos(t), b * np.sin(t)], -1)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.floats(0, 6.3), st.floats(0, 6.3), st.floats(-5, 5))
def test_rotation_index_is_a_motion_invariant(a, b, phase, angle, shift):
    p = _ellipse(a, b, phase)
    R = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    assert rotation_index(p) == 1.0
    assert rotation_index(p @ R.T + shift) == 1.0
    assert rotation_index(p[::-1]) == -1.0


@settings(max_examples=25, deadline=None)
@given(st.floats(0.5, 3.0), st.floats(0.0, 4.5))
def test_rotation_index_of_ellipse_parallels(a, t):
    # parallel curves of a convex curve are fronts with the same tangent lines, hence index 1
    s = np.linspace(0, 2 * np.pi, 2000, endpoint=False)
    c = np.stack([a * np.cos(s), np.sin(s)], -1)
    n = np.stack([np.cos(s), a * np.sin(s)], -1)
    n /= np.linalg.norm(n, axis=1)[:, None]
    assert rotation_index(c - t * n) == 1.0


def test_rotation_index_special_curves():
    t = np.linspace(0, 2 * np.pi, 2000, endpoint=False)
    eight = np.stack([np.sin(t), np.sin(t) * np.cos(t)], -1)
    assert rotation_index(eight) == 0.0
    astroid = np.stack([np.cos(t) ** 3, np.sin(t) ** 3], -1)
    assert abs(rotation_index(astroid)) == 1.0
