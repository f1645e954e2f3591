import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frontlab import catalog
from frontlab.bundle import jacobian
from frontlab.catalog import flip_orientation
from frontlab.grid import PoleError
from frontlab.singular import (A3_SIGN_CONVENTION, StencilError, UnclassifiedError, a3_sign,
                               check_marker_density, classify_singular_point, curvature_density,
                               integrate_singular_curve, lambda_jet_along_null, null_direction,
                               singular_curvature, singular_curvature_reference, trace_singular_curves)

ORIGIN = np.array([0.0, 0.0])


def test_sign_convention_constant():
    assert A3_SIGN_CONVENTION in (1, -1)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.5, 0.5))
def test_cusp_null_jet_closed_form(v):
    # lambda = u + 3 v^2.  On the singular set eta = d/dv, so lambda' = 6 v.  Off it the
    # small-eigenvector extension of eta tilts by -v lambda / (1 + v^2) in u, which
    # gives lambda'' = 6 / (1 + v^2), so 6 at the cusp itself
    s = catalog.build("cusp_nf")
    q = np.array([-3 * v * v, v])
    eta = null_direction(s, q[None])[0]
    _, l1, l2, _ = lambda_jet_along_null(s, q, eta=eta)
    sgn = np.sign(eta[1])
    assert l1 == pytest.approx(sgn * 6 * v, abs=1e-7)
    assert l2 == pytest.approx(6.0 / (1 + v * v), rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.5, 0.5))
def test_eta_flip_leaves_lambda2_invariant(v):
    s = catalog.build("cusp_nf")
    q = np.array([-3 * v * v, v])
    eta = null_direction(s, q[None])[0]
    a = lambda_jet_along_null(s, q, eta=eta)
    b = lambda_jet_along_null(s, q, eta=-eta)
    assert a[1] == pytest.approx(-b[1], abs=1e-9)
    assert a[2] == pytest.approx(b[2], rel=1e-8)
    assert a[3] == pytest.approx(-b[3], abs=1e-6)


def test_a3_sign_flips_with_domain_orientation():
    s = catalog.build("cusp_nf")
    r = classify_singular_point(s, ORIGIN)
    rf = classify_singular_point(flip_orientation(s), ORIGIN)
    assert a3_sign(r) == -a3_sign(rf)


def test_a3_sign_refuses_non_a3():
    with pytest.raises(UnclassifiedError):
        a3_sign(classify_singular_point(catalog.build("fold_nf"), ORIGIN))


def test_tiny_null_step_rejected():
    s = catalog.build("fold_map", eps=1)
    with pytest.raises(StencilError):
        lambda_jet_along_null(s, ORIGIN, step=1e-8)


def test_strict_beaks_mode_still_sees_beaks():
    r = classify_singular_point(catalog.build("beaks_nf"), ORIGIN, strict_beaks=True)
    assert r.cls in ("beaks", "degenerate-unclassified")
    assert classify_singular_point(catalog.build("lips_nf"), ORIGIN, strict_beaks=True).cls == "lips"


@pytest.mark.parametrize("name,q", [("fold_map", (0.0, 0.3)), ("cusp_nf", (-0.12, 0.2))])
def test_closed_form_curvature_matches_conormal_reference(name, q):
    s = catalog.build(name)
    q = np.array(q)
    if name == "cusp_nf":
        q[0] = -3 * q[1] ** 2
    k = singular_curvature(s, q[None])[0]
    ref = singular_curvature_reference(s, q)
    assert k == pytest.approx(ref, rel=1e-5)


def test_curvature_density_bounded_at_cusp():
    s = catalog.build("cusp_nf")
    v = np.array([1e-2, 1e-3, 1e-4, 1e-5])
    q = np.stack([-3 * v * v, v], -1)
    kappa = singular_curvature(s, q)
    dens = curvature_density(s, q)
    assert np.all(np.abs(np.diff(np.abs(kappa))) > 0)
    assert np.abs(kappa[-1]) > 100 * np.abs(kappa[0])
    assert np.ptp(dens) < 1e-2 * np.abs(dens).max()


def test_cusp_curve_has_one_marker():
    curves = trace_singular_curves(catalog.build("cusp_nf"), grid=(128, 128))
    assert len(curves) == 1 and not curves[0].closed
    (m,) = curves[0].a3_markers
    assert np.hypot(*m.q) < 1e-6 and m.sign == 1


def test_traced_points_lie_on_singular_set():
    s = catalog.build("ellipsoid_parallel", t=5.5)
    for c in trace_singular_curves(s, grid=(128, 128)):
        q = c.evaluate(np.linspace(0, c.period, 50))["q"]
        assert np.max(np.abs(jacobian(s, q))) < 1e-9


def test_sphere_projection_fold_has_unit_curvature():
    # the projection of the sphere folds along the equator, whose image is a unit circle
    s = catalog.build("sphere_projection")
    curves = trace_singular_curves(s, grid=(128, 128))
    assert len(curves) == 1
    ev = curves[0].evaluate(np.linspace(0, curves[0].period, 40))
    assert np.allclose(np.abs(ev["kappa"]), 1.0, atol=1e-6)


def test_curve_integral_of_ellipsoid_parallel_is_finite():
    s = catalog.build("ellipsoid_parallel", t=5.5)
    for c in trace_singular_curves(s, grid=(128, 128)):
        check_marker_density(c)
        r = integrate_singular_curve(c)
        assert math.isfinite(r.value) and r.error_estimate < 1e-4


def test_projection_through_pole_is_refused():
    s = catalog.build("bumpy_sphere_projection", view_theta=math.pi / 2)
    with pytest.raises(PoleError):
        trace_singular_curves(s, grid=(64, 64))


def test_sine_rotation_gauss_map_fold_has_positive_curvature_somewhere():
    s = catalog.build("sine_rotation")
    curves = trace_singular_curves(s, "psi", grid=(128, 128))
    k = np.concatenate([c.kappa[np.isfinite(c.kappa)] for c in curves])
    assert k.size and k.max() > 0
