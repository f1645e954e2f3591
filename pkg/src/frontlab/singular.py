"""Singular curves, singular-point classification and singular curvature."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .bundle import (Role, _check_role, apply_hom, fiber_rotate, hom_images, lambda_and_gradient,
                     null_direction_field, source_jet)
from .geometry import eval_jet, fiber_project
from .grid import POLE_CLEARANCE, PoleError, TriGrid, build_grid, normalized_jacobian
from .regions import AccuracyError, IntegralResult

# Global orientation of the A3 sign relative to sgn(lambda''); pinned by the
# ellipsoid swallowtails and by Quine's formula.
A3_SIGN_CONVENTION = 1

DERIVATIVE_RTOL = 1e-5
NONDEGEN_RTOL = 1e-6
DEGENERATE_CURVE_TOL = 1e-6
NULL_STEP = 1e-3


class RankError(ValueError):
    """Both singular values vanish: the homomorphism has rank 0."""


class StencilError(ValueError):
    pass


class UnclassifiedError(ValueError):
    pass


# -- roots of the Jacobian on grid edges ---------------------------------------

def refine_edge_roots(surface, role, start, delta, fa, fb, tol=1e-10, max_iter=200):
    """Roots of the normalized Jacobian on segments ``start + s*delta``, ``s`` in [0, 1].

    Vectorized Illinois iteration, stopped when the bracket is shorter than
    ``tol`` in domain units.
    """
    lo = np.zeros(len(start))
    hi = np.ones(len(start))
    flo = np.asarray(fa, float).copy()
    fhi = np.asarray(fb, float).copy()
    length = np.linalg.norm(delta, axis=1)
    side = np.zeros(len(start), np.int8)
    active = np.ones(len(start), bool)
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        denom = fhi[idx] - flo[idx]
        s = np.where(denom != 0, lo[idx] - flo[idx] * (hi[idx] - lo[idx]) / denom, 0.5 * (lo[idx] + hi[idx]))
        # keep strictly inside the bracket, fall back to bisection when stuck
        width = hi[idx] - lo[idx]
        bad = ~((s > lo[idx] + 0.01 * width) & (s < hi[idx] - 0.01 * width))
        s = np.where(bad, 0.5 * (lo[idx] + hi[idx]), s)
        fs = normalized_jacobian(surface, start[idx] + s[:, None] * delta[idx], role)
        same_lo = np.sign(fs) == np.sign(flo[idx])
        # Illinois: halve the stale endpoint when the same side is kept twice
        lo_new = np.where(same_lo, s, lo[idx])
        hi_new = np.where(same_lo, hi[idx], s)
        flo_new = np.where(same_lo, fs, np.where(side[idx] == -1, flo[idx] * 0.5, flo[idx]))
        fhi_new = np.where(same_lo, np.where(side[idx] == 1, fhi[idx] * 0.5, fhi[idx]), fs)
        side[idx] = np.where(same_lo, 1, -1)
        lo[idx], hi[idx], flo[idx], fhi[idx] = lo_new, hi_new, flo_new, fhi_new
        done = ((hi[idx] - lo[idx]) * length[idx] < tol) | (fs == 0)
        exact = fs == 0
        lo[idx[exact]] = s[exact]
        hi[idx[exact]] = s[exact]
        active[idx[done]] = False
    s = 0.5 * (lo + hi)
    return start + s[:, None] * delta


# -- pointwise analysis ----------------------------------------------------------

def _oriented_tangent(grad):
    """Unit tangent of the singular set with the positive side on its left."""
    t = np.stack([grad[..., 1], -grad[..., 0]], axis=-1)
    return t / np.linalg.norm(t, axis=-1, keepdims=True)


def null_direction(surface, q, role=Role.PHI, tangent=None, rank_tol=1e-8):
    """Null direction at a rank-one point.

    With ``tangent`` given (or derived from the Jacobian gradient) the sign
    makes ``(tangent, eta)`` positively oriented.
    """
    role = Role.parse(role)
    _check_role(surface, role)
    q = np.asarray(q, float)
    jet = eval_jet(surface, q)
    eta, s_small, s_large = null_direction_field(surface, q, role, jet=jet)
    if np.any(s_large <= rank_tol):
        raise RankError("homomorphism has rank 0")
    if tangent is None:
        _, grad = lambda_and_gradient(surface, q, role, jet=jet)
        if np.all(np.linalg.norm(grad, axis=-1) > 0):
            tangent = _oriented_tangent(grad)
    if tangent is not None:
        det = tangent[..., 0] * eta[..., 1] - tangent[..., 1] * eta[..., 0]
        eta = np.where((det < 0)[..., None], -eta, eta)
    return eta


def _length_scale(surface) -> float:
    return 0.5 * min(surface.domain.spans)


def _lambda_prime_field(surface, role, x, ref):
    """``dlambda(eta~)`` at points ``x`` with eta~ aligned to the direction ``ref``."""
    jet = eval_jet(surface, x, check_domain=False)
    _, grad = lambda_and_gradient(surface, x, role, jet=jet)
    eta, _, _ = null_direction_field(surface, x, role, jet=jet)
    flip = np.sum(eta * ref, axis=-1) < 0
    eta = np.where(flip[..., None], -eta, eta)
    return np.sum(grad * eta, axis=-1), eta


_D1 = np.array([1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12])
_OFFS = np.arange(-2, 3)


def lambda_jet_along_null(surface, q, role=Role.PHI, step=None, eta=None):
    """``(lambda, lambda', lambda'', lambda''')`` along the null direction.

    The extension of eta is the small-eigenvalue eigenvector of the Gram
    matrix of the homomorphism, which is null at every nearby singular point;
    the outer derivatives use fourth-order central differences.
    """
    role = Role.parse(role)
    _check_role(surface, role)
    q = np.asarray(q, float)
    if eta is None:
        eta = null_direction(surface, q, role)
    h = (step if step is not None else NULL_STEP * _length_scale(surface))
    if h < 1e-6:
        raise StencilError("null-direction stencil step below 1e-6")
    lam, grad = lambda_and_gradient(surface, q, role)
    l1 = float(np.dot(grad, eta))

    # lambda'' = d/ds lambda'(q + s eta)
    pts = q + (_OFFS * h)[:, None] * eta
    g, etas = _lambda_prime_field(surface, role, pts, eta)
    l2 = float(_D1 @ g) / h

    # lambda''' = d/ds [ d/dr lambda'(x + r eta~(x)) ] with x = q + s eta
    inner = pts[:, None, :] + (_OFFS * h)[None, :, None] * etas[:, None, :]
    gi, _ = _lambda_prime_field(surface, role, inner.reshape(-1, 2), eta)
    d_inner = gi.reshape(5, 5) @ _D1 / h
    l3 = float(_D1 @ d_inner) / h
    return float(lam), l1, l2, l3


def _hessian(surface, q, role, h=1e-5):
    q = np.asarray(q, float)
    pts = np.array([q + [h, 0], q - [h, 0], q + [0, h], q - [0, h]])
    _, g = lambda_and_gradient(surface, pts, role)
    H = np.array([(g[0] - g[1]) / (2 * h), (g[2] - g[3]) / (2 * h)])
    return 0.5 * (H + H.T)


@dataclass
class SingularPointRecord:
    q: tuple
    role: str
    cls: str
    sign: int | None
    lam: float
    grad: tuple
    l1: float
    l2: float | None
    l3: float | None
    hessian_eigs: tuple | None
    eta: tuple

    def to_dict(self) -> dict:
        return {
            "q": list(self.q), "role": self.role, "class": self.cls, "sign": self.sign,
            "lambda": self.lam, "grad": list(self.grad), "lambda1": self.l1,
            "lambda2": self.l2, "lambda3": self.l3,
            "hessian_eigs": None if self.hessian_eigs is None else list(self.hessian_eigs),
            "eta": list(self.eta),
        }


def jacobian_scale(surface, role=Role.PHI) -> float:
    """Typical size of the Jacobian gradient, from a coarse interior sample."""
    dom = surface.domain
    us = dom.u_range[0] + dom.spans[0] * (np.arange(16) + 0.5) / 16
    vs = dom.v_range[0] + dom.spans[1] * (np.arange(16) + 0.5) / 16
    q = np.stack(np.meshgrid(us, vs, indexing="ij"), axis=-1).reshape(-1, 2)
    _, grad = lambda_and_gradient(surface, q, role)
    return float(np.median(np.linalg.norm(grad, axis=-1)))


def classify_singular_point(surface, q, role=Role.PHI, strict_beaks=False, scale=None,
                            tangent=None) -> SingularPointRecord:
    role = Role.parse(role)
    _check_role(surface, role)
    q = np.asarray(q, float)
    if scale is None:
        scale = jacobian_scale(surface, role)
    lam, grad = lambda_and_gradient(surface, q, role)
    gnorm = float(np.linalg.norm(grad))
    _, s_small, s_large = null_direction_field(surface, q, role)
    if s_large <= 1e-8 * max(1.0, math.sqrt(scale)):
        raise RankError(f"rank 0 at {tuple(q)}: not a front")
    eta = null_direction(surface, q, role, tangent=tangent)
    hess_eigs = None
    sign = None
    if gnorm > NONDEGEN_RTOL * scale:
        lam_, l1, l2, l3 = lambda_jet_along_null(surface, q, role, eta=eta)
        tol = DERIVATIVE_RTOL * gnorm
        if abs(l1) > tol:
            cls = "A2"
        elif abs(l2) > tol:
            cls = "A3"
            sign = A3_SIGN_CONVENTION * (1 if l2 > 0 else -1)
        elif abs(l3) > tol:
            cls = "butterfly"
        else:
            cls = "degenerate-unclassified"
    else:
        H = _hessian(surface, q, role)
        ev = np.linalg.eigvalsh(H)
        hess_eigs = (float(ev[0]), float(ev[1]))
        lam_, l1, l2, l3 = lambda_jet_along_null(surface, q, role, eta=eta)
        htol = DERIVATIVE_RTOL * max(abs(ev[0]), abs(ev[1]), 1e-300)
        det = ev[0] * ev[1]
        if strict_beaks:
            is_lips = ev[0] > htol
            is_beaks = ev[1] < -htol and abs(l2) > htol
        else:
            is_lips = det > htol * htol
            is_beaks = det < -htol * htol and abs(l2) > htol
        cls = "lips" if is_lips else ("beaks" if is_beaks else "degenerate-unclassified")
    return SingularPointRecord(tuple(map(float, q)), role.value, cls, sign, float(lam),
                               tuple(map(float, grad)), float(l1), float(l2), float(l3),
                               hess_eigs, tuple(map(float, eta)))


def a3_sign(record: SingularPointRecord) -> int:
    if record.cls != "A3" or record.sign is None:
        raise UnclassifiedError(f"point classified {record.cls}, not A3")
    if abs(record.l2) <= DERIVATIVE_RTOL * float(np.linalg.norm(record.grad)):
        raise UnclassifiedError("lambda'' below tolerance")
    return record.sign


# -- singular curvature -----------------------------------------------------------

def curvature_terms(surface, q, role=Role.PHI, tangent=None):
    """Singular-curvature data at points of the singular set.

    Returns ``(density_arc, speed, kappa)``: the integrand of ``kappa dtau``
    per unit domain arc length, ``|X(gamma')|`` for the unit domain tangent,
    and ``kappa`` itself.  The tangent defaults to the one with the positive
    region on its left.  The density is evaluated through the non-null
    direction xi, which keeps it bounded at A3 points:

        density = < P(sum_ij t_i xi_j d_ij F), J e > / |X(xi)|,   e = X(xi)/|X(xi)|.
    """
    role = Role.parse(role)
    _check_role(surface, role)
    q = np.asarray(q, float)
    jet = eval_jet(surface, q)
    m = surface.ambient
    if tangent is None:
        _, grad = lambda_and_gradient(surface, q, role, jet=jet)
        tangent = _oriented_tangent(grad)
    eta, _, _ = null_direction_field(surface, q, role, jet=jet)
    xi = np.stack([-eta[..., 1], eta[..., 0]], axis=-1)
    src = source_jet(jet, role)
    xu, xv = hom_images(surface, jet, role)
    x_xi = xi[..., 0:1] * xu + xi[..., 1:2] * xv
    n_xi = np.sqrt(np.abs(m.inner(x_xi, x_xi)))
    e = x_xi / n_xi[..., None]
    Je = fiber_rotate(m, jet, e)
    t0, t1 = tangent[..., 0:1], tangent[..., 1:2]
    x0, x1 = xi[..., 0:1], xi[..., 1:2]
    mixed = t0 * x0 * src.p_uu + (t0 * x1 + t1 * x0) * src.p_uv + t1 * x1 * src.p_vv
    dens = m.inner(fiber_project(m, jet, mixed), Je) / n_xi
    x_t = apply_hom(surface, jet, role, tangent)
    speed = np.sqrt(np.abs(m.inner(x_t, x_t)))
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = dens / speed
    return dens, speed, kappa


def singular_curvature(surface, q, role=Role.PHI, tangent=None, speed_floor=1e-8):
    """Singular curvature at A2 points; NaN where ``|X(gamma')|`` is below the floor."""
    dens, speed, kappa = curvature_terms(surface, q, role, tangent)
    return np.where(speed > speed_floor, kappa, np.nan)


def curvature_density(surface, q, role=Role.PHI, tangent=None):
    """``kappa |X(gamma')|`` per unit domain arc length (finite at A3 points)."""
    return curvature_terms(surface, q, role, tangent)[0]


def project_to_singular_set(surface, role, q, iters=4):
    q = np.asarray(q, float).copy()
    for _ in range(iters):
        lam, grad = lambda_and_gradient(surface, q, role, jet=eval_jet(surface, q, check_domain=False))
        g2 = np.sum(grad * grad, axis=-1)
        q = q - (lam / g2)[..., None] * grad
    return q


def singular_curvature_reference(surface, q, role=Role.PHI, h=1e-3):
    """Singular curvature from finite differences of the conormal along the curve.

    Independent of :func:`curvature_terms`: it walks the singular set by
    projection, differentiates the unit conormal n with a fourth-order
    stencil and evaluates ``-<D_t n, X(gamma')> / |X(gamma')|^2``.
    """
    role = Role.parse(role)
    q = np.asarray(q, float)
    m = surface.ambient
    _, grad = lambda_and_gradient(surface, q, role)
    t0 = _oriented_tangent(grad)
    pts = project_to_singular_set(surface, role, q + (_OFFS * h)[:, None] * t0)
    jet = eval_jet(surface, pts, check_domain=False)
    _, g = lambda_and_gradient(surface, pts, role, jet=jet)
    tang = _oriented_tangent(g)
    x = apply_hom(surface, jet, role, tang)
    e = x / np.sqrt(m.inner(x, x))[:, None]
    n = fiber_rotate(m, jet, e)
    # arc-length parameter of the walked points
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    s = s - s[2]
    dn = _fd_nonuniform(s, n)
    jc = jet.take(2)
    Dn = fiber_project(m, jc, dn)
    xg = x[2]
    return float(-m.inner(Dn, xg) / m.inner(xg, xg))


def _fd_nonuniform(s, y):
    """First derivative at the middle node from five nonuniform samples."""
    V = np.vander(s, 5, increasing=True)
    w = np.linalg.solve(V.T, np.array([0, 1, 0, 0, 0], float))
    return w @ y


# -- curves -----------------------------------------------------------------------

@dataclass
class A3Marker:
    t: float
    q: tuple
    sign: int
    record: SingularPointRecord


@dataclass
class SingularCurve:
    """A traced component of a singular set, parametrized by ``t`` in ``[0, period]``."""

    surface: object
    role: Role
    closed: bool
    period: float
    spline: CubicSpline
    drift: np.ndarray
    t: np.ndarray = None
    q: np.ndarray = None
    lambda_prime: np.ndarray = None
    kappa: np.ndarray = None
    density: np.ndarray = None
    speed: np.ndarray = None
    a3_markers: list = field(default_factory=list)
    degenerate: bool = False

    def raw_point(self, t):
        t = np.asarray(t, float)
        return self.spline(t) + np.multiply.outer(t / self.period, self.drift)

    def raw_velocity(self, t):
        return self.spline(np.asarray(t, float), 1) + self.drift / self.period

    def point(self, t):
        return project_to_singular_set(self.surface, self.role, self.raw_point(t))

    def evaluate(self, t):
        """Projected points and per-unit-``t`` diagnostics at parameters ``t``."""
        t = np.asarray(t, float)
        q = self.point(t)
        jet = eval_jet(self.surface, q, check_domain=False)
        _, grad = lambda_and_gradient(self.surface, q, self.role, jet=jet)
        tang = _oriented_tangent(grad)
        ds = np.sum(self.raw_velocity(t) * tang, axis=-1)
        dens, speed, kappa = curvature_terms(self.surface, q, self.role, tangent=tang)
        eta, _, _ = null_direction_field(self.surface, q, self.role, jet=jet)
        lp = np.sum(grad * eta, axis=-1) / np.linalg.norm(grad, axis=-1)
        return {"q": q, "ds": ds, "density": dens * ds, "speed": speed * np.abs(ds),
                "kappa": kappa, "eta": eta, "lambda_prime_raw": lp, "tangent": tang}

    @property
    def classes(self):
        if self.degenerate:
            return ["degenerate-unclassified"] * len(self.t)
        return ["A2"] * len(self.t)

    def wrapped_q(self):
        dom = self.surface.domain
        return np.stack(dom.wrap(self.q[:, 0], self.q[:, 1]), axis=-1)


def _continuous_signs(eta):
    out = eta.copy()
    for k in range(1, len(out)):
        if np.dot(out[k], out[k - 1]) < 0:
            out[k] = -out[k]
    return out


def _unwrap_chain(points, domain):
    out = points.copy()
    for k, per in enumerate((domain.u_periodic, domain.v_periodic)):
        if per:
            span = domain.spans[k]
            d = np.diff(points[:, k])
            d = (d + span / 2) % span - span / 2
            out[1:, k] = points[0, k] + np.cumsum(d)
    return out


def _build_curve(surface, role, pts, closed, samples_per_point=2, strict_beaks=False, scale=None):
    dom = surface.domain
    pts = _unwrap_chain(pts, dom)
    if closed:
        nxt = _unwrap_chain(np.vstack([pts[-1], pts[0]]), dom)[1]
        drift = nxt - pts[0]
        seg = np.linalg.norm(np.diff(np.vstack([pts, nxt]), axis=0), axis=1)
    else:
        drift = np.zeros(2)
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    # drop points that nearly coincide with their predecessor
    keep = np.ones(len(pts), bool)
    tiny = 0.2 * np.median(seg)
    acc = 0.0
    for k in range(1, len(pts)):
        acc += seg[k - 1]
        if acc < tiny:
            keep[k] = False
        else:
            acc = 0.0
    pts = pts[keep]
    if closed:
        ext = np.vstack([pts, pts[0] + drift])
        s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(ext, axis=0), axis=1))])
        period = s[-1]
        base = ext - np.outer(s / period, drift)
        base[-1] = base[0]
        spline = CubicSpline(s, base, bc_type="periodic")
    else:
        s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
        period = s[-1]
        spline = CubicSpline(s, pts)
    curve = SingularCurve(surface, role, closed, float(period), spline, drift)
    n = max(64, samples_per_point * len(pts))
    n += n % 2
    t = (np.arange(n) * period / n) if closed else np.linspace(0.0, period, n + 1)
    ev = curve.evaluate(t)
    lp = _continuous_signs(ev["eta"])
    lam_prime = np.sum(lp * _grad_unit(surface, role, ev["q"]), axis=-1)
    curve.t = t
    curve.q = ev["q"]
    curve.density = ev["density"]
    curve.speed = ev["speed"]
    curve.kappa = np.where(ev["speed"] > 1e-8 * np.abs(ev["ds"]).max(), ev["kappa"], np.nan)
    if np.max(np.abs(lam_prime)) < DEGENERATE_CURVE_TOL:
        curve.degenerate = True
        curve.lambda_prime = lam_prime
        return curve
    curve.lambda_prime = lam_prime
    curve.a3_markers = _locate_markers(curve, t, lp, lam_prime, strict_beaks, scale)
    return curve


def _grad_unit(surface, role, q):
    _, g = lambda_and_gradient(surface, q, role, jet=eval_jet(surface, q, check_domain=False))
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def _lambda_prime_at(curve, t, ref):
    q = curve.point(np.atleast_1d(t))
    return float(np.sum(_grad_unit(curve.surface, curve.role, q)[0] * _aligned_eta(curve, q, ref)))


def _aligned_eta(curve, q, ref):
    eta, _, _ = null_direction_field(curve.surface, q, curve.role)
    e = eta[0]
    return -e if np.dot(e, ref) < 0 else e


def _locate_markers(curve, t, eta, lam_prime, strict_beaks, scale):
    n = len(t)
    idx = range(n) if curve.closed else range(n - 1)
    markers = []
    for k in idx:
        k1 = (k + 1) % n
        a, b = lam_prime[k], lam_prime[k1]
        if a == 0 or np.sign(a) == np.sign(b):
            continue
        ta = t[k]
        tb = t[k1] if k1 > k else curve.period
        ref = eta[k]
        fa = a
        for _ in range(80):
            tm = 0.5 * (ta + tb)
            fm = _lambda_prime_at(curve, tm, ref)
            if np.sign(fm) == np.sign(fa):
                ta, fa = tm, fm
            else:
                tb = tm
            if tb - ta < 1e-10:
                break
        ts = 0.5 * (ta + tb)
        if curve.closed:
            ts = ts % curve.period
        q = curve.point(np.array([ts]))[0]
        rec = classify_singular_point(curve.surface, q, curve.role, strict_beaks=strict_beaks, scale=scale)
        sign = rec.sign if rec.cls == "A3" else None
        markers.append(A3Marker(float(ts), tuple(map(float, q)), sign, rec))
    markers.sort(key=lambda m: m.t)
    return markers


def trace_singular_curves(surface, role=Role.PHI, grid=(256, 256), refine_tol=1e-10,
                          tri_grid: TriGrid | None = None, strict_beaks=False):
    """Trace the singular set of ``role`` into oriented curves (positive side on the left)."""
    role = Role.parse(role)
    _check_role(surface, role)
    g = tri_grid if tri_grid is not None else build_grid(surface, role, grid, refine_tol)
    mixed, st, en = kernels.crossing_segments(g.tri, g.sign)
    if len(mixed) == 0:
        return []
    for pid in g.pole_ids:
        if pid is not None and (np.any(st == pid) or np.any(en == pid)):
            raise PoleError("singular set passes within one grid row of a pole")
    ks = kernels.edge_keys(st, g.nvert)
    ke = kernels.edge_keys(en, g.nvert)
    all_keys = np.concatenate([ks, ke])
    pairs = np.concatenate([st, en])
    uniq, first = np.unique(all_keys, return_index=True)
    a, b = pairs[first, 0], pairs[first, 1]
    start, delta = g.edge_delta(a, b)
    roots = refine_edge_roots(surface, role, start, delta, g.values[a], g.values[b], tol=refine_tol)
    roots = np.stack(surface.domain.wrap(roots[:, 0], roots[:, 1]), axis=-1)
    dom = surface.domain
    if dom.pole_at_u_min and np.any(roots[:, 0] - dom.u_range[0] < POLE_CLEARANCE):
        raise PoleError("singular set within 1e-2 of a pole")
    if dom.pole_at_u_max and np.any(dom.u_range[1] - roots[:, 0] < POLE_CLEARANCE):
        raise PoleError("singular set within 1e-2 of a pole")
    root_of = dict(zip(uniq.tolist(), range(len(uniq))))
    order, offsets, closed = kernels.link_segments(ks, ke)
    scale = jacobian_scale(surface, role)
    curves = []
    for c in range(len(offsets) - 1):
        segs = order[offsets[c]:offsets[c + 1]]
        keys = [int(ks[segs[0]])] + [int(ke[s]) for s in segs]
        if closed[c]:
            keys = keys[:-1]
        pts = roots[[root_of[k] for k in keys]]
        if len(pts) < 4:
            continue
        curves.append(_build_curve(surface, role, pts, bool(closed[c]), strict_beaks=strict_beaks,
                                   scale=scale))
    return curves


def integrate_singular_curve(curve: SingularCurve, tol=1e-8, max_nodes=1 << 16):
    """Composite Simpson integral of ``kappa dtau`` with A3 markers as panel ends.

    The density is bounded at A3 markers; its value there is compared with
    one-sided quadratic extrapolations and a disagreement above 10% raises
    :class:`AccuracyError`.
    """
    L = curve.period
    cuts = sorted(m.t for m in curve.a3_markers)
    check_marker_density(curve)
    if curve.closed:
        if cuts:
            edges = cuts + [cuts[0] + L]
        else:
            edges = [0.0, L]
    else:
        edges = [0.0] + [c for c in cuts if 0 < c < L] + [L]
    total = 0.0
    err = 0.0
    used = 0
    base = max(16, 2 * int(math.ceil(len(curve.t) / 2)))
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = max(8, 2 * int(math.ceil(base * (hi - lo) / L / 2)))
        prev = None
        while True:
            x = np.linspace(lo, hi, n + 1)
            tt = x % L if curve.closed else x
            y = curve.evaluate(tt)["density"]
            if not np.all(np.isfinite(y)):
                raise AccuracyError("singular-curvature density is not finite")
            h = (hi - lo) / n
            s_n = h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
            h2 = 2 * h
            y2 = y[::2]
            s_half = h2 / 3 * (y2[0] + y2[-1] + 4 * y2[1:-1:2].sum() + 2 * y2[2:-1:2].sum()) if len(y2) >= 3 and (len(y2) - 1) % 2 == 0 else None
            est = abs(s_n - s_half) / 15 if s_half is not None else abs(s_n - prev) if prev is not None else math.inf
            used += n + 1
            if est <= tol * max(1.0, abs(s_n)) or n >= max_nodes:
                break
            prev = s_n
            n *= 2
        total += s_n
        err += est
    return IntegralResult(float(total), float(err), used)


def check_marker_density(curve: SingularCurve, rel=0.1):
    """One-sided quadratic extrapolations of the density at each A3 marker."""
    if not curve.a3_markers:
        return []
    L = curve.period
    scale = float(np.median(np.abs(curve.density))) + 1e-300
    h = 1e-3 * L
    out = []
    for m in curve.a3_markers:
        at = float(curve.evaluate(np.array([m.t]))["density"][0])
        limits = []
        for side in (-1.0, 1.0):
            tt = m.t + side * h * np.arange(1, 4)
            if curve.closed:
                tt = tt % L
            elif tt.min() < 0 or tt.max() > L:
                continue
            y = curve.evaluate(tt)["density"]
            limits.append(3 * y[0] - 3 * y[1] + y[2])
        for lim in limits:
            if abs(lim - at) > rel * max(abs(at), scale):
                raise AccuracyError(f"density diverges at the A3 marker t={m.t:.6g}")
        out.append((at, limits))
    return out
