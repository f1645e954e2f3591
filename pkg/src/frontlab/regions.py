"""Positive and negative regions of a Jacobian, their Euler characteristics and integrals."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bundle import Role, _check_role, gauss_density
from .grid import POLE_PROBE, TriGrid, build_grid, normalized_jacobian

MIN_CELL_FRACTION = 2.0 ** -12


class TopologyError(ValueError):
    pass


class AccuracyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    samples_used: int

    def to_dict(self) -> dict:
        return {"value": self.value, "error_estimate": self.error_estimate,
                "samples_used": self.samples_used}


@dataclass
class RegionDecomposition:
    role: Role
    grid: TriGrid
    chi_plus: int
    chi_minus: int

    @property
    def surface(self):
        return self.grid.surface

    def euler_characteristic(self, label) -> int:
        return self.chi_plus if _label(label) > 0 else self.chi_minus

    def faces(self):
        """Labeled polygons covering the domain, in (u, v) coordinates.

        Runs of whole grid cells of one sign are merged into rectangles; cells
        crossed by the singular set are split into their four triangles and
        crossed triangles are clipped along the zero of the interpolated
        Jacobian.  Periodic rectangles may extend past the upper domain edge.
        """
        g = self.grid
        nu, nv = g.shape
        dom = self.surface.domain
        sign = g.sign
        out = []
        cu = nu if dom.u_periodic else nu - 1
        cv = nv if dom.v_periodic else nv - 1
        ncell = cu * cv
        cell_tris = g.tri[:4 * ncell].reshape(4, ncell, 3)
        cell_sign = sign[cell_tris].reshape(4, ncell, 3)
        pure = np.all(cell_sign == cell_sign[0, :, :1], axis=(0, 2))
        label = cell_sign[0, :, 0]
        us = g.pos[:g.n_nodes:nv, 0]
        vs = g.pos[:nv, 1]
        du = dom.spans[0] / nu if dom.u_periodic else np.diff(us).mean()
        dv = dom.spans[1] / nv if dom.v_periodic else np.diff(vs).mean()
        for i in range(cu):
            j = 0
            while j < cv:
                c = i * cv + j
                if not pure[c]:
                    j += 1
                    continue
                j1 = j
                while j1 + 1 < cv and pure[c + j1 + 1 - j] and label[c + j1 + 1 - j] == label[c]:
                    j1 += 1
                u0, u1 = us[i], us[i] + du
                v0, v1 = vs[j], vs[j1] + dv
                out.append({"label": int(label[c]),
                            "polygon": [[u0, v0], [u1, v0], [u1, v1], [u0, v1]]})
                j = j1 + 1
        mixed_tris = np.flatnonzero(np.repeat(~pure[None, :], 4, axis=0).ravel())
        extra = np.arange(4 * ncell, len(g.tri))
        for t in np.concatenate([mixed_tris, extra]):
            out.extend(_triangle_faces(g, t))
        return out

    def to_dict(self) -> dict:
        return {"role": self.role.value, "chi_plus": self.chi_plus, "chi_minus": self.chi_minus,
                "faces": self.faces()}


def _label(label) -> int:
    if isinstance(label, str):
        label = label.strip().lower()
        if label in ("+", "plus", "m+", "positive"):
            return 1
        if label in ("-", "minus", "m-", "negative"):
            return -1
        raise ValueError(f"unknown region label {label!r}")
    return 1 if label > 0 else -1


def _triangle_faces(g: TriGrid, t):
    ids = g.tri[t]
    a, b = ids[[0, 0]], ids[[1, 2]]
    start, d = g.edge_delta(a, b)
    p0 = start[0]
    pts = np.array([p0, p0 + d[0], p0 + d[1]])
    vals = g.values[ids]
    s = g.sign[ids]
    if np.all(s == s[0]):
        return [{"label": int(s[0]), "polygon": pts.tolist()}]
    faces = []
    for lab in (1, -1):
        poly = _clip_polygon(pts, lab * vals)
        if len(poly) >= 3:
            faces.append({"label": lab, "polygon": poly.tolist()})
    return faces


def _clip_polygon(pts, f):
    """Part of a polygon where the linear interpolant of ``f`` is nonnegative."""
    out = []
    n = len(pts)
    for k in range(n):
        p, q = pts[k], pts[(k + 1) % n]
        fp, fq = f[k], f[(k + 1) % n]
        if fp >= 0:
            out.append(p)
        if (fp >= 0) != (fq >= 0):
            out.append(p + fp / (fp - fq) * (q - p))
    return np.array(out)


def decompose_regions(surface, role=Role.PHI, grid=(256, 256), tri_grid=None,
                      require_closed=False) -> RegionDecomposition:
    role = Role.parse(role)
    _check_role(surface, role)
    g = tri_grid if tri_grid is not None else build_grid(surface, role, grid)
    if require_closed and not surface.domain.closed:
        raise TopologyError("Gauss-Bonnet needs a closed domain")
    return RegionDecomposition(role, g, g.euler(1), g.euler(-1))


def euler_characteristic(decomposition: RegionDecomposition, label) -> int:
    return decomposition.euler_characteristic(label)


# -- area integrals ----------------------------------------------------------------

_GL4_X, _GL4_W = np.polynomial.legendre.leggauss(4)
_GL3_X, _GL3_W = np.polynomial.legendre.leggauss(3)
_LATTICE = np.linspace(0.0, 1.0, 5)


def _cell_quadrature(integrand, lo, size, x, w):
    t = 0.5 * (x + 1.0)
    U = lo[:, None, None, 0] + size[:, None, None, 0] * t[None, :, None]
    V = lo[:, None, None, 1] + size[:, None, None, 1] * t[None, None, :]
    U, V = np.broadcast_arrays(U, V)
    vals = integrand(np.stack([U, V], axis=-1).reshape(-1, 2)).reshape(len(lo), len(x), len(x))
    ww = 0.25 * np.outer(w, w)
    return np.einsum("cij,ij->c", vals, ww) * size[:, 0] * size[:, 1]


def _lattice_values(surface, role, lo, size):
    dom = surface.domain
    U = lo[:, None, None, 0] + size[:, None, None, 0] * _LATTICE[None, :, None]
    V = lo[:, None, None, 1] + size[:, None, None, 1] * _LATTICE[None, None, :]
    U = np.broadcast_to(U, (len(lo), 5, 5)).copy()
    V = np.broadcast_to(V, (len(lo), 5, 5)).copy()
    if dom.pole_at_u_min:
        U = np.maximum(U, dom.u_range[0] + POLE_PROBE)
    if dom.pole_at_u_max:
        U = np.minimum(U, dom.u_range[1] - POLE_PROBE)
    u, v = dom.wrap(U, V)
    q = np.stack([u, v], axis=-1).reshape(-1, 2)
    return normalized_jacobian(surface, q, role).reshape(len(lo), 5, 5), U, V


def _clipped_centroid_rule(integrand, U, V, F):
    """Centroid rule on the part of each lattice triangle where ``F >= 0``.

    ``U, V, F`` have shape (cells, 5, 5); every lattice square is split into
    two triangles and ``F`` is interpolated linearly.
    """
    P = np.stack([U, V], axis=-1)
    a = P[:, :-1, :-1].reshape(-1, 2)
    b = P[:, 1:, :-1].reshape(-1, 2)
    c = P[:, 1:, 1:].reshape(-1, 2)
    d = P[:, :-1, 1:].reshape(-1, 2)
    fa = F[:, :-1, :-1].ravel()
    fb = F[:, 1:, :-1].ravel()
    fc = F[:, 1:, 1:].ravel()
    fd = F[:, :-1, 1:].ravel()
    tris = [(a, b, c, fa, fb, fc), (a, c, d, fa, fc, fd)]
    areas, cents = [], []
    for p0, p1, p2, f0, f1, f2 in tris:
        area, cent = _clip_triangles(np.stack([p0, p1, p2], 1), np.stack([f0, f1, f2], 1))
        areas.append(area)
        cents.append(cent)
    area = np.concatenate(areas)
    cent = np.concatenate(cents)
    keep = area > 0
    if not keep.any():
        return 0.0, 0
    vals = integrand(cent[keep])
    return math.fsum(vals * area[keep]), int(keep.sum())


def _clip_triangles(P, F):
    """Area and centroid of ``{F >= 0}`` inside triangles ``P`` (n, 3, 2)."""
    full_area = 0.5 * np.abs((P[:, 1, 0] - P[:, 0, 0]) * (P[:, 2, 1] - P[:, 0, 1])
                             - (P[:, 2, 0] - P[:, 0, 0]) * (P[:, 1, 1] - P[:, 0, 1]))
    full_cent = P.mean(axis=1)
    inside = F >= 0
    n_in = inside.sum(axis=1)
    area = np.where(n_in == 3, full_area, 0.0)
    cent = full_cent.copy()
    partial = (n_in == 1) | (n_in == 2)
    if partial.any():
        Pp, Fp, ins = P[partial], F[partial], inside[partial]
        lone_is_in = (ins.sum(axis=1) == 1)
        lone = np.where(lone_is_in, np.argmax(ins, axis=1), np.argmin(ins, axis=1))
        r = np.arange(len(Pp))
        i1, i2 = (lone + 1) % 3, (lone + 2) % 3
        v, fv = Pp[r, lone], Fp[r, lone]
        t1 = fv / (fv - Fp[r, i1])
        t2 = fv / (fv - Fp[r, i2])
        q1 = v + t1[:, None] * (Pp[r, i1] - v)
        q2 = v + t2[:, None] * (Pp[r, i2] - v)
        A = full_area[partial]
        small = A * t1 * t2
        c_small = (v + q1 + q2) / 3.0
        c_full = full_cent[partial]
        rest = np.maximum(A - small, 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            c_rest = (A[:, None] * c_full - small[:, None] * c_small) / rest[:, None]
        c_rest = np.where(rest[:, None] > 0, c_rest, c_full)
        area[partial] = np.where(lone_is_in, small, rest)
        cent[partial] = np.where(lone_is_in[:, None], c_small, c_rest)
    return area, cent


def _base_shape(surface, base):
    dom = surface.domain
    if base is not None:
        return base
    r = dom.spans[0] / dom.spans[1]
    nv = 48
    return (max(8, int(round(nv * r))), nv)


def integrate_region(surface, role=Role.PHI, label=1, integrand=None, tol=1e-6,
                     decomposition: RegionDecomposition | None = None, base=None):
    """Integral of ``integrand(q) du dv`` over the region where the Jacobian has sign ``label``.

    Cells are classified on a 5x5 sign lattice; pure cells use 4x4
    Gauss-Legendre and cells meeting the singular set are quartered down to
    2^-12 of the domain diameter, where the clipped-triangle centroid rule
    takes over.  Each refinement level gives a complete estimate and the
    last two are combined into a Richardson error estimate.
    """
    role = Role.parse(role)
    _check_role(surface, role)
    if decomposition is not None:
        role = decomposition.role
    sign = _label(label)
    if integrand is None:
        def integrand(q):
            return gauss_density(surface, q)
    dom = surface.domain
    nu, nv = _base_shape(surface, base)
    hmin = MIN_CELL_FRACTION * dom.diameter
    I, J = np.meshgrid(np.arange(nu), np.arange(nv), indexing="ij")
    size0 = np.array([dom.spans[0] / nu, dom.spans[1] / nv])
    lo = np.stack([dom.u_range[0] + I.ravel() * size0[0], dom.v_range[0] + J.ravel() * size0[1]], -1)
    size = np.broadcast_to(size0, lo.shape).copy()

    resolved = []
    err_pure = 0.0
    samples = 0
    levels = []
    while True:
        F, U, V = _lattice_values(surface, role, lo, size)
        samples += F.size
        S = np.where(F >= 0, 1, -1)
        full = np.all(S == sign, axis=(1, 2))
        mixed = ~full & ~np.all(S == -sign, axis=(1, 2))
        if full.any():
            q4 = _cell_quadrature(integrand, lo[full], size[full], _GL4_X, _GL4_W)
            q3 = _cell_quadrature(integrand, lo[full], size[full], _GL3_X, _GL3_W)
            resolved.extend(q4.tolist())
            err_pure += float(np.sum(np.abs(q4 - q3)))
            samples += 25 * int(full.sum())
        clipped, used = _clipped_centroid_rule(integrand, U[mixed], V[mixed], sign * F[mixed])
        samples += used
        levels.append(math.fsum(resolved) + clipped)
        if not mixed.any() or np.max(size[mixed]) <= hmin:
            break
        lo_m, sz = lo[mixed], size[mixed] / 2
        lo = np.concatenate([lo_m, lo_m + [1, 0] * sz, lo_m + [0, 1] * sz, lo_m + sz])
        size = np.concatenate([sz] * 4)

    value = levels[-1]
    if len(levels) >= 2:
        # centroid rule on the boundary strip converges at second order
        err = abs(levels[-1] - levels[-2]) / 3.0
        if len(levels) >= 4:
            diffs = np.abs(np.diff(levels[-4:]))
            if not (diffs[-1] < diffs[0] or diffs[-1] <= tol * max(1.0, abs(value))):
                raise AccuracyError("region integral refinement is not converging")
    else:
        err = 0.0
    err += err_pure
    return IntegralResult(float(value), float(err), int(samples))


def integrate_signed(surface, role=Role.PHI, weight=None, tol=1e-8, n=None):
    """Integral of ``weight * lambda du dv`` over the whole domain.

    ``weight=None`` integrates the Gauss density ``K lambda``, which is smooth
    for fronts.  Periodic directions use the trapezoid rule, the others
    Gauss-Legendre; the estimate compares ``n`` with ``n/2`` nodes.
    """
    role = Role.parse(role)
    _check_role(surface, role)
    dom = surface.domain
    from .bundle import jacobian

    def density(q):
        if weight is None:
            return gauss_density(surface, q)
        return weight(q) * jacobian(surface, q, role)

    def rule(k, lo, span, periodic):
        if periodic:
            x = lo + span * (np.arange(k) + 0.5) / k
            return x, np.full(k, span / k)
        x, w = np.polynomial.legendre.leggauss(k)
        return lo + span * 0.5 * (x + 1.0), w * span * 0.5

    def run(k):
        xu, wu = rule(k, dom.u_range[0], dom.spans[0], dom.u_periodic)
        xv, wv = rule(k, dom.v_range[0], dom.spans[1], dom.v_periodic)
        U, V = np.meshgrid(xu, xv, indexing="ij")
        vals = density(np.stack([U.ravel(), V.ravel()], -1)).reshape(k, k)
        return float(wu @ vals @ wv), k * k

    k = n or 64
    prev, used = run(k // 2)
    total = used
    while True:
        cur, used = run(k)
        total += used
        err = abs(cur - prev)
        if err <= tol * max(1.0, abs(cur)) or k >= 1024 or n is not None:
            return IntegralResult(cur, err, total)
        prev = cur
        k *= 2


def integrate_singular_curve(curve, tol=1e-8):
    from .singular import integrate_singular_curve as _impl
    return _impl(curve, tol)
