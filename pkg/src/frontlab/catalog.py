"""Closed-form surface families.

Every builder takes Taylor-polynomial coordinates ``(u, v)`` and a parameter
dict and returns ``(f, nu)``.  Because the arithmetic is truncated Taylor
algebra, the jets reported by :func:`frontlab.geometry.eval_jet` are exact.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .geometry import Ambient, AmbientModel, ParamDomain, SurfaceDescriptor
from .jets import TPoly, cos, cross, normalize, sin, sqrt

TWO_PI = 2.0 * math.pi

E3 = AmbientModel(Ambient.EUCLIDEAN3)
S3 = AmbientModel(Ambient.SPHERE3)
FLAT = AmbientModel(Ambient.FLAT_QUOTIENT3)
PLANE = AmbientModel(Ambient.PLANE_TARGET2)
S2 = AmbientModel(Ambient.SPHERE_TARGET2)

SPHERE_CHART = ParamDomain((0.0, math.pi), (0.0, TWO_PI), v_periodic=True,
                           pole_at_u_min=True, pole_at_u_max=True)
TORUS_CHART = ParamDomain((-math.pi, math.pi), (0.0, TWO_PI), u_periodic=True, v_periodic=True)
SQUARE = ParamDomain((-1.0, 1.0), (-1.0, 1.0))


class CatalogError(ValueError):
    pass


def _const(like: TPoly, value: float) -> TPoly:
    return like * 0.0 + value


def _lift(x: TPoly) -> TPoly:
    return x.raise_order(x.order + 1)


def _unit_normal(f):
    fu = tuple(x.diff(0) for x in f)
    fv = tuple(x.diff(1) for x in f)
    return normalize(cross(fu, fv))


# -- spheres, tori, ellipsoids -------------------------------------------------

def _sphere(u, v, p):
    f = (sin(u) * cos(v), sin(u) * sin(v), cos(u))
    return f, f


def _torus(u, v, p):
    R, r = p["R"], p["r"]
    nu = (cos(u) * cos(v), cos(u) * sin(v), -sin(u))
    rho = r * cos(u) + R
    f = (rho * cos(v), rho * sin(v), -r * sin(u))
    return f, nu


def _ellipsoid_normal(u, v, a, b, c):
    g = (sin(u) * cos(v) * (1.0 / a), sin(u) * sin(v) * (1.0 / b), cos(u) * (1.0 / c))
    return normalize(g)


def _ellipsoid(u, v, p):
    a, b, c = p["a"], p["b"], p["c"]
    f = (sin(u) * cos(v) * a, sin(u) * sin(v) * b, cos(u) * c)
    return f, _ellipsoid_normal(u, v, a, b, c)


def _ellipsoid_parallel(u, v, p):
    # displaced along the inward normal, where the focal distances lie; the
    # front keeps the outward normal so its Gauss map preserves orientation
    f, nu = _ellipsoid(u, v, p)
    t = p["t"]
    return tuple(x - n * t for x, n in zip(f, nu)), nu


def _bumpy_radius(u, v, p):
    s = sin(u)
    return s * s * s * cos(v * float(p["k"])) * p["a"] + 1.0


def _bumpy_sphere(u, v, p):
    r = _bumpy_radius(u, v, p)
    f = (r * sin(u) * cos(v), r * sin(u) * sin(v), r * cos(u))
    return f, None


def _bumpy_normal(u, v, p):
    f, _ = _bumpy_sphere(_lift(u), _lift(v), p)
    return _unit_normal(f)


def _bumpy_gauss_map(u, v, p):
    return _bumpy_normal(u, v, p), None


def _view_frame(p):
    """Orthonormal image axes for projection along the direction (theta, phi)."""
    th, ph = p["view_theta"], p["view_phi"]
    d = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
    seed = np.eye(3)[int(np.argmin(np.abs(d)))]
    e1 = seed - d * (seed @ d)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return e1, e2


def _bumpy_projection(u, v, p):
    f, _ = _bumpy_sphere(u, v, p)
    e1, e2 = _view_frame(p)
    return (sum(x * float(c) for x, c in zip(f, e1)), sum(x * float(c) for x, c in zip(f, e2))), None


def _torus_gauss_map(u, v, p):
    return _torus(u, v, p)[1], None


def _sphere_identity(u, v, p):
    return _sphere(u, v, p)[0], None


def _sphere_projection(u, v, p):
    return (sin(u) * cos(v), sin(u) * sin(v)), None


def _clifford(u, v, p):
    s = 1.0 / math.sqrt(2.0)
    f = (cos(u) * s, sin(u) * s, cos(v) * s, sin(v) * s)
    nu = (cos(u) * s, sin(u) * s, cos(v) * -s, sin(v) * -s)
    return f, nu


# -- surfaces of revolution with cycloid or Delaunay profiles ----------------------

def _cycloid_A(u, v, p):
    rho = 2.0 - cos(u)
    f = (rho * cos(v), rho * sin(v), u - sin(u))
    h = u * 0.5
    nu = (-sin(h) * cos(v), -sin(h) * sin(v), cos(h))
    return f, nu


def _cycloid_B(u, v, p):
    rho = 2.0 + cos(u)
    f = (rho * cos(v), rho * sin(v), u - sin(u))
    h = u * 0.5
    nu = (sin(h) * cos(v), sin(h) * sin(v), cos(h))
    return f, nu


def _sine_rotation(u, v, p):
    return (u * cos(v), u * sin(v), cos(u)), None


def _unduloid_slope(t, B):
    return (1.0 + B * np.sin(t)) / np.sqrt(1.0 + B * B + 2.0 * B * np.sin(t))


@functools.lru_cache(maxsize=32)
def _unduloid_table(B: float):
    """Hermite interpolant of the profile height over one period.

    Node values come from 8-point Gauss-Legendre on 4096 panels, so the table
    is exact to rounding; the cubic Hermite error is below 1e-13.
    """
    n = 4096
    nodes = np.linspace(0.0, TWO_PI, n + 1)
    x, w = np.polynomial.legendre.leggauss(8)
    h = TWO_PI / n
    pts = nodes[:-1, None] + 0.5 * h * (x[None, :] + 1.0)
    panels = 0.5 * h * (_unduloid_slope(pts, B) @ w)
    z = np.concatenate([[0.0], np.cumsum(panels)])
    return CubicHermiteSpline(nodes, z, _unduloid_slope(nodes, B)), float(z[-1])


def _unduloid_height(s, B: float):
    spline, period = _unduloid_table(float(B))
    s = np.asarray(s, float)
    k = np.floor(s / TWO_PI)
    return k * period + spline(s - k * TWO_PI)


def unduloid_period(B: float) -> float:
    return _unduloid_table(float(B))[1]


def _unduloid(u, v, p):
    B = p["B"]
    r = sqrt(sin(u) * (2.0 * B) + (1.0 + B * B))
    base = np.asarray(u.value, float)
    z0 = _unduloid_height(base, B)
    s_lo = TPoly.variables(u.value, v.value, u.order - 1)[0]
    dz = (sin(s_lo) * B + 1.0) / sqrt(sin(s_lo) * (2.0 * B) + (1.0 + B * B))
    z = dz.integrate_u(z0)
    return (r * cos(v), r * sin(v), z), None


# -- planar maps and normal forms -------------------------------------------

def _fold_map(u, v, p):
    return (u * u + v * v * p["eps"], v), None


def _fold_nf(u, v, p):
    return (u, v * v), None


def _cusp_nf(u, v, p):
    return (u, (v * v * v + u * v) * p["s"]), None


def _butterfly_nf(u, v, p):
    return (u, v ** 4 + u * v), None


def _lips_nf(u, v, p):
    return (u, v * v * v + u * u * v), None


def _beaks_nf(u, v, p):
    return (u, v * v * v - u * u * v), None


def _cylinder_fold(u, v, p):
    f = (u, v * v, v * v * v)
    w = sqrt(v * v * 9.0 + 4.0)
    nu = (_const(u, 0.0), v * -3.0 / w, 2.0 / w)
    return f, nu


# -- registry ------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    mode: str
    ambient: AmbientModel
    domain: ParamDomain
    defaults: dict
    ranges: dict
    builder: object
    doc: str

    def summary(self) -> dict:
        return {
            "name": self.name,
            "mode": self.mode,
            "ambient": self.ambient.kind.value,
            "topology": self.domain.topology,
            "closed": self.domain.closed,
            "params": dict(self.defaults),
            "doc": self.doc,
        }


def _entry(name, mode, ambient, domain, builder, doc, defaults=None, ranges=None):
    return CatalogEntry(name, mode, ambient, domain, dict(defaults or {}), dict(ranges or {}),
                        builder, doc)


_CYCLOID_CHART = ParamDomain((0.0, 2 * TWO_PI), (0.0, TWO_PI), u_periodic=True, v_periodic=True)
_UNDULOID_CHART = ParamDomain((0.0, TWO_PI), (0.0, TWO_PI), u_periodic=True, v_periodic=True)
_REVOLUTION_STRIP = ParamDomain((0.1, 3.0), (0.0, TWO_PI), v_periodic=True)

_ENTRIES = [
    _entry("beaks_nf", "map", PLANE, SQUARE, _beaks_nf,
           "beaks normal form (u, v^3 - u^2 v)"),
    _entry("bumpy_sphere", "immersion", E3, SPHERE_CHART, _bumpy_sphere,
           "radial graph r = 1 + a sin(theta)^3 cos(k phi); test instrument",
           {"a": 0.3, "k": 3}, {"a": (0.0, 0.45), "k": (1, 8)}),
    _entry("bumpy_sphere_gauss_map", "map", S2, SPHERE_CHART, _bumpy_gauss_map,
           "Gauss map of bumpy_sphere into the unit sphere",
           {"a": 0.3, "k": 3}, {"a": (0.0, 0.45), "k": (1, 8)}),
    _entry("bumpy_sphere_projection", "map", PLANE, SPHERE_CHART, _bumpy_projection,
           "orthogonal projection of bumpy_sphere along the view direction (theta, phi)",
           {"a": 0.4, "k": 3, "view_theta": 0.3, "view_phi": 0.0},
           {"a": (0.0, 0.45), "k": (1, 8)}),
    _entry("butterfly_nf", "map", PLANE, SQUARE, _butterfly_nf,
           "butterfly normal form (u, v^4 + u v)"),
    _entry("clifford_torus", "front", S3, ParamDomain((0.0, TWO_PI), (0.0, TWO_PI), True, True),
           _clifford, "Clifford torus in the unit 3-sphere, a flat front with K_ext = -1"),
    _entry("cusp_nf", "map", PLANE, SQUARE, _cusp_nf,
           "cusp normal form (u, s (v^3 + u v)); s = -1 reflects the target",
           {"s": 1}, {"s": (-1, 1)}),
    _entry("cycloid_A", "front", FLAT, _CYCLOID_CHART, _cycloid_A,
           "rotation of the cycloid with radius 2 - cos u (positive bounded K)"),
    _entry("cycloid_B", "front", FLAT, _CYCLOID_CHART, _cycloid_B,
           "rotation of the cycloid with radius 2 + cos u, a torus in R^2 x S^1"),
    _entry("cylinder_fold", "front", E3, SQUARE, _cylinder_fold,
           "cuspidal edge along a straight line, (u, v^2, v^3); zero singular curvature"),
    _entry("ellipsoid", "immersion", E3, SPHERE_CHART, _ellipsoid,
           "ellipsoid (x/a)^2 + (y/b)^2 + (z/c)^2 = 1",
           {"a": 5.0, "b": 4.0, "c": 1.0}, {"a": (0.1, 100), "b": (0.1, 100), "c": (0.1, 100)}),
    _entry("ellipsoid_parallel", "front", E3, SPHERE_CHART, _ellipsoid_parallel,
           "parallel front at distance t along the inward normal of the ellipsoid",
           {"a": 5.0, "b": 4.0, "c": 1.0, "t": 5.5},
           {"a": (0.1, 100), "b": (0.1, 100), "c": (0.1, 100), "t": (-100, 100)}),
    _entry("fold_map", "map", PLANE, ParamDomain((-2.0, 2.0), (-2.0, 2.0)), _fold_map,
           "f_eps(u, v) = (u^2 + eps v^2, v)", {"eps": 1}, {"eps": (-1, 1)}),
    _entry("fold_nf", "map", PLANE, SQUARE, _fold_nf, "fold normal form (u, v^2)"),
    _entry("lips_nf", "map", PLANE, SQUARE, _lips_nf, "lips normal form (u, v^3 + u^2 v)"),
    _entry("sine_rotation", "immersion", E3, _REVOLUTION_STRIP, _sine_rotation,
           "rotation of the sine curve (u cos v, u sin v, cos u); not closed"),
    _entry("sphere", "immersion", E3, SPHERE_CHART, _sphere, "unit sphere"),
    _entry("sphere_identity", "map", S2, SPHERE_CHART, _sphere_identity,
           "identity of the unit sphere"),
    _entry("sphere_projection", "map", PLANE, SPHERE_CHART, _sphere_projection,
           "orthogonal projection of the unit sphere to the xy-plane"),
    _entry("torus", "immersion", E3, TORUS_CHART, _torus, "torus of revolution",
           {"R": 2.0, "r": 1.0}, {"R": (0.0, 100), "r": (0.0, 100)}),
    _entry("torus_gauss_map", "map", S2, TORUS_CHART, _torus_gauss_map,
           "Gauss map of the torus of revolution", {"R": 2.0, "r": 1.0},
           {"R": (0.0, 100), "r": (0.0, 100)}),
    _entry("unduloid", "immersion", FLAT, _UNDULOID_CHART, _unduloid,
           "Delaunay unduloid with mean curvature 1/2, one period in R^2 x S^1",
           {"B": 0.5}, {"B": (0.05, 0.95)}),
]

_BY_NAME = {e.name: e for e in _ENTRIES}
ALIASES = {"ellipsoid-parallel": "ellipsoid_parallel", "clifford": "clifford_torus"}


def names() -> list[str]:
    return sorted(_BY_NAME)


def entry(name: str) -> CatalogEntry:
    key = ALIASES.get(name, name)
    if key not in _BY_NAME:
        raise CatalogError(f"unknown surface {name!r}")
    return _BY_NAME[key]


def listing() -> list[dict]:
    return [_BY_NAME[n].summary() for n in names()]


def _check_param(e: CatalogEntry, key: str, value):
    if key not in e.defaults:
        raise CatalogError(f"{e.name} has no parameter {key!r}")
    lo, hi = e.ranges.get(key, (-math.inf, math.inf))
    if not lo <= value <= hi:
        raise CatalogError(f"{e.name}: {key}={value} outside [{lo}, {hi}]")
    if e.name in ("cusp_nf",) and value not in (-1, 1):
        raise CatalogError("cusp_nf: s must be +1 or -1")
    if e.name == "fold_map" and value not in (-1, 1):
        raise CatalogError("fold_map: eps must be +1 or -1")
    if key == "k" and float(value) != int(value):
        raise CatalogError(f"{e.name}: k must be an integer")


def build(name: str, **params) -> SurfaceDescriptor:
    e = entry(name)
    for key, value in params.items():
        _check_param(e, key, value)
    merged = {**e.defaults, **params}
    if e.name in ("torus", "torus_gauss_map") and not merged["r"] < merged["R"]:
        raise CatalogError("torus requires r < R")
    return SurfaceDescriptor(e.name, e.mode, e.ambient, e.domain, merged, e.builder, e.doc)


def flip_orientation(surface: SurfaceDescriptor) -> SurfaceDescriptor:
    """Same surface with the domain orientation reversed (v -> v0 + v1 - v)."""
    return replace(surface, reflected=not surface.reflected)
