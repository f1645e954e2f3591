"""Parameter domains, ambient models and 2-jets of fronts and maps."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .jets import TPoly, cross, normalize


class DomainError(ValueError):
    pass


class StepError(ValueError):
    pass


@dataclass(frozen=True)
class ParamDomain:
    u_range: tuple[float, float]
    v_range: tuple[float, float]
    u_periodic: bool = False
    v_periodic: bool = False
    pole_at_u_min: bool = False
    pole_at_u_max: bool = False

    def __post_init__(self):
        for lo, hi in (self.u_range, self.v_range):
            if not hi > lo:
                raise DomainError(f"degenerate range ({lo}, {hi})")
        if (self.pole_at_u_min or self.pole_at_u_max) and not self.v_periodic:
            raise DomainError("pole flags require a periodic v direction")
        if (self.pole_at_u_min or self.pole_at_u_max) and self.u_periodic:
            raise DomainError("a polar chart cannot be periodic in u")

    @property
    def topology(self) -> str:
        if self.pole_at_u_min and self.pole_at_u_max:
            return "sphere"
        if self.pole_at_u_min or self.pole_at_u_max:
            return "disk"
        if self.u_periodic and self.v_periodic:
            return "torus"
        if self.u_periodic or self.v_periodic:
            return "cylinder"
        return "plane"

    @property
    def euler_characteristic(self) -> int:
        return {"sphere": 2, "disk": 1, "torus": 0, "cylinder": 0, "plane": 1}[self.topology]

    @property
    def closed(self) -> bool:
        return self.topology in ("sphere", "torus")

    @property
    def spans(self) -> tuple[float, float]:
        return (self.u_range[1] - self.u_range[0], self.v_range[1] - self.v_range[0])

    @property
    def diameter(self) -> float:
        return math.hypot(*self.spans)

    def wrap(self, u, v):
        """Reduce periodic coordinates into the fundamental rectangle."""
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        if self.u_periodic:
            u = self.u_range[0] + np.mod(u - self.u_range[0], self.spans[0])
        if self.v_periodic:
            v = self.v_range[0] + np.mod(v - self.v_range[0], self.spans[1])
        return u, v

    def contains(self, u, v, slack: float = 0.0):
        u, v = self.wrap(u, v)
        ok = np.ones(np.broadcast(u, v).shape, bool)
        if not self.u_periodic:
            ok &= (u >= self.u_range[0] - slack) & (u <= self.u_range[1] + slack)
        if not self.v_periodic:
            ok &= (v >= self.v_range[0] - slack) & (v <= self.v_range[1] + slack)
        return ok

    def chart_density(self, u):
        """Factor by which the coordinate area element degenerates at poles."""
        u = np.asarray(u, float)
        if not (self.pole_at_u_min or self.pole_at_u_max):
            return np.ones_like(u)
        # polar charts are normalized to u in [0, pi]
        return np.sin(np.pi * (u - self.u_range[0]) / self.spans[0])


class Ambient(enum.Enum):
    EUCLIDEAN3 = "Euclidean3"
    SPHERE3 = "Sphere3"
    HYPERBOLIC3 = "Hyperbolic3"
    FLAT_QUOTIENT3 = "FlatQuotient3"
    PLANE_TARGET2 = "PlaneTarget2"
    SPHERE_TARGET2 = "SphereTarget2"


_CURVATURE = {
    Ambient.EUCLIDEAN3: 0.0,
    Ambient.SPHERE3: 1.0,
    Ambient.HYPERBOLIC3: -1.0,
    Ambient.FLAT_QUOTIENT3: 0.0,
    Ambient.PLANE_TARGET2: 0.0,
    Ambient.SPHERE_TARGET2: 1.0,
}

_DIM = {
    Ambient.EUCLIDEAN3: 3,
    Ambient.SPHERE3: 4,
    Ambient.HYPERBOLIC3: 4,
    Ambient.FLAT_QUOTIENT3: 3,
    Ambient.PLANE_TARGET2: 2,
    Ambient.SPHERE_TARGET2: 3,
}


@dataclass(frozen=True)
class AmbientModel:
    kind: Ambient

    @property
    def c(self) -> float:
        return _CURVATURE[self.kind]

    @property
    def dim(self) -> int:
        return _DIM[self.kind]

    @property
    def is_map_target(self) -> bool:
        return self.kind in (Ambient.PLANE_TARGET2, Ambient.SPHERE_TARGET2)

    @property
    def lorentzian(self) -> bool:
        return self.kind is Ambient.HYPERBOLIC3

    def inner(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        s = np.sum(x * y, axis=-1)
        if self.lorentzian:
            s = s - 2.0 * x[..., 0] * y[..., 0]
        return s


@dataclass
class Jet2:
    """Position and first/second partials; each field has shape ``(..., dim)``."""

    p: np.ndarray
    p_u: np.ndarray
    p_v: np.ndarray
    p_uu: Optional[np.ndarray] = None
    p_uv: Optional[np.ndarray] = None
    p_vv: Optional[np.ndarray] = None

    def first(self, i: int) -> np.ndarray:
        return self.p_u if i == 0 else self.p_v

    def second(self, i: int, j: int) -> np.ndarray:
        if i + j == 0:
            return self.p_uu
        if i + j == 1:
            return self.p_uv
        return self.p_vv

    def take(self, index) -> "Jet2":
        return Jet2(*(None if a is None else a[index] for a in
                      (self.p, self.p_u, self.p_v, self.p_uu, self.p_uv, self.p_vv)))


@dataclass
class FrontJet:
    f: Jet2
    nu: Jet2

    def take(self, index) -> "FrontJet":
        return FrontJet(self.f.take(index), self.nu.take(index))


@dataclass
class MapJet:
    f: Jet2
    nu: None = None

    def take(self, index) -> "MapJet":
        return MapJet(self.f.take(index))


Mode = str  # "immersion" | "front" | "map"


@dataclass(frozen=True)
class SurfaceDescriptor:
    """A catalog surface together with its numeric parameters.

    ``builder(u, v, params)`` receives TPoly coordinates and returns
    ``(f, nu)`` as tuples of TPoly components.  Immersions may return
    ``nu=None``; the unit normal is then the normalized ``f_u x f_v``, carried
    through the Taylor arithmetic.  Maps always return ``nu=None``.
    """

    name: str
    mode: Mode
    ambient: AmbientModel
    domain: ParamDomain
    params: dict = field(default_factory=dict)
    builder: Callable = None
    doc: str = ""
    reflected: bool = False

    @property
    def closed(self) -> bool:
        return self.domain.closed

    @property
    def c(self) -> float:
        return self.ambient.c

    def with_params(self, **kw) -> "SurfaceDescriptor":
        return replace(self, params={**self.params, **kw})


def _raw_jets(surface: SurfaceDescriptor, u, v, order: int):
    derived_normal = surface.mode == "immersion"
    work = order + 1 if derived_normal else order
    tu, tv = TPoly.variables(u, v, work)
    if surface.reflected:
        # v -> v0 + v1 - v reverses the domain orientation; the chain rule is
        # carried by the Taylor arithmetic
        tv = sum(surface.domain.v_range) - tv
    f, nu = surface.builder(tu, tv, surface.params)
    if surface.mode == "map":
        nu = None
    elif nu is None:
        fu = tuple(x.diff(0) for x in f)
        fv = tuple(x.diff(1) for x in f)
        nu = normalize(cross(fu, fv))
    return f, nu


def _pack(components, order: int) -> Jet2:
    shape = components[0].c.shape[1:]

    def stack(a, b):
        return np.stack([np.broadcast_to(x.partial(a, b), shape) for x in components], axis=-1)

    j = Jet2(stack(0, 0), stack(1, 0), stack(0, 1))
    if order >= 2:
        j.p_uu, j.p_uv, j.p_vv = stack(2, 0), stack(1, 1), stack(0, 2)
    return j


def eval_jet(surface: SurfaceDescriptor, q, order: int = 2, check_domain: bool = True):
    """Analytic 2-jet of ``surface`` at points ``q`` (shape ``(..., 2)``).

    Front and immersion surfaces return a :class:`FrontJet`; maps a :class:`MapJet`.
    """
    q = np.asarray(q, float)
    u, v = q[..., 0], q[..., 1]
    dom = surface.domain
    if check_domain:
        if not np.all(dom.contains(u, v, slack=1e-9)):
            raise DomainError(f"point outside the domain of {surface.name}")
        if dom.pole_at_u_min or dom.pole_at_u_max:
            lo, hi = dom.u_range
            at_pole = ((dom.pole_at_u_min & (np.abs(u - lo) < 1e-12))
                       | (dom.pole_at_u_max & (np.abs(u - hi) < 1e-12)))
            if np.any(at_pole):
                raise DomainError("jet requested exactly at a pole of a polar chart")
    f, nu = _raw_jets(surface, u, v, order)
    fj = _pack(f, order)
    if nu is None:
        return MapJet(fj)
    return FrontJet(fj, _pack(nu, order))


def finite_difference_jet(surface: SurfaceDescriptor, q, h: float = 1e-3, field_name: str = "f") -> Jet2:
    """Fourth-order central-difference estimate of a jet from position values only."""
    if h < 1e-8:
        raise StepError(f"finite-difference step {h} below 1e-8")
    q = np.asarray(q, float)

    def value(du, dv):
        pts = q + np.array([du, dv])
        j = eval_jet(surface, pts, order=1, check_domain=False)
        src = j.f if field_name == "f" else j.nu
        return src.p

    w1 = {-2: 1 / 12, -1: -2 / 3, 1: 2 / 3, 2: -1 / 12}
    w2 = {-2: -1 / 12, -1: 4 / 3, 0: -5 / 2, 1: 4 / 3, 2: -1 / 12}
    p = value(0, 0)
    pu = sum(w * value(k * h, 0) for k, w in w1.items()) / h
    pv = sum(w * value(0, k * h) for k, w in w1.items()) / h
    puu = sum(w * value(k * h, 0) for k, w in w2.items()) / h**2
    pvv = sum(w * value(0, k * h) for k, w in w2.items()) / h**2
    puv = sum(wa * wb * value(a * h, b * h) for a, wa in w1.items() for b, wb in w1.items()) / h**2
    return Jet2(p, pu, pv, puu, puv, pvv)


def fiber_project(model: AmbientModel, jet, x):
    """Component of ``x`` in the fiber: normal (and position, if curved) removed."""
    x = np.asarray(x, float)
    p = jet.f.p
    kind = model.kind
    if kind is Ambient.PLANE_TARGET2:
        return x
    if kind is Ambient.SPHERE_TARGET2:
        return x - model.inner(x, p)[..., None] * p
    nu = jet.nu.p
    out = x - model.inner(x, nu)[..., None] * nu
    if kind is Ambient.SPHERE3:
        out = out - model.inner(x, p)[..., None] * p
    elif kind is Ambient.HYPERBOLIC3:
        # <p, p> = -1 in the Lorentzian model
        out = out + model.inner(x, p)[..., None] * p
    return out


def _det(*cols):
    return np.linalg.det(np.stack(np.broadcast_arrays(*cols), axis=-1))


def mu_form(model: AmbientModel, jet, x, y):
    """Signed fiber area ``mu(x, y)`` for the fixed co-orientation."""
    kind = model.kind
    if kind is Ambient.PLANE_TARGET2:
        return _det(x, y)
    if kind is Ambient.SPHERE_TARGET2:
        return _det(jet.f.p, x, y)
    if kind in (Ambient.EUCLIDEAN3, Ambient.FLAT_QUOTIENT3):
        return _det(x, y, jet.nu.p)
    return _det(jet.f.p, x, y, jet.nu.p)
