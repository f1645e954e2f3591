"""Pointwise coherent-tangent-bundle quantities.

``phi`` is ``df`` and ``psi`` is the projected derivative of the unit normal.
Every function accepts a batch of domain points ``q`` of shape ``(..., 2)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .geometry import Ambient, eval_jet, fiber_project, mu_form

DEGENERACY_FLOOR = 1e-12


class ModeError(ValueError):
    pass


class Role(str, enum.Enum):
    PHI = "phi"
    PSI = "psi"

    @classmethod
    def parse(cls, value) -> "Role":
        if isinstance(value, Role):
            return value
        key = str(value).lower()
        aliases = {"first-hom": "phi", "second-hom": "psi", "#": "psi", "sharp": "psi"}
        return cls(aliases.get(key, key))


def _check_role(surface, role: Role):
    if role is Role.PSI and surface.mode == "map":
        raise ModeError(f"{surface.name} is a map; the second homomorphism is undefined")


def source_jet(jet, role: Role):
    """The Jet2 whose derivatives generate the homomorphism."""
    return jet.f if role is Role.PHI else jet.nu


def hom_images(surface, jet, role: Role):
    """``(X_u, X_v)``: images of the coordinate fields under the homomorphism."""
    src = source_jet(jet, role)
    return (fiber_project(surface.ambient, jet, src.p_u),
            fiber_project(surface.ambient, jet, src.p_v))


def jacobian(surface, q, role=Role.PHI) -> np.ndarray:
    role = Role.parse(role)
    _check_role(surface, role)
    jet = eval_jet(surface, q, order=1)
    xu, xv = hom_images(surface, jet, role)
    return mu_form(surface.ambient, jet, xu, xv)


def lambda_and_gradient(surface, q, role=Role.PHI, jet=None):
    """Jacobian and its exact gradient from the 2-jets.

    Only the second derivatives of the generating map contribute: the
    derivatives of the position and the normal inside ``mu`` produce vectors
    in a plane already spanned by the other arguments.
    """
    role = Role.parse(role)
    _check_role(surface, role)
    if jet is None:
        jet = eval_jet(surface, q)
    src = source_jet(jet, role)
    m = surface.ambient
    lam = mu_form(m, jet, src.p_u, src.p_v)
    lu = mu_form(m, jet, src.p_uu, src.p_v) + mu_form(m, jet, src.p_u, src.p_uv)
    lv = mu_form(m, jet, src.p_uv, src.p_v) + mu_form(m, jet, src.p_u, src.p_vv)
    return lam, np.stack([lu, lv], axis=-1)


def fiber_rotate(model, jet, x):
    """Quarter turn ``J x`` in the fiber with ``mu(x, Jx) = |x|^2``."""
    x = np.asarray(x, float)
    kind = model.kind
    if kind is Ambient.PLANE_TARGET2:
        return np.stack([-x[..., 1], x[..., 0]], axis=-1)
    if kind is Ambient.SPHERE_TARGET2:
        return np.cross(jet.f.p, x)
    if kind in (Ambient.EUCLIDEAN3, Ambient.FLAT_QUOTIENT3):
        return np.cross(jet.nu.p, x)
    # 4-dimensional models: w_i = det(p, x, e_i, nu) represents y -> mu(x, y)
    basis = np.eye(4)
    w = np.stack([mu_form(model, jet, x, np.broadcast_to(basis[i], x.shape)) for i in range(4)], axis=-1)
    if model.lorentzian:
        w[..., 0] = -w[..., 0]
    return w


def _normalize(x, model):
    n = np.sqrt(np.abs(model.inner(x, x)))
    return x / n[..., None]


@dataclass
class HomFrameData:
    e1: np.ndarray
    e2: np.ndarray
    G: np.ndarray
    G_sharp: np.ndarray | None


def fiber_frame(surface, jet):
    """Deterministic positive orthonormal fiber frame.

    Seeded from the ambient axis least aligned with the fiber normal
    (ties go to the lowest index), then completed by a quarter turn.
    """
    m = surface.ambient
    dim = m.dim
    axes = np.eye(dim)
    if m.kind is Ambient.PLANE_TARGET2:
        e1 = np.broadcast_to(axes[0], jet.f.p.shape).copy()
    else:
        normal = jet.f.p if m.kind is Ambient.SPHERE_TARGET2 else jet.nu.p
        align = np.abs(normal)
        if m.kind in (Ambient.SPHERE3, Ambient.HYPERBOLIC3):
            align = align + np.abs(jet.f.p)
        idx = np.argmin(align, axis=-1)
        seed = axes[idx]
        e1 = _normalize(fiber_project(m, jet, seed), m)
    e2 = fiber_rotate(m, jet, e1)
    return e1, e2


def hom_frame(surface, q) -> HomFrameData:
    jet = eval_jet(surface, q, order=1)
    m = surface.ambient
    e1, e2 = fiber_frame(surface, jet)

    def matrix(role):
        xu, xv = hom_images(surface, jet, role)
        return np.stack([np.stack([m.inner(xu, e1), m.inner(xu, e2)], -1),
                         np.stack([m.inner(xv, e1), m.inner(xv, e2)], -1)], -2)

    G = matrix(Role.PHI)
    Gs = None if surface.mode == "map" else matrix(Role.PSI)
    return HomFrameData(e1, e2, G, Gs)


@dataclass
class CurvatureSample:
    lam: np.ndarray
    lam_sharp: np.ndarray | None
    K: np.ndarray
    K_ext: np.ndarray | None
    K_ext_sharp: np.ndarray | None
    I: np.ndarray
    II: np.ndarray | None
    III: np.ndarray | None


def _gram(m, a, b):
    return np.stack([np.stack([m.inner(a[0], b[0]), m.inner(a[0], b[1])], -1),
                     np.stack([m.inner(a[1], b[0]), m.inner(a[1], b[1])], -1)], -2)


def _scale(jet) -> np.ndarray:
    s = np.sum(jet.f.p_u ** 2, -1) + np.sum(jet.f.p_v ** 2, -1)
    if jet.nu is not None:
        s = s + np.sum(jet.nu.p_u ** 2, -1) + np.sum(jet.nu.p_v ** 2, -1)
    return s


def curvature_sample(surface, q) -> CurvatureSample:
    """Fundamental forms and curvatures; undefined entries are NaN."""
    jet = eval_jet(surface, q, order=1)
    m = surface.ambient
    phi = hom_images(surface, jet, Role.PHI)
    lam = mu_form(m, jet, *phi)
    I = _gram(m, phi, phi)
    floor = DEGENERACY_FLOOR * _scale(jet) ** 2
    detI = np.linalg.det(I)
    if surface.mode == "map":
        K = np.where(detI > floor, m.c, np.nan) + 0.0 * lam
        return CurvatureSample(lam, None, K, None, None, I, None, None)
    psi = hom_images(surface, jet, Role.PSI)
    lam_s = mu_form(m, jet, *psi)
    II = -_gram(m, phi, psi)
    III = _gram(m, psi, psi)
    detII = np.linalg.det(II)
    detIII = np.linalg.det(III)
    with np.errstate(divide="ignore", invalid="ignore"):
        K_ext = np.where(detI > floor, detII / detI, np.nan)
        K_ext_s = np.where(detIII > floor, detII / detIII, np.nan)
    return CurvatureSample(lam, lam_s, m.c + K_ext, K_ext, K_ext_s, I, II, III)


def k_sharp(surface, q) -> np.ndarray:
    """Gaussian curvature of the third fundamental form (NaN where undefined)."""
    s = curvature_sample(surface, q)
    if surface.mode == "map":
        raise ModeError("k_sharp needs a front")
    defined = np.isfinite(s.K_ext_sharp)
    if surface.c == 0.0:
        return np.where(defined, 1.0, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(defined, s.K * s.lam / s.lam_sharp, np.nan)


def torsion_residual(surface, q, role=Role.PHI) -> np.ndarray:
    """``D_u X(dv) - D_v X(du)`` with D the projected ambient derivative."""
    role = Role.parse(role)
    _check_role(surface, role)
    jet = eval_jet(surface, q)
    m = surface.ambient
    src = source_jet(jet, role)

    def covariant(first_i, second_ij, dj):
        # derivative of P(x_j) in direction i, projected back to the fiber
        out = second_ij
        if surface.mode != "map":
            out = out - m.inner(first_i, jet.nu.p)[..., None] * dj(jet.nu)
        if m.kind in (Ambient.SPHERE3, Ambient.SPHERE_TARGET2):
            out = out - m.inner(first_i, jet.f.p)[..., None] * dj(jet.f)
        elif m.kind is Ambient.HYPERBOLIC3:
            out = out + m.inner(first_i, jet.f.p)[..., None] * dj(jet.f)
        return fiber_project(m, jet, out)

    d_u_xv = covariant(src.p_v, src.p_uv, lambda j: j.p_u)
    d_v_xu = covariant(src.p_u, src.p_uv, lambda j: j.p_v)
    return d_u_xv - d_v_xu


def null_direction_field(surface, q, role=Role.PHI, jet=None):
    """Unit eigenvector of the Gram matrix of ``(X_u, X_v)`` for its smaller eigenvalue.

    On the singular set this is the null direction; off it, it is a smooth
    extension that stays null along nearby singular points.  Returns
    ``(eta, sigma_small, sigma_large)`` with the singular values.
    """
    role = Role.parse(role)
    if jet is None:
        jet = eval_jet(surface, q, order=1)
    m = surface.ambient
    X = hom_images(surface, jet, role)
    gram = _gram(m, X, X)
    w, vecs = np.linalg.eigh(gram)
    eta = vecs[..., :, 0]
    return eta, np.sqrt(np.maximum(w[..., 0], 0.0)), np.sqrt(np.maximum(w[..., 1], 0.0))


def apply_hom(surface, jet, role, w):
    """Image ``X(w)`` of a domain vector ``w`` (shape ``(..., 2)``)."""
    xu, xv = hom_images(surface, jet, Role.parse(role))
    return w[..., 0:1] * xu + w[..., 1:2] * xv


def parallel_frame(surface, path, role=Role.PHI, closed=False):
    """Parallel fiber frame along ``path`` and the unwrapped angle of ``X(gamma')``.

    Returns ``(e1, e2, theta, valid)``; ``valid`` marks samples where
    ``X(gamma')`` is non-zero, and theta is interpolated across the others.
    """
    role = Role.parse(role)
    _check_role(surface, role)
    path = np.asarray(path, float)
    n = len(path)
    if closed:
        tangent = np.roll(path, -1, 0) - np.roll(path, 1, 0)
        span = np.array(surface.domain.spans)
        for k in range(2):
            per = surface.domain.u_periodic if k == 0 else surface.domain.v_periodic
            if per:
                tangent[:, k] = (tangent[:, k] + span[k] / 2) % span[k] - span[k] / 2
        tangent /= 2.0
    else:
        tangent = np.gradient(path, axis=0)
    jet = eval_jet(surface, path, order=1)
    m = surface.ambient
    x = apply_hom(surface, jet, role, tangent)
    e1_0, _ = fiber_frame(surface, jet.take(slice(0, 1)))
    e1 = np.empty(x.shape)
    prev = e1_0[0]
    for k in range(n):
        jk = jet.take(k)
        cur = fiber_project(m, jk, prev)
        cur = cur / np.sqrt(m.inner(cur, cur))
        e1[k] = cur
        prev = cur
    e2 = fiber_rotate(m, jet, e1)
    norm = np.sqrt(np.abs(m.inner(x, x)))
    valid = norm > 1e-9 * max(norm.max(), 1e-300)
    theta = np.arctan2(m.inner(x, e2), m.inner(x, e1))
    idx = np.flatnonzero(valid)
    theta_valid = np.unwrap(theta[idx])
    theta = np.interp(np.arange(n), idx, theta_valid)
    return e1, e2, theta, valid


def gauss_density(surface, q) -> np.ndarray:
    """``K dA-hat`` per unit ``du dv``, i.e. ``K lambda``; smooth across the singular set.

    For fronts this is ``c lambda + lambda#``, the same for both roles.  For
    maps it is the target curvature times ``lambda``.
    """
    q = np.asarray(q, float)
    jet = eval_jet(surface, q, order=1)
    m = surface.ambient
    lam = mu_form(m, jet, *hom_images(surface, jet, Role.PHI))
    if surface.mode == "map":
        return m.c * lam
    lam_s = mu_form(m, jet, *hom_images(surface, jet, Role.PSI))
    return m.c * lam + lam_s
