"""The four Gauss-Bonnet formulas and the identities derived from them.

Every check returns a report whose ``lhs`` and ``rhs`` are computed by
independent routes: integer sides come from grid combinatorics and signed
A3 counts, analytic sides from region, whole-domain and curve quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .bundle import Role, curvature_sample, hom_images, lambda_and_gradient
from .geometry import eval_jet
from .grid import build_grid, normalized_jacobian
from .regions import TopologyError, decompose_regions, integrate_region, integrate_signed
from .singular import (A3_SIGN_CONVENTION, curvature_terms, integrate_singular_curve,
                       trace_singular_curves)

TWO_PI = 2.0 * math.pi
ATOL = 1e-3 * TWO_PI
RTOL = 1e-3
FORMULAS = ("1p", "1m", "2p", "2m")
THEOREMS = ("a", "b", "c", "d", "e", "g", "quine", "id", "levine", "add", "infty", "c1", "d1")
CONVENTION = {
    "orientation": "(u, v) positively oriented; M+ lies left of every traced curve",
    "co_orientation": "mu(x, y) = det(x, y, nu) with the catalog unit normal",
    "a3_sign": "sgn(lambda2)" if A3_SIGN_CONVENTION > 0 else "-sgn(lambda2)",
}


class HypothesisError(ValueError):
    """A theorem's hypotheses fail numerically."""


class UnsupportedSingularity(HypothesisError):
    pass


class RegularValueError(ValueError):
    pass


class InconsistencyError(ArithmeticError):
    pass


class SamplingError(ValueError):
    pass


def tolerance_for(lhs: float, atol=ATOL, rtol=RTOL) -> float:
    return max(atol, rtol * abs(lhs))


@dataclass
class Report:
    """Outcome of one identity check (a formula or a theorem)."""

    surface: str
    params: dict
    role: str
    kind: str              # "formula" or "theorem"
    check: str
    identity: str
    lhs: float
    rhs: float
    terms: dict
    tolerance: float
    relation: str = "=="
    warnings: list = field(default_factory=list)

    @property
    def residual(self) -> float:
        if self.relation == "==":
            return abs(self.lhs - self.rhs)
        return 0.0 if self.passed else abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        if self.relation == "==":
            return abs(self.lhs - self.rhs) <= self.tolerance
        if self.relation == "<":
            return self.lhs < self.rhs
        if self.relation == "<=":
            return self.lhs <= self.rhs + self.tolerance
        if self.relation == ">=":
            return self.lhs >= self.rhs - self.tolerance
        raise ValueError(self.relation)

    def to_dict(self) -> dict:
        return {
            "surface": self.surface, "params": dict(sorted(self.params.items())),
            "role": self.role, self.kind: self.check, "identity": self.identity,
            "lhs": self.lhs, "rhs": self.rhs, "relation": self.relation,
            "terms": _plain(self.terms), "residual": self.residual,
            "tolerance": self.tolerance, "pass": self.passed,
            "warnings": list(self.warnings), "convention": dict(CONVENTION),
        }


GaussBonnetReport = Report
TheoremReport = Report


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in sorted(x.items())}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


# -- cached analysis of one surface -----------------------------------------------

class Analysis:
    """Grids, curves, regions and integrals of one surface, computed on demand."""

    def __init__(self, surface, grid=(256, 256), strict_beaks=False, refine_tol=1e-10, tol=None):
        self.surface = surface
        self.grid = tuple(grid)
        self.strict_beaks = strict_beaks
        self.refine_tol = refine_tol
        self.tol = tol
        self._cache = {}

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def name(self) -> str:
        return self.surface.name

    @property
    def params(self) -> dict:
        return dict(self.surface.params)

    @property
    def chi(self) -> int:
        return self.surface.domain.euler_characteristic

    def roles(self):
        return [Role.PHI] if self.surface.mode == "map" else [Role.PHI, Role.PSI]

    def tri_grid(self, role):
        role = Role.parse(role)
        return self._memo(("grid", role), lambda: build_grid(self.surface, role, self.grid, self.refine_tol))

    def curves(self, role):
        role = Role.parse(role)
        return self._memo(("curves", role), lambda: trace_singular_curves(
            self.surface, role, self.grid, self.refine_tol, tri_grid=self.tri_grid(role),
            strict_beaks=self.strict_beaks))

    def regions(self, role):
        role = Role.parse(role)
        return self._memo(("regions", role), lambda: decompose_regions(
            self.surface, role, tri_grid=self.tri_grid(role)))

    def singular_summary(self, role, require_generic=True):
        """Signed A3 counts of ``role``; refuses singular points other than A2/A3."""
        role = Role.parse(role)

        def run():
            s_plus = s_minus = 0
            other = []
            degenerate = 0
            for c in self.curves(role):
                if c.degenerate:
                    degenerate += 1
                for m in c.a3_markers:
                    if m.record.cls == "A3":
                        if m.sign > 0:
                            s_plus += 1
                        else:
                            s_minus += 1
                    else:
                        other.append(m.record.cls)
            warnings = []
            if degenerate:
                warnings.append(f"{degenerate} singular curve(s) of {role.value} have the null "
                                "direction tangent along the whole curve; they carry no A3 points")
            return {"S_plus": s_plus, "S_minus": s_minus, "other": other,
                    "n_curves": len(self.curves(role)), "degenerate_curves": degenerate,
                    "warnings": warnings}

        out = self._memo(("summary", role), run)
        if require_generic and out["other"]:
            raise UnsupportedSingularity(
                f"{role.value}: singular points of class {sorted(set(out['other']))} are outside "
                "the A2/A3 setting")
        return out

    def require_closed(self):
        if not self.surface.domain.closed:
            raise TopologyError(f"{self.name} has a non-closed domain; Gauss-Bonnet checks refuse it")

    def closed_curves(self, role):
        cs = self.curves(role)
        if any(not c.closed for c in cs):
            raise TopologyError("open singular curve on a closed domain")
        return cs

    def region_integral(self, role, label):
        role = Role.parse(role)
        return self._memo(("region", role, label), lambda: integrate_region(
            self.surface, role, label, decomposition=self.regions(role)))

    def signed_integral(self):
        return self._memo(("signed",), lambda: integrate_signed(self.surface))

    def curve_integral(self, role):
        role = Role.parse(role)

        def run():
            res = [integrate_singular_curve(c) for c in self.closed_curves(role)]
            return (math.fsum(r.value for r in res), math.fsum(r.error_estimate for r in res),
                    [r.value for r in res])
        return self._memo(("curve", role), run)

    # hypothesis sampling
    @cached_property
    def samples(self):
        dom = self.surface.domain
        n = 64
        us = dom.u_range[0] + dom.spans[0] * (np.arange(n) + 0.5) / n
        vs = dom.v_range[0] + dom.spans[1] * (np.arange(n) + 0.5) / n
        q = np.stack(np.meshgrid(us, vs, indexing="ij"), -1).reshape(-1, 2)
        return q, curvature_sample(self.surface, q)


def _need_front(an: Analysis):
    if an.surface.mode == "map":
        raise HypothesisError(f"{an.name} is a map; this check needs a front or an immersion")


def _need_euclidean(an: Analysis):
    if an.surface.c != 0.0 or an.surface.ambient.dim != 3:
        raise HypothesisError("this check needs a surface in a flat 3-space")


def _need_immersion(an: Analysis, role=Role.PHI):
    g = an.tri_grid(role)
    scale = float(np.median(np.abs(g.values)))
    if np.any(g.sign != g.sign[0]) or float(np.min(np.abs(g.values))) <= 1e-8 * scale:
        raise HypothesisError(f"{an.name}: the {Role.parse(role).value}-Jacobian vanishes "
                              "(not an immersion)")


def _need_regular(an: Analysis, role):
    role = Role.parse(role)
    g = an.tri_grid(role)
    if np.any(g.sign != g.sign[0]):
        raise HypothesisError(f"{an.name}: {role.value} has singular points")


def _log_kext(an: Analysis):
    _, s = an.samples
    k = s.K_ext[np.isfinite(s.K_ext)]
    if k.size == 0:
        raise HypothesisError("no regular samples")
    if np.any(k == 0):
        raise HypothesisError("log|K_ext| is unbounded (K_ext vanishes)")
    return k, float(np.max(np.abs(np.log(np.abs(k)))))


def _need_bounded_log_kext(an: Analysis, bound=50.0):
    k, m = _log_kext(an)
    if m >= bound:
        raise HypothesisError(f"log|K_ext| is not bounded: sampled max {m:.3g}")
    return k, m


# -- the four formulas ---------------------------------------------------------------

def gb_formula(an: Analysis, which: str) -> Report:
    """Check one of the formulas 1p, 1m, 2p, 2m."""
    if which not in FORMULAS:
        raise ValueError(f"unknown formula {which!r}")
    an.require_closed()
    role = Role.PSI if which.startswith("2") else Role.PHI
    if role == Role.PSI:
        _need_front(an)
    summ = an.singular_summary(role)
    an.closed_curves(role)
    dec = an.regions(role)
    plus = an.region_integral(role, 1)
    minus = an.region_integral(role, -1)
    suffix = "" if role == Role.PHI else "_sharp"
    terms = {
        f"int_K_dA_plus{suffix}": plus.value,
        f"int_K_dA_minus{suffix}": -minus.value,
        "region_error": plus.error_estimate + minus.error_estimate,
        f"chi_plus{suffix}": dec.chi_plus, f"chi_minus{suffix}": dec.chi_minus,
        f"S_plus{suffix}": summ["S_plus"], f"S_minus{suffix}": summ["S_minus"],
        "chi": an.chi,
    }
    if which.endswith("p"):
        signed = an.signed_integral()
        terms["int_K_dAhat"] = signed.value
        terms["signed_error"] = signed.error_estimate
        lhs = signed.value
        rhs = TWO_PI * (dec.chi_plus - dec.chi_minus + summ["S_plus"] - summ["S_minus"])
        terms["split_sum"] = plus.value + minus.value
        identity = "int K dAhat = 2 pi (chi(M+) - chi(M-) + S+ - S-)"
    else:
        kap, kerr, parts = an.curve_integral(role)
        terms[f"int_kappa{suffix}_dtau"] = kap
        terms["curve_error"] = kerr
        terms["curve_parts"] = parts
        lhs = plus.value - minus.value
        rhs = TWO_PI * an.chi - 2.0 * kap
        identity = "int K dA = 2 pi chi(M) - 2 int kappa dtau"
    if role == Role.PSI:
        identity = identity.replace("K", "K#").replace("kappa", "kappa#").replace("S", "S#").replace("M", "M#")
    return Report(an.name, an.params, role.value, "formula", which, identity, float(lhs), float(rhs),
                  terms, tolerance_for(lhs, an.tol or ATOL), warnings=list(summ["warnings"]))


# -- degree and rotation index ---------------------------------------------------------

def _golden_points(n, offset=0.37):
    k = np.arange(n) + offset
    z = 1.0 - 2.0 * k / n
    phi = k * math.pi * (3.0 - math.sqrt(5.0))
    r = np.sqrt(1 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], -1)


def _reduce_chart(surface, q):
    dom = surface.domain
    q = q.copy()
    if dom.pole_at_u_min:
        low = q[:, 0] < dom.u_range[0]
        q[low, 0] = 2 * dom.u_range[0] - q[low, 0]
        q[low, 1] += 0.5 * dom.spans[1]
    if dom.pole_at_u_max:
        high = q[:, 0] > dom.u_range[1]
        q[high, 0] = 2 * dom.u_range[1] - q[high, 0]
        q[high, 1] += 0.5 * dom.spans[1]
    u, v = dom.wrap(q[:, 0], q[:, 1])
    return np.stack([u, v], -1)


def mapping_degree(surface, y, seeds=(96, 96), radius=0.35, sigma_tol=1e-3):
    """Signed number of preimages of ``y`` for a map into the unit sphere.

    Plane targets are not closed and get degree 0.  Preimages come from
    Newton iterations started at every seed whose image lies within
    ``radius`` of ``y``; they are deduplicated at 1e-6.
    """
    m = surface.ambient
    if surface.mode != "map":
        raise HypothesisError("mapping_degree needs a map")
    if not m.is_map_target or m.dim == 2:
        return 0
    y = np.asarray(y, float)
    y = y / np.linalg.norm(y)
    dom = surface.domain
    nu, nv = seeds
    us = dom.u_range[0] + dom.spans[0] * (np.arange(nu) + 0.5) / nu
    vs = dom.v_range[0] + dom.spans[1] * (np.arange(nv) + 0.5) / nv
    q = np.stack(np.meshgrid(us, vs, indexing="ij"), -1).reshape(-1, 2)
    f = eval_jet(surface, q, order=1).f.p
    q = q[np.linalg.norm(f - y, axis=1) < radius]
    for _ in range(60):
        if len(q) == 0:
            break
        jet = eval_jet(surface, q, order=1, check_domain=False)
        f, fu, fv = jet.f.p, jet.f.p_u, jet.f.p_v
        r = y - f
        J = np.stack([fu, fv], -1)
        JTJ = np.einsum("nki,nkj->nij", J, J)
        JTr = np.einsum("nki,nk->ni", J, r)
        det = JTJ[:, 0, 0] * JTJ[:, 1, 1] - JTJ[:, 0, 1] ** 2
        ok = np.abs(det) > 1e-14
        step = np.zeros_like(q)
        step[ok, 0] = (JTJ[ok, 1, 1] * JTr[ok, 0] - JTJ[ok, 0, 1] * JTr[ok, 1]) / det[ok]
        step[ok, 1] = (JTJ[ok, 0, 0] * JTr[ok, 1] - JTJ[ok, 0, 1] * JTr[ok, 0]) / det[ok]
        n = np.linalg.norm(step, axis=1)
        step *= np.minimum(1.0, 0.5 / np.maximum(n, 1e-300))[:, None]
        q = _reduce_chart(surface, q + step)
        q = q[ok]
    f = eval_jet(surface, q, order=1, check_domain=False).f.p if len(q) else np.zeros((0, 3))
    q = q[np.linalg.norm(f - y, axis=1) < 1e-10] if len(q) else q
    roots = []
    for p in q:
        if not any(_chart_distance(surface, p, r) < 1e-6 for r in roots):
            roots.append(p)
    deg = 0
    for p in roots:
        lam, grad = lambda_and_gradient(surface, p[None], Role.PHI)
        dist = abs(lam[0]) / max(np.linalg.norm(grad[0]), 1e-300)
        if dist < sigma_tol:
            raise RegularValueError(f"a preimage of {tuple(y)} lies within {dist:.2g} of the singular set")
        deg += 1 if normalized_jacobian(surface, p[None], Role.PHI)[0] > 0 else -1
    return deg


def _chart_distance(surface, a, b):
    dom = surface.domain
    d = np.abs(a - b)
    for k, per in enumerate((dom.u_periodic, dom.v_periodic)):
        if per:
            d[k] = min(d[k], dom.spans[k] - d[k])
    return float(np.hypot(*d))


def rotation_index(points=None, angles=None, snap=0.05) -> float:
    """Rotation index of a closed curve as a front, in half-integers.

    The tangent line angle (defined mod pi) is unwrapped around the curve;
    either sampled ``points`` or explicit line ``angles`` may be given.  The
    traversal direction is taken as given.
    """
    if angles is None:
        p = np.asarray(points, float)
        d = np.roll(p, -1, axis=0) - p
        keep = np.linalg.norm(d, axis=1) > 0
        angles = np.arctan2(d[keep, 1], d[keep, 0])
    a = np.asarray(angles, float)
    steps = np.diff(np.concatenate([a, a[:1]]))
    steps = (steps + math.pi / 2) % math.pi - math.pi / 2
    total = float(np.sum(steps)) / TWO_PI
    snapped = round(total * 2) / 2
    if abs(total - snapped) > snap:
        raise SamplingError(f"rotation index {total:.4f} is not within {snap} of a half-integer")
    return snapped


def image_line_angles(curve):
    """Angles of the image tangent lines of a plane map along a traced curve."""
    from .bundle import null_direction_field

    surface = curve.surface
    q = curve.q
    jet = eval_jet(surface, q)
    eta, _, _ = null_direction_field(surface, q, Role.PHI, jet=jet)
    xi = np.stack([-eta[:, 1], eta[:, 0]], -1)
    xu, xv = hom_images(surface, jet, Role.PHI)
    x = xi[:, :1] * xu + xi[:, 1:] * xv
    return np.arctan2(x[:, 1], x[:, 0])


def _image_on_left(curve, eps=1e-3) -> bool:
    """Whether the image of a plane map lies left of the traced image curve."""
    surface = curve.surface
    ev = curve.evaluate(curve.t)
    speed = ev["speed"]
    picks = np.argsort(-speed)[: max(5, len(speed) // 10)]
    votes = 0
    for k in picks:
        q = ev["q"][k]
        tang = ev["tangent"][k]
        n = np.array([-tang[1], tang[0]])
        pts = np.array([q, q + eps * n, q - eps * n])
        f = eval_jet(surface, pts, check_domain=False).f.p
        jet = eval_jet(surface, q[None]).f
        T = (jet.p_u[0] * tang[0] + jet.p_v[0] * tang[1]) * np.sign(ev["ds"][k])
        N = np.array([-T[1], T[0]])
        side = np.dot(f[1] + f[2] - 2 * f[0], N)
        votes += 1 if side > 0 else -1
    return votes > 0


def curve_rotation_index(curve) -> float:
    r = rotation_index(angles=image_line_angles(curve))
    return r if _image_on_left(curve) else -r


# -- theorem checks -----------------------------------------------------------------------

def _report(an, role, check, identity, lhs, rhs, terms, tol=0.0, relation="==", warnings=()):
    return Report(an.name, an.params, Role.parse(role).value, "theorem", check, identity,
                  float(lhs), float(rhs), terms, float(tol), relation, list(warnings))


def theorem_a(an: Analysis) -> Report:
    _need_front(an)
    an.require_closed()
    _need_immersion(an)
    summ = an.singular_summary(Role.PSI)
    an.closed_curves(Role.PSI)
    dec = an.regions(Role.PSI)
    _, s = an.samples
    neg = s.K_ext < 0
    lam_s = normalized_jacobian(an.surface, an.samples[0], Role.PSI) < 0
    agree = float(np.mean(neg == lam_s))
    return _report(an, Role.PSI, "a", "2 chi(M#-) = S#+ - S#-", 2 * dec.chi_minus,
                   summ["S_plus"] - summ["S_minus"],
                   {"chi_minus_sharp": dec.chi_minus, "chi_plus_sharp": dec.chi_plus,
                    "S_plus_sharp": summ["S_plus"], "S_minus_sharp": summ["S_minus"],
                    "M_minus_sharp_equals_K_ext_negative": agree},
                   warnings=summ["warnings"])


def _need_parallel_of_convex(an: Analysis):
    _need_front(an)
    _need_euclidean(an)
    an.require_closed()
    _need_regular(an, Role.PSI)


def theorem_b(an: Analysis) -> Report:
    _need_parallel_of_convex(an)
    summ = an.singular_summary(Role.PHI)
    an.closed_curves(Role.PHI)
    dec = an.regions(Role.PHI)
    return _report(an, Role.PHI, "b", "2 chi(M-) = S+ - S-", 2 * dec.chi_minus,
                   summ["S_plus"] - summ["S_minus"],
                   {"chi_minus": dec.chi_minus, "chi_plus": dec.chi_plus,
                    "S_plus": summ["S_plus"], "S_minus": summ["S_minus"]},
                   warnings=summ["warnings"])


def theorem_c(an: Analysis) -> Report:
    _need_front(an)
    _need_euclidean(an)
    an.require_closed()
    _need_immersion(an)
    summ = an.singular_summary(Role.PSI)
    kap, kerr, _ = an.curve_integral(Role.PSI)
    region = an.region_integral(Role.PSI, -1)

    def kminus(q):
        s = curvature_sample(an.surface, q)
        return np.minimum(s.K, 0.0)

    direct = integrate_signed(an.surface, Role.PHI, weight=kminus, tol=1e-7)
    beta1 = 2 - an.chi
    lhs = kap
    rhs = direct.value
    tol = max(1e-2 * abs(rhs), kerr + direct.error_estimate, ATOL * 0.1)
    return _report(an, Role.PSI, "c", "int kappa# dtau# = int_{M#-} K dAhat = int K^- dA", lhs, rhs,
                   {"int_kappa_sharp_dtau_sharp": kap, "int_M_minus_sharp_K_dAhat": region.value,
                    "int_K_minus_dA": direct.value, "curve_error": kerr,
                    "quadrature_error": direct.error_estimate,
                    "chern_lashof": {"-int_kappa_sharp": -kap, "2_pi_beta1": TWO_PI * beta1,
                                     "holds": -kap >= TWO_PI * beta1 - 1e-6}},
                   tol=tol, warnings=summ["warnings"])


def theorem_d(an: Analysis) -> Report:
    _need_parallel_of_convex(an)
    summ = an.singular_summary(Role.PHI)
    kap, kerr, _ = an.curve_integral(Role.PHI)
    region = an.region_integral(Role.PHI, -1)
    tol = max(1e-2 * abs(region.value), kerr + region.error_estimate)
    return _report(an, Role.PHI, "d", "int kappa dtau = int_{M-} K# dAhat#", kap, region.value,
                   {"int_kappa_dtau": kap, "int_M_minus_K_sharp_dAhat_sharp": region.value,
                    "curve_error": kerr, "region_error": region.error_estimate},
                   tol=tol, warnings=summ["warnings"])


def theorem_e(an: Analysis) -> Report:
    _need_front(an)
    an.require_closed()
    k, _ = _need_bounded_log_kext(an)
    if not (np.all(k > 0) or np.all(k < 0)):
        raise HypothesisError("K_ext changes sign")
    eps = 1 if np.all(k > 0) else -1
    a = an.singular_summary(Role.PHI)
    b = an.singular_summary(Role.PSI)
    for summ, role in ((a, Role.PHI), (b, Role.PSI)):
        if summ["degenerate_curves"]:
            raise HypothesisError(f"{role.value}: singular set is not made of A2/A3 points")
    lhs = a["S_plus"] - a["S_minus"]
    rhs = eps * (b["S_plus"] - b["S_minus"])
    return _report(an, Role.PHI, "e", "S+ - S- = sgn(K_ext) (S#+ - S#-)", lhs, rhs,
                   {"S_plus": a["S_plus"], "S_minus": a["S_minus"], "S_plus_sharp": b["S_plus"],
                    "S_minus_sharp": b["S_minus"], "sgn_K_ext": eps})


def theorem_g(an: Analysis) -> Report:
    _need_front(an)
    an.require_closed()
    k, m = _need_bounded_log_kext(an)
    if not np.all(k < 0):
        raise HypothesisError("K_ext is not negative everywhere")
    return _report(an, Role.PHI, "g", "chi(M) = 0", an.chi, 0,
                   {"chi": an.chi, "max_K_ext": float(k.max()), "max_abs_log_K_ext": m,
                    "topology": an.surface.domain.topology})


def _need_map(an: Analysis):
    if an.surface.mode != "map":
        raise HypothesisError(f"{an.name} is not a map between surfaces")


def quine_check(an: Analysis, values=None) -> Report:
    _need_map(an)
    an.require_closed()
    m = an.surface.ambient
    if m.dim == 2:
        raise HypothesisError("Quine's formula needs a closed target; use levine for plane maps")
    summ = an.singular_summary(Role.PHI)
    an.closed_curves(Role.PHI)
    dec = an.regions(Role.PHI)
    degs = []
    candidates = list(values) if values is not None else list(_golden_points(16))
    for y in candidates:
        try:
            degs.append(mapping_degree(an.surface, y))
        except RegularValueError:
            continue
        if len(degs) == 3:
            break
    if len(degs) < 3:
        raise RegularValueError("could not find three regular values")
    if len(set(degs)) != 1:
        raise InconsistencyError(f"degree differs across regular values: {degs}")
    chi_n = 2
    lhs = degs[0] * chi_n
    rhs = dec.chi_plus - dec.chi_minus + summ["S_plus"] - summ["S_minus"]
    return _report(an, Role.PHI, "quine", "deg(f) chi(N) = chi(M+) - chi(M-) + S+ - S-", lhs, rhs,
                   {"degree": degs[0], "degrees": degs, "chi_target": chi_n, "chi_plus": dec.chi_plus,
                    "chi_minus": dec.chi_minus, "S_plus": summ["S_plus"], "S_minus": summ["S_minus"]},
                   warnings=summ["warnings"])


def prop_id_check(an: Analysis) -> Report:
    _need_map(an)
    an.require_closed()
    summ = an.singular_summary(Role.PHI)
    plus = an.region_integral(Role.PHI, 1)
    minus = an.region_integral(Role.PHI, -1)
    kap, kerr, _ = an.curve_integral(Role.PHI)
    area_term = plus.value - minus.value
    lhs = TWO_PI * an.chi
    rhs = area_term + 2 * kap
    tol = max(1e-2 * 2 * TWO_PI, 2 * kerr + plus.error_estimate + minus.error_estimate)
    return _report(an, Role.PHI, "id", "2 pi chi(M) = int (K o f) |f* dA| + 2 int kappa dtau", lhs, rhs,
                   {"int_K_target_abs_pullback": area_term, "int_kappa_dtau": kap, "chi": an.chi},
                   tol=tol, warnings=summ["warnings"])


def levine_check(an: Analysis) -> Report:
    _need_map(an)
    an.require_closed()
    if an.surface.ambient.dim != 2:
        raise HypothesisError("Levine's formula is for maps into the plane")
    summ = an.singular_summary(Role.PHI)
    curves = an.closed_curves(Role.PHI)
    idx = [curve_rotation_index(c) for c in curves]
    return _report(an, Role.PHI, "levine", "chi(M)/2 = sum I(C_j)", an.chi / 2, sum(idx),
                   {"rotation_indices": idx, "cusps": [len(c.a3_markers) for c in curves]},
                   tol=1e-9, warnings=summ["warnings"])


def _a2_kappa(an: Analysis, role):
    """Signs of the singular curvature along ``role`` curves.

    Returns ``(density, kappa)``: the density ``kappa |X(gamma')|`` per unit
    domain arc length, which has the sign of kappa and stays finite where
    ``X(gamma')`` vanishes, and the finite kappa samples.
    """
    curves = an.curves(role)
    if not curves:
        raise HypothesisError(f"{Role.parse(role).value} has no singular points")
    dens = np.concatenate([c.density / np.abs(c.evaluate(c.t)["ds"]) for c in curves])
    kap = np.concatenate([c.kappa[np.isfinite(c.kappa)] for c in curves])
    return dens, kap


def _sign_terms(dens, kap):
    return {"max_density": float(dens.max()), "min_density": float(dens.min()),
            "max_kappa": float(kap.max()) if kap.size else None,
            "min_kappa": float(kap.min()) if kap.size else None,
            "finite_kappa_samples": int(kap.size), "samples": int(dens.size)}


def _sign_warnings(an, role, kap):
    w = list(an.singular_summary(role)["warnings"])
    if kap.size == 0:
        w.append("kappa is infinite along the whole singular set; its sign is read from kappa dtau")
    return w


def theorem_add(an: Analysis) -> Report:
    _need_front(an)
    _need_euclidean(an)
    _, s = an.samples
    K = s.K[np.isfinite(s.K)]
    if not np.all(K > 0):
        raise HypothesisError("K is not positive on the regular set")
    if np.max(np.abs(np.log(K))) >= 50:
        raise HypothesisError("log|K| is not bounded")
    dens, kap = _a2_kappa(an, Role.PSI)
    return _report(an, Role.PSI, "add", "kappa# < 0 at every Gauss-map A2 sample", float(dens.max()), 0.0,
                   _sign_terms(dens, kap), relation="<", warnings=_sign_warnings(an, Role.PSI, kap))


def corollary_c1(an: Analysis) -> Report:
    _need_front(an)
    _need_euclidean(an)
    _need_immersion(an)
    _, s = an.samples
    if not np.any(s.K < 0):
        raise HypothesisError("K is nowhere negative")
    dens, kap = _a2_kappa(an, Role.PSI)
    return _report(an, Role.PSI, "c1", "kappa# < 0 somewhere on the fold set", float(dens.min()), 0.0,
                   _sign_terms(dens, kap), relation="<", warnings=_sign_warnings(an, Role.PSI, kap))


def corollary_d1(an: Analysis) -> Report:
    _need_parallel_of_convex(an)
    _, s = an.samples
    if not np.any(s.K < 0):
        raise HypothesisError("K is nowhere negative")
    dens, kap = _a2_kappa(an, Role.PHI)
    return _report(an, Role.PHI, "d1", "kappa < 0 somewhere on the cuspidal edges", float(dens.min()), 0.0,
                   _sign_terms(dens, kap), relation="<", warnings=_sign_warnings(an, Role.PHI, kap))


def infty_property(curve, marker, d=0.1, halvings=5):
    """Approach an A3 marker from both sides at distances ``d / 2**k``."""
    out = []
    L = curve.period
    for side in (-1.0, 1.0):
        t = marker.t + side * d / 2.0 ** np.arange(halvings + 1)
        if curve.closed:
            t = t % L
        elif t.min() < 0 or t.max() > L:
            continue
        ev = curve.evaluate(t)
        kappa = ev["kappa"]
        dens = np.abs(ev["density"] / ev["ds"])
        ratio = kappa[1:] / kappa[:-1]
        spread = float((dens.max() - dens.min()) / dens.max())
        ok = bool(np.all(kappa < 0) and np.all(np.diff(kappa) < 0) and np.all(ratio >= 1.5)
                  and spread < 0.1)
        out.append({"side": int(side), "kappa": kappa.tolist(), "growth": ratio.tolist(),
                    "density_spread": spread, "pass": ok})
    return out


def theorem_infty(an: Analysis, role=Role.PHI, d=0.1) -> Report:
    role = Role.parse(role)
    an.singular_summary(role)
    checks = []
    for i, c in enumerate(an.curves(role)):
        for m in c.a3_markers:
            for r in infty_property(c, m, d):
                r.update({"curve": i, "t": m.t})
                checks.append(r)
    if not checks:
        raise HypothesisError("no A3 points to approach")
    passed = sum(1 for r in checks if r["pass"])
    return _report(an, role, "infty", "kappa -> -infinity at every A3 point (one-sided approaches)",
                   passed, len(checks), {"approaches": checks})


THEOREM_FUNCS = {
    "a": theorem_a, "b": theorem_b, "c": theorem_c, "d": theorem_d, "e": theorem_e, "g": theorem_g,
    "quine": quine_check, "id": prop_id_check, "levine": levine_check, "add": theorem_add,
    "infty": theorem_infty, "c1": corollary_c1, "d1": corollary_d1,
}


def verify_theorem(an: Analysis, theorem_id: str) -> Report:
    try:
        fn = THEOREM_FUNCS[theorem_id]
    except KeyError:
        raise ValueError(f"unknown theorem {theorem_id!r}; choose from {', '.join(THEOREMS)}") from None
    return fn(an)


def applicable_checks(an: Analysis):
    """Formula and theorem ids whose hypotheses hold for this surface (for ``--target all``)."""
    out = []
    closed = an.surface.domain.closed
    if not closed:
        return out
    for role in an.roles():
        try:
            an.singular_summary(role)
        except (HypothesisError, TopologyError):
            continue
        names = ("1p", "1m") if role == Role.PHI else ("2p", "2m")
        out.extend(("formula", n) for n in names)
    for t in THEOREMS:
        try:
            _precheck(an, t)
        except (HypothesisError, TopologyError):
            continue
        out.append(("theorem", t))
    return out


def _precheck(an: Analysis, t: str):
    """Cheap hypothesis screening used to select checks for ``all``."""
    s = an.surface
    if t in ("quine", "id", "levine"):
        _need_map(an)
        if t == "quine" and s.ambient.dim == 2:
            raise HypothesisError("plane target")
        if t == "levine" and s.ambient.dim != 2:
            raise HypothesisError("closed target")
        return
    _need_front(an)
    if t == "a":
        _need_immersion(an)
    elif t in ("b", "d"):
        _need_parallel_of_convex(an)
        an.singular_summary(Role.PHI)
        if t == "d" and not an.curves(Role.PHI):
            raise HypothesisError("no singular points")
    elif t == "d1":
        _need_parallel_of_convex(an)
        if not np.any(an.samples[1].K < 0):
            raise HypothesisError("K is nowhere negative")
    elif t in ("c", "c1"):
        _need_euclidean(an)
        _need_immersion(an)
        if not an.curves(Role.PSI):
            raise HypothesisError("the Gauss map has no singular points")
        if t == "c1":
            if not np.any(an.samples[1].K < 0):
                raise HypothesisError("K is nowhere negative")
            _a2_kappa(an, Role.PSI)
    elif t == "e":
        k, _ = _need_bounded_log_kext(an)
        if not (np.all(k > 0) or np.all(k < 0)):
            raise HypothesisError("K_ext changes sign")
        for role in (Role.PHI, Role.PSI):
            if an.singular_summary(role)["degenerate_curves"]:
                raise HypothesisError("degenerate singular curves")
    elif t == "g":
        k, _ = _need_bounded_log_kext(an)
        if not np.all(k < 0):
            raise HypothesisError("K_ext is not negative")
    elif t == "add":
        _need_euclidean(an)
        K = an.samples[1].K
        if not np.all(K[np.isfinite(K)] > 0):
            raise HypothesisError("needs K > 0")
        _a2_kappa(an, Role.PSI)
    elif t == "infty":
        if not any(c.a3_markers for c in an.curves(Role.PHI)):
            raise HypothesisError("no A3 points")
