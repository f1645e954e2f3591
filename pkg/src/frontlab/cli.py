"""``frontlab`` command line: list, analyze, verify and export."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import catalog
from .bundle import ModeError, Role, curvature_sample
from .gauss_bonnet import (FORMULAS, THEOREMS, Analysis, HypothesisError, InconsistencyError,
                           RegularValueError, SamplingError, applicable_checks, gb_formula,
                           verify_theorem)
from .geometry import DomainError
from .grid import GridError, PoleError
from .regions import AccuracyError, TopologyError
from .singular import RankError, StencilError, UnclassifiedError, integrate_singular_curve

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_ACCURACY, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(ValueError):
    pass


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, (HypothesisError, TopologyError, PoleError, ModeError, RankError,
                        UnclassifiedError)):
        return EXIT_HYPOTHESIS
    if isinstance(exc, (AccuracyError, GridError, StencilError, RegularValueError,
                        InconsistencyError, SamplingError)):
        return EXIT_ACCURACY
    if isinstance(exc, (UsageError, catalog.CatalogError, DomainError)):
        return EXIT_USAGE
    return EXIT_ACCURACY


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    low = text.lower()
    if low in ("pi", "2pi"):
        return math.pi * (2 if low == "2pi" else 1)
    raise UsageError(f"parameter value {text!r} is not a number")


def _params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects k=v, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _parse_value(v.strip())
    return out


def _grid(text: str):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise UsageError(f"--grid expects NxM, got {text!r}") from None


def _surface(args):
    if not args.surface:
        raise UsageError("--surface is required")
    return catalog.build(args.surface, **_params(args.param))


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- list ----------------------------------------------------------------------------

def cmd_list(args) -> int:
    rows = catalog.listing()
    if args.json:
        _emit(dumps(rows), args.out)
        return EXIT_OK
    buf = io.StringIO()
    buf.write(f"{'name':26s} {'mode':10s} {'ambient':14s} {'domain':9s} description\n")
    for r in rows:
        buf.write(f"{r['name']:26s} {r['mode']:10s} {r['ambient']:14s} {r['topology']:9s} {r['doc']}\n")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# -- analyze -------------------------------------------------------------------------

def analyze(surface, role, grid, strict_beaks=False) -> dict:
    an = Analysis(surface, grid, strict_beaks=strict_beaks)
    role = Role.parse(role)
    curves = an.curves(role)
    dec = an.regions(role)
    report_curves = []
    points = []
    for i, c in enumerate(curves):
        finite = c.kappa[np.isfinite(c.kappa)]
        integral = integrate_singular_curve(c)
        report_curves.append({
            "id": i, "closed": c.closed, "degenerate": c.degenerate, "length": c.period,
            "samples": len(c.t),
            "kappa": {"min": float(finite.min()) if finite.size else None,
                      "max": float(finite.max()) if finite.size else None,
                      "integral": integral.value, "integral_error": integral.error_estimate},
            "a3_points": len(c.a3_markers),
        })
        for m in c.a3_markers:
            points.append({"curve": i, "t": m.t, "u": m.q[0], "v": m.q[1], "class": m.record.cls,
                           "sign": m.sign, "lambda2": m.record.l2})
    s_plus = sum(1 for p in points if p["class"] == "A3" and p["sign"] > 0)
    s_minus = sum(1 for p in points if p["class"] == "A3" and p["sign"] < 0)
    return {
        "surface": surface.name, "params": dict(sorted(surface.params.items())), "role": role.value,
        "grid": list(grid), "curves": report_curves, "singular_points": points,
        "S_plus": s_plus, "S_minus": s_minus, "chi_plus": dec.chi_plus, "chi_minus": dec.chi_minus,
    }


def _analysis_text(rep: dict) -> str:
    lines = [f"surface {rep['surface']} {rep['params']}  role {rep['role']}  grid {rep['grid'][0]}x{rep['grid'][1]}",
             f"singular curves: {len(rep['curves'])}   A3 points: {len(rep['singular_points'])} "
             f"(S+ = {rep['S_plus']}, S- = {rep['S_minus']})   chi(M+) = {rep['chi_plus']}, chi(M-) = {rep['chi_minus']}"]
    for c in rep["curves"]:
        k = c["kappa"]
        rng = "kappa undefined" if k["min"] is None else f"kappa in [{k['min']:.6g}, {k['max']:.6g}]"
        lines.append(f"  curve {c['id']}: {'closed' if c['closed'] else 'open'}"
                     f"{' degenerate' if c['degenerate'] else ''}, length {c['length']:.6g}, {rng}, "
                     f"int kappa dtau = {k['integral']:.9g}, {c['a3_points']} A3")
    for p in rep["singular_points"]:
        lines.append(f"  {p['class']} at (u, v) = ({p['u']:.10g}, {p['v']:.10g}) sign {p['sign']:+d}"
                     if p["sign"] is not None else
                     f"  {p['class']} at (u, v) = ({p['u']:.10g}, {p['v']:.10g})")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    surface = _surface(args)
    rep = analyze(surface, args.role, _grid(args.grid), args.strict_beaks)
    _emit(dumps(rep) if args.json else _analysis_text(rep), args.out)
    return EXIT_OK


# -- verify -----------------------------------------------------------------------------

def run_checks(surface, target, grid, tol=None, strict_beaks=False):
    an = Analysis(surface, grid, strict_beaks=strict_beaks, tol=tol)
    if target == "all":
        todo = applicable_checks(an)
        if not todo:
            raise HypothesisError(f"no check applies to {surface.name}")
    elif target in FORMULAS:
        todo = [("formula", target)]
    elif target in THEOREMS:
        todo = [("theorem", target)]
    else:
        raise UsageError(f"unknown target {target!r}; use all, {', '.join(FORMULAS + THEOREMS)}")
    reports = []
    for kind, name in todo:
        r = gb_formula(an, name) if kind == "formula" else verify_theorem(an, name)
        reports.append(r)
    return reports


def cmd_verify(args) -> int:
    surface = _surface(args)
    reports = run_checks(surface, args.target, _grid(args.grid), args.tol, args.strict_beaks)
    ok = all(r.passed for r in reports)
    if args.json:
        text = dumps({"surface": surface.name, "params": dict(sorted(surface.params.items())),
                      "target": args.target, "pass": ok, "reports": [r.to_dict() for r in reports]})
    else:
        lines = []
        for r in reports:
            lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.kind} {r.check:6s} [{r.role}]  "
                         f"{r.identity}:  lhs = {r.lhs:.10g}  rhs = {r.rhs:.10g}  "
                         f"residual = {r.residual:.3g} (tol {r.tolerance:.3g})")
            lines.extend(f"      note: {w}" for w in r.warnings)
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_ACCURACY


# -- export -----------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return repr(x) if math.isfinite(x) else "nan"


def curves_csv(curves) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["curve_id", "t", "u", "v", "lambda_prime", "kappa", "density", "speed", "class"])
    for i, c in enumerate(curves):
        cls = "degenerate-unclassified" if c.degenerate else "A2"
        rows = [(float(t), q, lp, k, d, s, cls) for t, q, lp, k, d, s in
                zip(c.t, c.q, c.lambda_prime, c.kappa, c.density, c.speed)]
        for m in c.a3_markers:
            ev = c.evaluate(np.array([m.t]))
            rows.append((m.t, ev["q"][0], 0.0, math.nan, ev["density"][0], ev["speed"][0], m.record.cls))
        rows.sort(key=lambda r: r[0])
        for t, q, lp, k, d, s, cl in rows:
            u, v = c.surface.domain.wrap(q[0], q[1])
            w.writerow([i, _fmt(t), _fmt(u), _fmt(v), _fmt(lp), _fmt(k), _fmt(d), _fmt(s), cl])
    return buf.getvalue()


def fields_csv(surface, grid) -> str:
    dom = surface.domain
    nu, nv = grid
    us = dom.u_range[0] + dom.spans[0] * (np.arange(nu) + 0.5) / nu
    vs = dom.v_range[0] + dom.spans[1] * (np.arange(nv) + 0.5) / nv
    q = np.stack(np.meshgrid(us, vs, indexing="ij"), -1).reshape(-1, 2)
    s = curvature_sample(surface, q)
    nan = np.full(len(q), math.nan)
    lam_s = s.lam_sharp if s.lam_sharp is not None else nan
    kext = s.K_ext if s.K_ext is not None else nan
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u", "v", "lambda", "lambda_sharp", "K", "K_ext"])
    for row in zip(q[:, 0], q[:, 1], s.lam, lam_s, s.K, kext):
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def cmd_export(args) -> int:
    surface = _surface(args)
    grid = _grid(args.grid)
    if args.what == "curves":
        an = Analysis(surface, grid, strict_beaks=args.strict_beaks)
        text = curves_csv(an.curves(args.role))
    elif args.what == "fields":
        text = fields_csv(surface, grid)
    else:
        an = Analysis(surface, grid)
        text = dumps(an.regions(args.role).to_dict())
    _emit(text, args.out)
    return EXIT_OK


# -- entry point ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="frontlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, role=True):
        sp.add_argument("--surface", help="catalog entry (see `frontlab list`)")
        sp.add_argument("--param", action="append", metavar="K=V", help="surface parameter, repeatable")
        if role:
            sp.add_argument("--role", default="phi", choices=["phi", "psi"],
                            help="phi: the surface itself, psi: its normal map")
        sp.add_argument("--grid", default="256x256", help="sampling grid NxM (default 256x256)")
        sp.add_argument("--strict-beaks", action="store_true",
                        help="classify beaks only with a negative definite Jacobian Hessian")
        sp.add_argument("--out", help="write output to this path")

    sp = sub.add_parser("list", help="list catalog surfaces")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_list)

    sp = sub.add_parser("analyze", help="singular curves, singular points and regions")
    common(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("verify", help="check Gauss-Bonnet formulas and theorems")
    common(sp, role=False)
    sp.add_argument("--target", default="all", help="formula (1p 1m 2p 2m), theorem id, or all")
    sp.add_argument("--tol", type=float, default=None, help="absolute tolerance for the formulas")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("export", help="write curves or fields as CSV, regions as JSON")
    common(sp)
    sp.add_argument("what", choices=["curves", "fields", "regions"])
    sp.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except Exception as exc:  # every failure becomes a JSON error and an exit code
        code = _exit_code(exc)
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}))
        return code


if __name__ == "__main__":
    sys.exit(main())
