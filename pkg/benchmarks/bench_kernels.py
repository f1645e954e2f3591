"""Compiled versus pure-Python grid kernels.

    python3 benchmarks/bench_kernels.py [--grid 256] [--repeat 5]

Times each kernel on the triangulated grid of the ellipsoid parallel front,
then the full ``trace_singular_curves`` call with ``FRONTLAB_PURE`` unset
and set (in subprocesses, since the backend is chosen at import).
"""
import argparse
import os
import subprocess
import sys
import timeit

from frontlab import _kernels_py, catalog
from frontlab.grid import build_grid

try:
    from frontlab import _kernels
except ImportError:
    _kernels = None

TRACE = ("from frontlab import catalog, kernels; from frontlab.singular import trace_singular_curves; "
         "import time; s = catalog.build('ellipsoid_parallel', t=5.5); t = time.perf_counter(); "
         "trace_singular_curves(s, grid=({n}, {n})); print(kernels.BACKEND, time.perf_counter() - t)")


def bench(mod, g, repeat):
    tri, edges, sign, nv = g.tri, g.edges, g.sign, g.nvert
    seg, start, end = mod.crossing_segments(tri, sign)
    ks, ke = mod.edge_keys(start, nv), mod.edge_keys(end, nv)
    cases = {
        "crossing_segments": lambda: mod.crossing_segments(tri, sign),
        "edge_keys": lambda: mod.edge_keys(start, nv),
        "link_segments": lambda: mod.link_segments(ks, ke),
        "subcomplex_euler": lambda: mod.subcomplex_euler(tri, edges, sign, 1),
    }
    return {k: min(timeit.repeat(f, number=1, repeat=repeat)) for k, f in cases.items()}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    g = build_grid(catalog.build("ellipsoid_parallel", t=5.5), grid=(args.grid, args.grid))
    print(f"grid {args.grid}x{args.grid}: {g.nvert} vertices, {len(g.tri)} triangles")
    py = bench(_kernels_py, g, args.repeat)
    cy = bench(_kernels, g, args.repeat) if _kernels is not None else None
    print(f"{'kernel':20s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s}")
    for k, t in py.items():
        if cy is None:
            print(f"{k:20s} {1e3 * t:12.2f} {'n/a':>14s}")
        else:
            print(f"{k:20s} {1e3 * t:12.2f} {1e3 * cy[k]:14.2f} {t / cy[k]:8.1f}x")
    for pure in ("0", "1"):
        env = dict(os.environ, FRONTLAB_PURE=pure)
        out = subprocess.run([sys.executable, "-c", TRACE.format(n=args.grid)], env=env,
                             capture_output=True, text=True, check=True).stdout.split()
        print(f"trace_singular_curves [{out[0]}]: {float(out[1]):.3f} s")


if __name__ == "__main__":
    main()
