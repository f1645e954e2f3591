"""Pure-Python versions of the grid kernels (same signatures as ``_kernels``)."""
from __future__ import annotations

import numpy as np


def crossing_segments(tri, sign):
    """Oriented zero-crossing segments of a sign field on CCW triangles.

    Returns ``(seg_tri, start, end)``: the triangle index of every mixed
    triangle and the vertex pairs of the edges where the segment starts and
    ends.  Walking from start to end keeps the positive vertices on the left.
    """
    tri = np.asarray(tri, np.int64)
    s = np.asarray(sign, np.int8)[tri]
    npos = (s > 0).sum(axis=1)
    mixed = np.flatnonzero((npos == 1) | (npos == 2))
    start = np.empty((len(mixed), 2), np.int64)
    end = np.empty((len(mixed), 2), np.int64)
    for k, t in enumerate(mixed):
        a, b, c = tri[t]
        sa, sb, sc = s[t]
        lone_pos = npos[t] == 1
        # rotate so that the lone vertex comes first
        if lone_pos:
            r = 0 if sa > 0 else (1 if sb > 0 else 2)
        else:
            r = 0 if sa < 0 else (1 if sb < 0 else 2)
        v = (a, b, c)[r:] + (a, b, c)[:r]
        if lone_pos:
            start[k] = (v[0], v[1])
            end[k] = (v[2], v[0])
        else:
            start[k] = (v[2], v[0])
            end[k] = (v[0], v[1])
    return mixed, start, end


def edge_keys(pairs, nvert):
    pairs = np.asarray(pairs, np.int64)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    return lo * nvert + hi


def link_segments(start_key, end_key):
    """Chain segments whose end edge is the start edge of another.

    Returns ``(order, offsets, closed)``: segment indices chain by chain,
    CSR-style offsets into ``order``, and a closed flag per chain.
    """
    start_key = np.asarray(start_key, np.int64)
    end_key = np.asarray(end_key, np.int64)
    n = len(start_key)
    succ = {int(k): i for i, k in enumerate(start_key)}
    pred = {int(k): i for i, k in enumerate(end_key)}
    used = np.zeros(n, bool)
    order, offsets, closed = [], [0], []
    # open chains first, starting at segments without a predecessor
    heads = [i for i in range(n) if int(start_key[i]) not in pred]
    for h in heads + list(range(n)):
        if used[h]:
            continue
        i = h
        is_closed = False
        while True:
            used[i] = True
            order.append(i)
            j = succ.get(int(end_key[i]))
            if j is None:
                break
            if used[j]:
                is_closed = j == h
                break
            i = j
        offsets.append(len(order))
        closed.append(is_closed)
    return np.array(order, np.int64), np.array(offsets, np.int64), np.array(closed, bool)


def subcomplex_euler(tri, edges, sign, target):
    """V - E + T of the full subcomplex spanned by vertices with ``sign == target``."""
    sign = np.asarray(sign, np.int8)
    on = sign == target
    V = int(on.sum())
    E = int(np.all(on[np.asarray(edges, np.int64)], axis=1).sum())
    T = int(np.all(on[np.asarray(tri, np.int64)], axis=1).sum())
    return V - E + T
