# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels; see ``_kernels_py`` for the reference versions."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def crossing_segments(tri, sign):
    cdef const cnp.int64_t[:, :] t = np.ascontiguousarray(tri, dtype=np.int64)
    cdef const cnp.int8_t[:] s = np.ascontiguousarray(sign, dtype=np.int8)
    cdef Py_ssize_t n = t.shape[0], k, m = 0
    cdef cnp.int64_t v0, v1, v2, tmp
    cdef int npos, lone_pos
    cdef cnp.int8_t s0, s1, s2
    mixed_arr = np.empty(n, np.int64)
    start_arr = np.empty((n, 2), np.int64)
    end_arr = np.empty((n, 2), np.int64)
    cdef cnp.int64_t[:] mixed = mixed_arr
    cdef cnp.int64_t[:, :] start = start_arr
    cdef cnp.int64_t[:, :] end = end_arr
    for k in range(n):
        v0 = t[k, 0]
        v1 = t[k, 1]
        v2 = t[k, 2]
        s0 = s[v0]
        s1 = s[v1]
        s2 = s[v2]
        npos = (s0 > 0) + (s1 > 0) + (s2 > 0)
        if npos == 0 or npos == 3:
            continue
        lone_pos = npos == 1
        # rotate the lone vertex to the front
        if lone_pos:
            if s1 > 0:
                tmp = v0; v0 = v1; v1 = v2; v2 = tmp
            elif s2 > 0:
                tmp = v2; v2 = v1; v1 = v0; v0 = tmp
        else:
            if s1 < 0:
                tmp = v0; v0 = v1; v1 = v2; v2 = tmp
            elif s2 < 0:
                tmp = v2; v2 = v1; v1 = v0; v0 = tmp
        mixed[m] = k
        if lone_pos:
            start[m, 0] = v0; start[m, 1] = v1
            end[m, 0] = v2; end[m, 1] = v0
        else:
            start[m, 0] = v2; start[m, 1] = v0
            end[m, 0] = v0; end[m, 1] = v1
        m += 1
    return mixed_arr[:m], start_arr[:m], end_arr[:m]


def edge_keys(pairs, cnp.int64_t nvert):
    p = np.asarray(pairs, np.int64)
    lo = np.minimum(p[:, 0], p[:, 1])
    hi = np.maximum(p[:, 0], p[:, 1])
    return lo * nvert + hi


def link_segments(start_key, end_key):
    cdef const cnp.int64_t[:] sk = np.ascontiguousarray(start_key, dtype=np.int64)
    cdef const cnp.int64_t[:] ek = np.ascontiguousarray(end_key, dtype=np.int64)
    cdef Py_ssize_t n = sk.shape[0], i, j, h, lo, hi, mid, pos = 0, nchains = 0
    by_start = np.argsort(start_key, kind="stable").astype(np.int64)
    sorted_start = np.asarray(start_key, np.int64)[by_start]
    by_end = np.argsort(end_key, kind="stable").astype(np.int64)
    sorted_end = np.asarray(end_key, np.int64)[by_end]
    cdef const cnp.int64_t[:] bs = by_start
    cdef const cnp.int64_t[:] ss = sorted_start
    cdef const cnp.int64_t[:] se = sorted_end
    succ_arr = np.full(n, -1, np.int64)
    has_pred_arr = np.zeros(n, np.uint8)
    cdef cnp.int64_t[:] succ = succ_arr
    cdef cnp.uint8_t[:] has_pred = has_pred_arr
    cdef cnp.int64_t key
    for i in range(n):
        key = ek[i]
        lo = 0
        hi = n
        while lo < hi:
            mid = (lo + hi) >> 1
            if ss[mid] < key:
                lo = mid + 1
            else:
                hi = mid
        if lo < n and ss[lo] == key:
            succ[i] = bs[lo]
        key = sk[i]
        lo = 0
        hi = n
        while lo < hi:
            mid = (lo + hi) >> 1
            if se[mid] < key:
                lo = mid + 1
            else:
                hi = mid
        if lo < n and se[lo] == key:
            has_pred[i] = 1
    order_arr = np.empty(n, np.int64)
    offsets_arr = np.zeros(n + 1, np.int64)
    closed_arr = np.zeros(n, np.uint8)
    used_arr = np.zeros(n, np.uint8)
    cdef cnp.int64_t[:] order = order_arr
    cdef cnp.int64_t[:] offsets = offsets_arr
    cdef cnp.uint8_t[:] closed = closed_arr
    cdef cnp.uint8_t[:] used = used_arr
    cdef int sweep
    for sweep in range(2):
        for h in range(n):
            if used[h] or (sweep == 0 and has_pred[h]):
                continue
            i = h
            while True:
                used[i] = 1
                order[pos] = i
                pos += 1
                j = succ[i]
                if j < 0:
                    break
                if used[j]:
                    if j == h:
                        closed[nchains] = 1
                    break
                i = j
            nchains += 1
            offsets[nchains] = pos
    return order_arr[:pos], offsets_arr[:nchains + 1], closed_arr[:nchains].astype(bool)


def subcomplex_euler(tri, edges, sign, int target):
    cdef const cnp.int64_t[:, :] t = np.ascontiguousarray(tri, dtype=np.int64)
    cdef const cnp.int64_t[:, :] e = np.ascontiguousarray(edges, dtype=np.int64)
    cdef const cnp.int8_t[:] s = np.ascontiguousarray(sign, dtype=np.int8)
    cdef Py_ssize_t k
    cdef long V = 0, E = 0, T = 0
    for k in range(s.shape[0]):
        if s[k] == target:
            V += 1
    for k in range(e.shape[0]):
        if s[e[k, 0]] == target and s[e[k, 1]] == target:
            E += 1
    for k in range(t.shape[0]):
        if s[t[k, 0]] == target and s[t[k, 1]] == target and s[t[k, 2]] == target:
            T += 1
    return V - E + T
