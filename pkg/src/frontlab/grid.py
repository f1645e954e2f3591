"""Triangulated sampling grid shared by curve tracing and region topology.

Each grid cell is split into four triangles through a sampled center point,
which settles the saddle ambiguity of plain marching squares.  Periodic
directions are glued and polar rows are closed by triangle fans.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .bundle import Role, jacobian

GRID_OFFSET = (math.sqrt(2.0) - 1.0) / 4.0
POLE_CLEARANCE = 1e-2
POLE_PROBE = 1e-7


class GridError(ValueError):
    """The grid cannot resolve the singular set."""


class PoleError(GridError):
    pass


def normalized_jacobian(surface, q, role):
    """Jacobian divided by the chart density, so polar rows do not vanish."""
    q = np.asarray(q, float)
    lam = jacobian(surface, q, role)
    return lam / surface.domain.chart_density(q[..., 0])


def _axis_nodes(lo, hi, n, periodic, polar):
    span = hi - lo
    if periodic:
        return lo + span * (np.arange(n) + GRID_OFFSET) / n
    if polar:
        return lo + span * (np.arange(n) + 0.5 + GRID_OFFSET / 4) / n
    return lo + span * (np.arange(n) + GRID_OFFSET) / (n - 1 + 2 * GRID_OFFSET)


@dataclass
class TriGrid:
    surface: object
    role: Role
    shape: tuple[int, int]
    pos: np.ndarray        # (V, 2) canonical vertex coordinates
    values: np.ndarray     # normalized Jacobian at every vertex
    tri: np.ndarray        # (T, 3) counter-clockwise in (u, v)
    edges: np.ndarray      # (E, 2) unique edges
    pole_ids: tuple        # vertex ids of the (min, max) poles or None
    n_nodes: int

    @property
    def sign(self) -> np.ndarray:
        return np.where(self.values >= 0.0, 1, -1).astype(np.int8)

    @property
    def nvert(self) -> int:
        return len(self.pos)

    def edge_delta(self, a, b):
        """Start point and unwrapped displacement of the edges ``a -> b``."""
        dom = self.surface.domain
        pa = self.pos[a].copy()
        d = self.pos[b] - pa
        for k, per in enumerate((dom.u_periodic, dom.v_periodic)):
            if per:
                span = dom.spans[k]
                d[:, k] = (d[:, k] + span / 2) % span - span / 2
        # poles are points: use the partner's longitude
        for pid in self.pole_ids:
            if pid is None:
                continue
            at_a = a == pid
            pa[at_a, 1] = self.pos[b[at_a], 1]
            d[at_a, 1] = 0.0
            at_b = b == pid
            d[at_b, 1] = 0.0
        return pa, d

    def euler(self, target: int) -> int:
        return int(kernels.subcomplex_euler(self.tri, self.edges, self.sign, target))

    def cell_size(self) -> float:
        dom = self.surface.domain
        return max(dom.spans[0] / self.shape[0], dom.spans[1] / self.shape[1])


def build_grid(surface, role=Role.PHI, grid=(256, 256), refine_tol=1e-10) -> TriGrid:
    role = Role.parse(role)
    nu, nv = grid
    if nu < 16 or nv < 16:
        raise GridError("grid must be at least 16x16")
    dom = surface.domain
    polar = dom.pole_at_u_min or dom.pole_at_u_max
    us = _axis_nodes(*dom.u_range, nu, dom.u_periodic, polar)
    vs = _axis_nodes(*dom.v_range, nv, dom.v_periodic, False)
    U, Vv = np.meshgrid(us, vs, indexing="ij")
    nodes = np.stack([U.ravel(), Vv.ravel()], axis=-1)
    n_nodes = len(nodes)

    cu = nu if dom.u_periodic else nu - 1
    cv = nv if dom.v_periodic else nv - 1
    I, J = np.meshgrid(np.arange(cu), np.arange(cv), indexing="ij")
    I, J = I.ravel(), J.ravel()
    I1 = (I + 1) % nu
    J1 = (J + 1) % nv
    a = I * nv + J
    b = I1 * nv + J
    c = I1 * nv + J1
    d = I * nv + J1
    du = np.where(I1 > I, us[I1] - us[I], us[I1] + dom.spans[0] - us[I])
    dv = np.where(J1 > J, vs[J1] - vs[J], vs[J1] + dom.spans[1] - vs[J])
    centers = np.stack([us[I] + du / 2, vs[J] + dv / 2], axis=-1)
    centers = np.stack(dom.wrap(centers[:, 0], centers[:, 1]), axis=-1)
    m = n_nodes + np.arange(len(centers))
    tris = [np.stack([a, b, m], 1), np.stack([b, c, m], 1), np.stack([c, d, m], 1), np.stack([d, a, m], 1)]

    pos = [nodes, centers]
    next_id = n_nodes + len(centers)
    pole_ids = [None, None]
    jj = np.arange(nv)
    jn = (jj + 1) % nv
    if dom.pole_at_u_min:
        pole_ids[0] = next_id
        pos.append(np.array([[dom.u_range[0], dom.v_range[0]]]))
        tris.append(np.stack([np.full(nv, next_id), jj, jn], 1))
        next_id += 1
    if dom.pole_at_u_max:
        pole_ids[1] = next_id
        pos.append(np.array([[dom.u_range[1], dom.v_range[0]]]))
        last = (nu - 1) * nv
        tris.append(np.stack([np.full(nv, next_id), last + jn, last + jj], 1))
        next_id += 1
    pos = np.concatenate(pos)
    tri = np.concatenate(tris).astype(np.int64)

    values = np.empty(len(pos))
    regular = n_nodes + len(centers)
    values[:regular] = normalized_jacobian(surface, pos[:regular], role)
    for k, pid in enumerate(pole_ids):
        if pid is not None:
            u = dom.u_range[0] + POLE_PROBE if k == 0 else dom.u_range[1] - POLE_PROBE
            values[pid] = normalized_jacobian(surface, np.array([[u, dom.v_range[0]]]), role)[0]

    e = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    e = np.unique(np.sort(e, axis=1), axis=0)

    g = TriGrid(surface, role, (nu, nv), pos, values, tri, e, tuple(pole_ids), n_nodes)
    corners = values[np.stack([a, b, c, d], 1)]
    if np.any(np.all(np.abs(corners) < refine_tol, axis=1)):
        raise GridError("grid too coarse: a cell has all corners on the singular set")
    return g
