"""Degree statistics, harmonic degree, regularity and the corner-degree bound.

Sums of degrees are accumulated as exact integers and each average is
formed by a single division at the end, so identities such as
``n_bar == 2E/V`` hold exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import geometry as geo
from .errors import BallExceedsPatch, SingularDenominator, TilingError
from .mesh import TilingMesh, face_boundary


@dataclass
class TilingMetrics:
    V: int
    E: int
    F: int
    chi: int
    closed: bool
    sum_n: int
    sum_v: int
    sum_r: int
    sum_q: int
    sum_q_outer: int
    per_node: dict = field(repr=False)
    per_cell: dict = field(repr=False)

    @property
    def n_bar(self) -> float:
        return self.sum_n / self.V

    @property
    def v_bar(self) -> float:
        return self.sum_v / self.F

    @property
    def n_star_bar(self) -> float:
        return (self.sum_n - self.sum_r) / self.V

    @property
    def v_star_bar(self) -> float:
        return (self.sum_v - self.sum_q) / self.F

    @property
    def rho(self) -> float:
        return (2 * self.V - self.sum_r) / (2 * self.V)

    @property
    def h_bar(self) -> float:
        return harmonic_degree(self.n_bar, self.v_bar)

    @property
    def h_bar_euler(self) -> float | None:
        return 2 * self.E / (self.E + self.chi) if self.closed else None

    @property
    def bound_rhs(self) -> float | None:
        return corner_degree_bound(self.E, self.chi, self.n_bar) if self.closed else None

    @property
    def convex_mosaic_candidate(self) -> bool:
        # informational only; no convexity test is attempted
        return (all(row[2] >= 3 for row in self.per_node.values())
                and all(row[2] >= 3 for row in self.per_cell.values()))

    def summary(self) -> dict:
        out = {
            "V": self.V, "E": self.E, "F": self.F, "chi": self.chi,
            "n_bar": self.n_bar, "v_bar": self.v_bar,
            "n_star_bar": self.n_star_bar, "v_star_bar": self.v_star_bar,
            "h_bar": self.h_bar, "rho": self.rho,
            "sum_r": self.sum_r, "sum_q": self.sum_q,
        }
        if self.closed:
            rhs = self.bound_rhs
            out.update(h_bar_euler=self.h_bar_euler, bound_rhs=rhs,
                       bound_margin=self.v_star_bar - rhs)
        return out


def harmonic_degree(n_bar: float, v_bar: float) -> float:
    """``v n / (v + n)``; 2 for every infinite (or toroidal) tiling."""
    if n_bar <= 0 or v_bar <= 0:
        raise ValueError("degrees must be positive")
    return v_bar * n_bar / (v_bar + n_bar)


def harmonic_degree_from_euler(E: int, chi: int) -> float:
    return 2 * E / (E + chi)


def corner_degree_bound(E: int, chi: int, n_bar: float) -> float:
    """Lower bound ``2 - 2 chi n / (E (n - 2) + chi n)`` on the mean cell corner degree."""
    denom = E * (n_bar - 2) + chi * n_bar
    if denom == 0:
        raise SingularDenominator(f"E(n-2) + chi*n vanishes for E={E}, chi={chi}, n={n_bar}")
    return 2 - 2 * chi * n_bar / denom


def compute_metrics(mesh: TilingMesh, angle_tol: float | None = None) -> TilingMetrics:
    """Combinatorial and corner statistics of a mesh.

    Per-node rows are ``(n_i, r_i, n*_i)`` and per-cell rows
    ``(v_j, q_j, v*_j)``.  Outer faces of a plane patch are not cells, but
    their smooth corners are tallied in ``sum_q_outer`` so the node/cell
    balance of degenerate pairs can still be checked.
    """
    tol = geo.default_angle_tol() if angle_tol is None else angle_tol
    per_node = {}
    for nid, node in mesh.nodes.items():
        n = len(node.star)
        r = geo.node_degeneracy_count(mesh, nid, tol)
        per_node[nid] = (n, r, n - r)
    per_cell = {}
    q_outer = 0
    v_outer = 0
    for fid, face in mesh.faces.items():
        walk = face_boundary(mesh, fid)
        q = sum(geo.corner_is_degenerate(mesh, h, tol) for h in walk)
        if face.outer:
            q_outer += q
            v_outer += len(walk)
        else:
            per_cell[fid] = (len(walk), q, len(walk) - q)
    sum_n = sum(row[0] for row in per_node.values())
    sum_r = sum(row[1] for row in per_node.values())
    sum_v = sum(row[0] for row in per_cell.values())
    sum_q = sum(row[1] for row in per_cell.values())
    if sum_n != 2 * mesh.E or sum_v + v_outer != 2 * mesh.E:
        raise TilingError("degree sums disagree with 2E")
    if sum_r != sum_q + q_outer:
        raise TilingError(f"degenerate pairs at nodes ({sum_r}) != smooth cell corners ({sum_q + q_outer})")
    return TilingMetrics(mesh.V, mesh.E, mesh.F, mesh.manifold.chi, mesh.manifold.closed,
                         sum_n, sum_v, sum_r, sum_q, q_outer, per_node, per_cell)


@dataclass(frozen=True)
class CornerBoundCheck:
    holds: bool
    margin: float
    v_star_bar: float
    bound_rhs: float


def check_corner_degree_bound(mesh: TilingMesh, angle_tol: float | None = None,
                   metrics: TilingMetrics | None = None) -> CornerBoundCheck:
    if not mesh.manifold.closed:
        raise TilingError("the corner-degree bound is checked on closed manifolds only")
    m = metrics or compute_metrics(mesh, angle_tol)
    rhs = corner_degree_bound(m.E, m.chi, m.n_bar)
    margin = m.v_star_bar - rhs
    return CornerBoundCheck(margin >= -1e-9, margin, m.v_star_bar, rhs)


# ---------------------------------------------------------------------------
# symbolic plane

@dataclass(frozen=True)
class SymbolicPoint:
    x: float
    y: float
    kind: str  # "combinatorial" | "corner"
    label: str = ""


def symbolic_points(metrics: TilingMetrics, kind: str = "corner", label: str = "") -> SymbolicPoint:
    if kind == "combinatorial":
        return SymbolicPoint(metrics.n_bar, metrics.v_bar, kind, label)
    if kind == "corner":
        return SymbolicPoint(metrics.n_star_bar, metrics.v_star_bar, kind, label)
    raise ValueError(f"unknown symbolic kind {kind!r}")


# ---------------------------------------------------------------------------
# ball averaging on plane patches

@dataclass(frozen=True)
class BallRecord:
    radius: float
    n_bar: float
    v_bar: float
    V: int
    E: int
    F: int


def _face_polygon(mesh: TilingMesh, fid: int) -> np.ndarray:
    pts = []
    for h in face_boundary(mesh, fid):
        he = mesh.half_edges[h]
        s = mesh.arcs[he.arc].samples
        pts.append((s if he.forward else s[::-1])[:-1])
    return np.vstack(pts)


def face_centroid(mesh: TilingMesh, fid: int) -> np.ndarray:
    p = _face_polygon(mesh, fid)
    q = np.roll(p, -1, axis=0)
    cross = p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]
    area = cross.sum() / 2
    if abs(area) < 1e-300:
        return p.mean(axis=0)
    cx = ((p[:, 0] + q[:, 0]) * cross).sum() / (6 * area)
    cy = ((p[:, 1] + q[:, 1]) * cross).sum() / (6 * area)
    return np.array([cx, cy])


def ball_sweep(mesh: TilingMesh, center, radii: Sequence[float],
               counting_policy: str = "centroid") -> list:
    """Degree averages of the sub-tiling inside growing balls ``B(center, r)``.

    A cell is counted when its centroid lies in the ball (``"centroid"``)
    or when all its nodes do (``"vertices"``); nodes and arcs are those of
    counted cells.  ``n_bar`` averages the number of counted arcs at each
    counted node and ``v_bar`` the number of arcs on each counted cell.
    """
    if mesh.manifold.kind != "plane_patch":
        raise TilingError("ball_sweep needs a plane patch")
    if counting_policy not in ("centroid", "vertices"):
        raise ValueError(f"unknown counting policy {counting_policy!r}")
    radii = [float(r) for r in radii]
    if any(b < a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be non-decreasing")
    c = np.asarray(center, dtype=float)
    faces = mesh.interior_face_ids
    walks = {f: face_boundary(mesh, f) for f in faces}
    origin = {f: [mesh.half_edges[h].origin for h in walks[f]] for f in faces}
    pos = {nid: n.position for nid, n in mesh.nodes.items()}
    diam = 0.0
    for f in faces:
        p = np.array([pos[n] for n in origin[f]])
        diam = max(diam, float(np.max(np.linalg.norm(p[:, None] - p[None], axis=2))))
    rim = [pos[n] for n in mesh.boundary_nodes()]
    clearance = min(float(np.linalg.norm(p - c)) for p in rim) if rim else math.inf
    if radii and radii[-1] + diam > clearance:
        raise BallExceedsPatch(
            f"ball of radius {radii[-1]} plus cell diameter {diam:.3g} leaves the patch "
            f"(clearance {clearance:.3g})")
    if counting_policy == "centroid":
        dist = {f: float(np.linalg.norm(face_centroid(mesh, f) - c)) for f in faces}
    else:
        dist = {f: max(float(np.linalg.norm(pos[n] - c)) for n in origin[f]) for f in faces}
    out = []
    for r in radii:
        counted = [f for f in faces if dist[f] <= r]
        arcs = {mesh.half_edges[h].arc for f in counted for h in walks[f]}
        deg = {}
        for a in arcs:
            arc = mesh.arcs[a]
            deg[arc.start] = deg.get(arc.start, 0) + 1
            deg[arc.end] = deg.get(arc.end, 0) + 1
        V, E, F = len(deg), len(arcs), len(counted)
        sum_v = sum(len(walks[f]) for f in counted)
        n_bar = sum(deg.values()) / V if V else math.nan
        v_bar = sum_v / F if F else math.nan
        out.append(BallRecord(r, n_bar, v_bar, V, E, F))
    return out
