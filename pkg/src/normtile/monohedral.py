"""Turning-angle integrals on cell boundaries and the 3D prism check.

For a disk cell in the plane the total turning of its boundary is 2*pi.
When the tiling is monohedral the curvature carried by the smooth parts of
the boundary cancels, so the exterior angles at the corners alone add up
to 2*pi; each is at most pi, hence every cell has at least two corners.
This module measures all three quantities on sampled boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import NotMonohedral, UnknownFace
from .generators import prism3d_surface
from .geometry import BoundaryTrace, CornerRecord, discrete_turning, wrap_angle
from .mesh import TilingMesh, face_boundary

__all__ = [
    "BoundaryTrace", "boundary_trace", "total_turning_check", "smooth_part_integral",
    "corner_count", "check_two_corner_minimum", "verify_3d_construction",
]


def _tangent_angles(pts: np.ndarray) -> np.ndarray:
    if len(pts) < 3:
        d = pts[-1] - pts[0]
        return np.full(len(pts), math.atan2(d[1], d[0]))
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    d = np.gradient(pts, s, axis=0, edge_order=2)
    return np.arctan2(d[:, 1], d[:, 0])


def boundary_trace(mesh: TilingMesh, face_id: int, samples_per_arc: int = 64,
                   angle_tol: float | None = None) -> BoundaryTrace:
    """Sample a cell boundary counter-clockwise.

    Tangent angles along each arc come from second-order finite
    differences of the samples.  At every node the exterior angle is taken
    from the exact half-tangents; nodes whose exterior angle does not
    exceed ``angle_tol`` are smooth and recorded in ``smooth_nodes``.
    """
    if mesh.manifold.kind == "sphere":
        raise ValueError("boundary traces are defined for planar charts only")
    if face_id not in mesh.faces or mesh.faces[face_id].outer:
        raise UnknownFace(f"unknown cell {face_id}")
    tol = geo.default_angle_tol() if angle_tol is None else angle_tol
    walk = face_boundary(mesh, face_id)
    pieces, alphas, nodes = [], [], []
    cursor = None
    for h in walk:
        he = mesh.half_edges[h]
        arc = mesh.arcs[he.arc]
        pts = arc.resampled(samples_per_arc, he.forward)
        if cursor is not None:
            # chain torus lifts: translate so the arc starts where the last ended
            pts = pts + (cursor - pts[0])
        pieces.append(pts)
        alphas.append(_tangent_angles(pts))
        nodes.append(he.origin)
        cursor = pts[-1]
    points = [pieces[0][:1]]
    ain, aout = [None], [alphas[0][0]]
    node_samples = {0: nodes[0]}
    for k, (pts, al) in enumerate(zip(pieces, alphas)):
        points.append(pts[1:])
        ain.extend(al[1:])
        aout.extend(al[1:-1])
        if k + 1 < len(pieces):
            node_samples[sum(len(p) - 1 for p in pieces[:k + 1])] = nodes[k + 1]
            aout.append(alphas[k + 1][0])
    points = np.vstack(points)
    aout.append(alphas[0][0])
    ain[0] = ain[-1]
    ain, aout = np.array(ain, dtype=float), np.array(aout, dtype=float)
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = cum / cum[-1]

    corners, smooth = [], []
    m = len(points)
    for idx, h in zip(sorted(node_samples), walk):
        he = mesh.half_edges[h]
        incoming = mesh.half_edges[mesh.prev(h)].twin
        t_in = -geo.outgoing_chart_tangent(mesh, incoming)
        t_out = geo.outgoing_chart_tangent(mesh, h)
        back = points[(idx - 1) % (m - 1)]
        fwd = points[idx + 1]
        da = geo.signed_exterior_angle(t_in, t_out, points[idx], back, fwd)
        if abs(da) > tol:
            corners.append(CornerRecord(float(s[idx]), da, idx, he.origin))
        else:
            smooth.append(he.origin)
    return BoundaryTrace(face_id, points, s, ain, aout, corners, node_samples,
                         smooth, float(cum[-1]))


@dataclass(frozen=True)
class TurningCheck:
    K: float
    smooth: float
    corners: float
    error: float
    tol: float
    passed: bool


def turning_tolerance(trace: BoundaryTrace) -> float:
    """Admissible |K - 2 pi|: second order in the finest arc spacing, floored at 1e-9."""
    seg = np.linalg.norm(np.diff(trace.points, axis=0), axis=1)
    h = float(seg.max()) / max(trace.length, 1e-300)
    return max(1e-9, 4 * math.pi * (2 * math.pi * h) ** 2)


def total_turning_check(trace: BoundaryTrace, tol: float | None = None) -> TurningCheck:
    smooth, corners, total = discrete_turning(trace)
    tol = turning_tolerance(trace) if tol is None else tol
    err = abs(total - 2 * math.pi)
    return TurningCheck(total, smooth, corners, err, tol, err <= tol)


def smooth_part_integral(trace: BoundaryTrace) -> float:
    """Integral of signed curvature over the smooth part of the boundary."""
    return discrete_turning(trace)[0]


@dataclass(frozen=True)
class CornerCount:
    count: int
    max_abs_angle: float

    def __int__(self):
        return self.count


def corner_count(trace: BoundaryTrace, angle_tol: float | None = None) -> CornerCount:
    tol = geo.default_angle_tol() if angle_tol is None else angle_tol
    mags = [abs(c.delta_alpha) for c in trace.corners]
    big = max(mags, default=0.0)
    if big > math.pi + 1e-9:
        raise ValueError(f"exterior angle {big} exceeds pi")
    return CornerCount(sum(a > tol for a in mags), big)


# ---------------------------------------------------------------------------

@dataclass
class TwoCornerReport:
    cells: dict = field(default_factory=dict)  # face -> (v_star, K, smooth integral)
    violations: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations


def congruence_signature(trace: BoundaryTrace) -> tuple:
    """Cheap congruence invariants: perimeter and sorted corner angles.

    Necessary, not sufficient, for two cells to be congruent.
    """
    return trace.length, sorted(c.delta_alpha for c in trace.corners)


def check_two_corner_minimum(mesh: TilingMesh, angle_tol: float | None = None,
                     samples_per_arc: int = 64, tol: float = 1e-9) -> TwoCornerReport:
    """Verify ``v* >= 2`` on every cell of a monohedral plane/torus tiling.

    Raises :class:`NotMonohedral` when the cells' congruence invariants
    differ by more than ``tol``.
    """
    traces = {f: boundary_trace(mesh, f, samples_per_arc, angle_tol)
              for f in mesh.interior_face_ids}
    ref = None
    for f, tr in traces.items():
        length, angles = congruence_signature(tr)
        if ref is None:
            ref = (length, angles)
            continue
        if (abs(length - ref[0]) > tol * max(1.0, ref[0]) or len(angles) != len(ref[1])
                or any(abs(a - b) > tol for a, b in zip(angles, ref[1]))):
            raise NotMonohedral(f"cell {f} is not congruent to the first cell")
    rep = TwoCornerReport()
    for f, tr in traces.items():
        smooth, _, total = discrete_turning(tr)
        v_star = corner_count(tr, angle_tol).count
        rep.cells[f] = (v_star, total, smooth)
        if v_star < 2:
            rep.violations.append(f"cell {f} has only {v_star} corners")
    return rep


# ---------------------------------------------------------------------------
# 3D prism

@dataclass(frozen=True)
class Prism3DResiduals:
    stack_residual: float
    side_residual: float
    vertex_tangent_residual: float


def _angle_to_vertical(d: np.ndarray) -> float:
    d = d / np.linalg.norm(d)
    return math.acos(min(1.0, abs(float(d[2]))))


def verify_3d_construction(grid_n: int = 64, fd_step: float = 1e-6) -> Prism3DResiduals:
    """Sampled check of the vertex-free monohedral prism cell.

    * stacking: the top cap is the bottom cap lifted by 2;
    * side faces: the cap curves on ``x = 1`` and ``x = -1`` (and likewise
      in ``y``) coincide, so translates by 2 along x or y fit;
    * at each of the eight candidate corners every boundary curve that
      meets there has a vertical half-tangent (one-sided differences).
    """
    if grid_n < 8:
        raise ValueError("grid_n must be >= 8")
    u = np.linspace(-1.0, 1.0, grid_n)
    stack = max(abs(prism3d_surface(x, y, True) - prism3d_surface(x, y, False) - 2)
                for x in u for y in u)
    side = 0.0
    for t in u:
        for top in (True, False):
            side = max(side,
                       abs(prism3d_surface(1.0, t, top) - prism3d_surface(-1.0, t, top)),
                       abs(prism3d_surface(t, 1.0, top) - prism3d_surface(t, -1.0, top)))
    worst = 0.0
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            for top in (True, False):
                z0 = prism3d_surface(sx, sy, top)
                corner = np.array([sx, sy, z0])
                ys = sy - math.copysign(fd_step, sy)
                xs = sx - math.copysign(fd_step, sx)
                along_y = np.array([sx, ys, prism3d_surface(sx, ys, top)]) - corner
                along_x = np.array([xs, sy, prism3d_surface(xs, sy, top)]) - corner
                edge = np.array([0.0, 0.0, -1.0 if top else 1.0])
                for d in (along_y, along_x, edge):
                    worst = max(worst, _angle_to_vertical(d))
    return Prism3DResiduals(float(stack), float(side), worst)
