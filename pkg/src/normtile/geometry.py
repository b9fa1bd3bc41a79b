"""Angles at nodes and turning along cell boundaries.

All angle work happens in a 2D chart: the plane (or unwrapped torus)
directly, or the tangent plane at a node for the sphere.  A pair of
clockwise-consecutive edges at a node is *degenerate* when their outgoing
half-tangents are antiparallel, i.e. the two edges continue each other
smoothly.  Two edges leaving in the same direction (a tangential meeting)
form a generic pair with angle 0.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import BadPairIndex, DegeneracyOverflow, DegenerateArc, OpenTrace, UnknownNode

if TYPE_CHECKING:
    from .mesh import Arc, ManifoldContext, TilingMesh

DEFAULT_ANGLE_TOL = 1e-7
CORNER_THRESHOLD = 1e-4


def default_angle_tol() -> float:
    """Degeneracy tolerance, overridable through ``TILING_ANGLE_TOL``."""
    env = os.environ.get("TILING_ANGLE_TOL")
    return float(env) if env else DEFAULT_ANGLE_TOL


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a, 2 * math.pi)
    if a <= -math.pi:
        a += 2 * math.pi
    elif a > math.pi:
        a -= 2 * math.pi
    return a


def _unit(v):
    n = math.sqrt(float(v @ v))
    if n == 0.0:
        raise DegenerateArc("zero-length direction")
    return v / n


def tangent_frame(manifold: "ManifoldContext", position) -> np.ndarray | None:
    """Orthonormal tangent basis ``(e1, e2)`` at a sphere point, else None.

    ``e1 x e2`` is the outward normal, so bearings grow counter-clockwise
    when the sphere is seen from outside.
    """
    if manifold.kind != "sphere":
        return None
    n = np.asarray(position, dtype=float)
    n = n / np.linalg.norm(n)
    a = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = a - (a @ n) * n
    e1 /= np.linalg.norm(e1)
    return np.array([e1, np.cross(n, e1)])


def to_chart(vec, frame) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if frame is None:
        return v
    return frame @ v


def arc_half_tangent(arc: "Arc", forward: bool, frame=None) -> np.ndarray:
    """Unit half-tangent of ``arc`` at its start (``forward``) or end, in chart."""
    t = arc.half_tangent_start if forward else arc.half_tangent_end
    if t is None:
        pts = arc.samples if forward else arc.samples[::-1]
        t = pts[1] - pts[0]
        if not np.any(t):
            raise DegenerateArc(f"arc {arc.id}: coincident samples, no tangent available")
    return _unit(to_chart(t, frame))


def arc_lead_direction(arc: "Arc", forward: bool, frame=None) -> np.ndarray:
    """Direction from an arc end to its neighbouring sample (second-order data)."""
    pts = arc.samples if forward else arc.samples[::-1]
    d = pts[1] - pts[0]
    if not np.any(d):
        return arc_half_tangent(arc, forward, frame)
    return to_chart(d, frame)


def half_tangent(mesh: "TilingMesh", half_edge_id: int) -> np.ndarray:
    """Outgoing unit half-tangent of a half-edge at its origin.

    Plane and torus: a 2-vector.  Sphere: a 3-vector in the tangent plane
    at the origin node.
    """
    h = mesh.half_edges[half_edge_id]
    arc = mesh.arcs[h.arc]
    frame = tangent_frame(mesh.manifold, mesh.nodes[h.origin].position)
    t2 = arc_half_tangent(arc, h.forward, frame)
    if frame is None:
        return t2
    return t2 @ frame


def outgoing_chart_tangent(mesh: "TilingMesh", half_edge_id: int) -> np.ndarray:
    cache = mesh.tangent_cache
    t = cache.get(half_edge_id)
    if t is None:
        h = mesh.half_edges[half_edge_id]
        frame = tangent_frame(mesh.manifold, mesh.nodes[h.origin].position)
        t = cache[half_edge_id] = arc_half_tangent(mesh.arcs[h.arc], h.forward, frame)
    return t


def pair_angle(t1, t2) -> float:
    """Unsigned angle in [0, pi] between two 2D unit vectors."""
    cross = t1[0] * t2[1] - t1[1] * t2[0]
    return math.atan2(abs(cross), float(t1[0] * t2[0] + t1[1] * t2[1]))


def is_degenerate(t1, t2, angle_tol: float = DEFAULT_ANGLE_TOL) -> bool:
    """Antiparallel test ``dot(t1, t2) <= -cos(angle_tol)``."""
    return float(t1[0] * t2[0] + t1[1] * t2[1]) <= -math.cos(angle_tol)


@dataclass(frozen=True)
class PairClassification:
    node: int
    pair_index: int
    angle: float
    kind: str  # "generic" | "degenerate"

    @property
    def degenerate(self) -> bool:
        return self.kind == "degenerate"


def classify_pair(mesh: "TilingMesh", node_id: int, pair_index: int,
                  angle_tol: float | None = None) -> PairClassification:
    """Classify the pair ``(star[j], star[j+1])`` at a node."""
    if node_id not in mesh.nodes:
        raise UnknownNode(f"unknown node {node_id}")
    star = mesh.nodes[node_id].star
    if not 0 <= pair_index < len(star):
        raise BadPairIndex(f"node {node_id} has {len(star)} pairs, got index {pair_index}")
    tol = default_angle_tol() if angle_tol is None else angle_tol
    t1 = outgoing_chart_tangent(mesh, star[pair_index])
    t2 = outgoing_chart_tangent(mesh, star[(pair_index + 1) % len(star)])
    kind = "degenerate" if is_degenerate(t1, t2, tol) else "generic"
    return PairClassification(node_id, pair_index, pair_angle(t1, t2), kind)


def node_pairs(mesh: "TilingMesh", node_id: int, angle_tol: float | None = None) -> list:
    star = mesh.nodes[node_id].star
    return [classify_pair(mesh, node_id, j, angle_tol) for j in range(len(star))]


def node_degeneracy_count(mesh: "TilingMesh", node_id: int,
                          angle_tol: float | None = None) -> int:
    """Number ``r_i`` of degenerate pairs at a node (at most 2)."""
    if node_id not in mesh.nodes:
        raise UnknownNode(f"unknown node {node_id}")
    r = sum(p.degenerate for p in node_pairs(mesh, node_id, angle_tol))
    if r > 2:
        raise DegeneracyOverflow(f"node {node_id} has {r} degenerate pairs")
    return r


def corner_is_degenerate(mesh: "TilingMesh", half_edge_id: int,
                         angle_tol: float | None = None) -> bool:
    """Is the face corner where ``half_edge_id`` leaves its origin smooth?

    The corner is formed by the edge arriving along ``prev(h)`` and the one
    leaving along ``h``; both are compared through their outgoing
    half-tangents at the shared node.
    """
    tol = default_angle_tol() if angle_tol is None else angle_tol
    incoming = mesh.half_edges[mesh.prev(half_edge_id)].twin
    return is_degenerate(outgoing_chart_tangent(mesh, incoming),
                         outgoing_chart_tangent(mesh, half_edge_id), tol)


def signed_exterior_angle(t_in, t_out, node=None, back_point=None, fwd_point=None) -> float:
    """Signed turning from travel direction ``t_in`` to ``t_out``.

    Left turns are positive.  A full reversal (a cusp) is ambiguous from
    first-order data; it is resolved by which side the leaving and the
    arriving curves lie on near the node, giving +pi for an ordinary cusp
    whose interior wedge has zero angle.
    """
    cross = float(t_in[0] * t_out[1] - t_in[1] * t_out[0])
    dot = float(t_in[0] * t_out[0] + t_in[1] * t_out[1])
    a = math.atan2(cross, dot)
    if math.pi - abs(a) < 1e-9 and node is not None:
        w = np.array([-t_out[1], t_out[0]])
        df = np.asarray(fwd_point) - node
        db = np.asarray(back_point) - node
        lf = float(w @ df) / max(float(df @ df), 1e-300)
        lb = float(w @ db) / max(float(db @ db), 1e-300)
        return math.pi if lf <= lb else -math.pi
    return a


# ---------------------------------------------------------------------------
# boundary traces

@dataclass
class CornerRecord:
    s: float
    delta_alpha: float
    index: int
    node: int | None = None


@dataclass
class BoundaryTrace:
    """Closed boundary of one cell, parametrized by normalized arclength.

    ``points[k]`` has arclength ``s[k]``; ``points[-1] == points[0]``.
    ``alpha_in[k]``/``alpha_out[k]`` are the tangent angles arriving at and
    leaving sample ``k``; they differ only at nodes.  Corners carry exact
    signed exterior angles; every other node is listed in ``smooth_nodes``.
    """

    face_id: int | None
    points: np.ndarray
    s: np.ndarray
    alpha_in: np.ndarray
    alpha_out: np.ndarray
    corners: list = field(default_factory=list)
    node_samples: dict = field(default_factory=dict)
    smooth_nodes: list = field(default_factory=list)
    length: float = 0.0

    @property
    def closed(self) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.points))))
        return float(np.max(np.abs(self.points[0] - self.points[-1]))) <= 1e-9 * scale


def discrete_turning(trace: BoundaryTrace) -> tuple:
    """Return ``(smooth_integral, corner_sum, total)`` for a closed trace.

    The smooth part sums tangent-angle increments along the samples plus the
    (small) tangent jumps at smooth nodes; the corner part sums the exact
    exterior angles.  For a disk cell in the plane the total is 2*pi.
    """
    if not trace.closed:
        raise OpenTrace("boundary trace does not close")
    m = len(trace.points)
    ain, aout = trace.alpha_in, trace.alpha_out
    corner_idx = {c.index % (m - 1) for c in trace.corners}
    steps = [wrap_angle(ain[k + 1] - aout[k]) for k in range(m - 1)]
    for k in range(1, m):
        if k % (m - 1) in corner_idx:
            continue
        steps.append(wrap_angle(aout[k % (m - 1)] - ain[k]))
    smooth = math.fsum(steps)
    corners = math.fsum(c.delta_alpha for c in trace.corners)
    return smooth, corners, smooth + corners


def trace_from_polyline(points, corner_indices: Sequence[int] = (),
                        corner_threshold: float = CORNER_THRESHOLD,
                        face_id: int | None = None) -> BoundaryTrace:
    """Trace of a closed polyline with optional declared corner markers.

    Tangents come from periodic central differences; at a declared marker
    the one-sided chords are used, and the marker becomes a corner only if
    the local turning exceeds ``corner_threshold``.
    """
    pts = np.asarray(points, dtype=float)
    if np.max(np.abs(pts[0] - pts[-1])) > 0:
        pts = np.vstack([pts, pts[:1]])
    m = len(pts)
    core = pts[:-1]
    fwd = np.roll(core, -1, axis=0) - core
    bwd = core - np.roll(core, 1, axis=0)
    central = fwd + bwd
    a = np.arctan2(central[:, 1], central[:, 0])
    ain, aout = a.copy(), a.copy()
    corners = []
    seg = np.linalg.norm(fwd, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = cum / cum[-1]
    for k in sorted({int(i) % (m - 1) for i in corner_indices}):
        ai = math.atan2(bwd[k, 1], bwd[k, 0])
        ao = math.atan2(fwd[k, 1], fwd[k, 0])
        turn = wrap_angle(ao - ai)
        if abs(turn) > corner_threshold:
            ain[k], aout[k] = ai, ao
            corners.append(CornerRecord(float(s[k]), turn, k))
    ain = np.append(ain, ain[0])
    aout = np.append(aout, aout[0])
    return BoundaryTrace(face_id, pts, s, ain, aout, corners, {}, [], float(cum[-1]))
