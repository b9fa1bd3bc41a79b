"""Half-edge representation of a tiling.

A :class:`TilingMesh` holds nodes, arcs (the geometric edges), half-edges
and faces on one of three manifolds: a finite patch of the plane, a flat
torus, or a round sphere.  Meshes are immutable once built; operations
that change geometry return a new mesh.

Conventions
-----------
* Interior faces are walked counter-clockwise (face on the left).
* Node stars list outgoing half-edges in clockwise order of their
  half-tangent bearing, so consecutive entries ``star[j], star[j+1]`` form
  the pairs at a node and ``next(h) == cw_successor(twin(h))``.
* Plane patches get one or more synthetic ``outer`` faces that close the
  half-edge structure; they never enter cell statistics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import geometry as _geo
from .curves import Curve, Segment
from .errors import (
    DanglingReference,
    NonManifoldEdge,
    OpenBoundaryWalk,
    OrientationMismatch,
    UnknownFace,
    UnknownNode,
)

PLANE = "plane_patch"
TORUS = "flat_torus"
SPHERE = "sphere"

DEFAULT_SAMPLES = {"segment": 2, "circular_arc": 33, "great_circle": 17}


@dataclass(frozen=True)
class ManifoldContext:
    kind: str
    chi: int
    period_x: float | None = None
    period_y: float | None = None
    radius: float | None = None

    @classmethod
    def plane_patch(cls) -> "ManifoldContext":
        # a patch is a disk: the interior complex has chi = 1
        return cls(PLANE, 1)

    @classmethod
    def flat_torus(cls, period_x: float, period_y: float) -> "ManifoldContext":
        return cls(TORUS, 0, float(period_x), float(period_y))

    @classmethod
    def sphere(cls, radius: float = 1.0) -> "ManifoldContext":
        return cls(SPHERE, 2, radius=float(radius))

    def __post_init__(self):
        expected = {PLANE: 1, TORUS: 0, SPHERE: 2}
        if self.kind not in expected:
            raise ValueError(f"unknown manifold kind {self.kind!r}")
        if self.chi != expected[self.kind]:
            raise ValueError(f"{self.kind} must have chi={expected[self.kind]}")
        if self.kind == TORUS and not (self.period_x and self.period_y
                                       and self.period_x > 0 and self.period_y > 0):
            raise ValueError("flat torus needs positive periods")
        if self.kind == SPHERE and not (self.radius and self.radius > 0):
            raise ValueError("sphere needs a positive radius")

    @property
    def closed(self) -> bool:
        return self.kind != PLANE

    @property
    def periods(self) -> np.ndarray | None:
        if self.kind == TORUS:
            return np.array([self.period_x, self.period_y])
        return None

    @property
    def dim(self) -> int:
        return 3 if self.kind == SPHERE else 2

    def to_record(self) -> dict:
        rec = {"kind": self.kind, "chi": self.chi}
        if self.kind == TORUS:
            rec.update(period_x=self.period_x, period_y=self.period_y)
        if self.kind == SPHERE:
            rec["radius"] = self.radius
        return rec

    @classmethod
    def from_record(cls, rec: Mapping) -> "ManifoldContext":
        return cls(rec["kind"], int(rec["chi"]), rec.get("period_x"),
                   rec.get("period_y"), rec.get("radius"))


@dataclass(frozen=True, eq=False)
class Arc:
    """One edge of the tiling: samples plus half-tangents at both ends.

    On the torus ``samples`` are unwrapped; ``shift_start``/``shift_end``
    are the lattice offsets with
    ``samples[0] == position[start] + shift_start * periods``.
    """

    id: int
    start: int
    end: int
    samples: np.ndarray
    half_tangent_start: np.ndarray | None = None
    half_tangent_end: np.ndarray | None = None
    curve: Curve | None = None
    shift_start: tuple = (0, 0)
    shift_end: tuple = (0, 0)

    @classmethod
    def from_curve(cls, id: int, start: int, end: int, curve: Curve,
                   n_samples: int | None = None, shift_start=(0, 0),
                   shift_end=(0, 0)) -> "Arc":
        n = n_samples or DEFAULT_SAMPLES.get(curve.kind, 17)
        return cls(id, start, end, curve.sample(n), curve.tangent_start(),
                   curve.tangent_end(), curve, tuple(int(s) for s in shift_start),
                   tuple(int(s) for s in shift_end))

    @property
    def length(self) -> float:
        if self.curve is not None:
            return self.curve.length
        return float(np.sum(np.linalg.norm(np.diff(self.samples, axis=0), axis=1)))

    def oriented_curve(self, forward: bool) -> Curve:
        from .curves import Polyline
        c = self.curve or Polyline(self.samples, self.half_tangent_start, self.half_tangent_end)
        return c if forward else c.reversed()

    def resampled(self, n: int, forward: bool = True) -> np.ndarray:
        pts = self.curve.sample(n) if self.curve is not None else self.samples
        return pts if forward else pts[::-1]


@dataclass(frozen=True)
class Node:
    id: int
    position: np.ndarray = field(compare=False)
    star: tuple


@dataclass(frozen=True)
class HalfEdge:
    id: int
    origin: int
    arc: int
    forward: bool
    twin: int
    next: int
    face: int


@dataclass(frozen=True)
class Face:
    id: int
    boundary: int
    outer: bool = False


@dataclass(frozen=True, eq=False)
class TilingMesh:
    nodes: dict
    arcs: dict
    half_edges: dict
    faces: dict
    manifold: ManifoldContext
    provenance: str = ""

    # -- counts -----------------------------------------------------------
    @property
    def V(self) -> int:
        return len(self.nodes)

    @property
    def E(self) -> int:
        return len(self.arcs)

    @property
    def F(self) -> int:
        return sum(1 for f in self.faces.values() if not f.outer)

    @cached_property
    def interior_face_ids(self) -> list:
        return sorted(f.id for f in self.faces.values() if not f.outer)

    @cached_property
    def outer_face_ids(self) -> list:
        return sorted(f.id for f in self.faces.values() if f.outer)

    # -- navigation -------------------------------------------------------
    def dest(self, hid: int) -> int:
        return self.half_edges[self.half_edges[hid].twin].origin

    def prev(self, hid: int) -> int:
        return self._prev[hid]

    @cached_property
    def _prev(self) -> dict:
        return {h.next: h.id for h in self.half_edges.values()}

    @cached_property
    def star_position(self) -> dict:
        """Map half-edge id -> index in its origin's star."""
        pos = {}
        for node in self.nodes.values():
            for j, h in enumerate(node.star):
                pos[h] = j
        return pos

    def cw_successor(self, hid: int) -> int:
        star = self.nodes[self.half_edges[hid].origin].star
        return star[(self.star_position[hid] + 1) % len(star)]

    @cached_property
    def tangent_cache(self) -> dict:
        """Memo of chart half-tangents, filled by the geometry module."""
        return {}

    def half_edge_for(self, arc_id: int, forward: bool) -> int:
        return self._arc_half_edges[arc_id][0 if forward else 1]

    @cached_property
    def _arc_half_edges(self) -> dict:
        out = {}
        for h in self.half_edges.values():
            pair = out.setdefault(h.arc, [None, None])
            pair[0 if h.forward else 1] = h.id
        return out

    def arc_faces(self, arc_id: int) -> tuple:
        fw, bw = self._arc_half_edges[arc_id]
        return self.half_edges[fw].face, self.half_edges[bw].face

    def boundary_nodes(self) -> set:
        """Nodes touching an outer face (empty on closed manifolds)."""
        out = set()
        for fid in self.outer_face_ids:
            out.update(self.half_edges[h].origin for h in face_boundary(self, fid))
        return out

    def with_arcs(self, arcs: Mapping, provenance: str | None = None) -> "TilingMesh":
        """Same combinatorics, new arc geometry."""
        return TilingMesh(dict(self.nodes), dict(arcs), dict(self.half_edges),
                          dict(self.faces), self.manifold,
                          self.provenance if provenance is None else provenance)


# ---------------------------------------------------------------------------
# construction

def _orient(o) -> bool:
    if isinstance(o, str):
        return o in ("+", "fwd", "forward", "along")
    return bool(o > 0) if not isinstance(o, bool) else o


def build_mesh(nodes: Mapping, arcs: Iterable[Arc], face_boundaries: Mapping,
               manifold: ManifoldContext, provenance: str = "",
               check_orientation: bool = True) -> TilingMesh:
    """Assemble a :class:`TilingMesh` from node positions, arcs and face walks.

    Parameters
    ----------
    nodes : mapping of node id -> chart position
    arcs : iterable of :class:`Arc`
    face_boundaries : mapping of face id -> ordered list of
        ``(arc_id, orientation)``; orientation is truthy/``+1`` when the face
        walk follows the arc's sample order.  Walks must be counter-clockwise.
    manifold : :class:`ManifoldContext`

    Raises
    ------
    DanglingReference, OpenBoundaryWalk, NonManifoldEdge, OrientationMismatch
    """
    positions = {int(k): np.asarray(v, dtype=float) for k, v in nodes.items()}
    arc_list = sorted(arcs, key=lambda a: a.id)
    arc_map = {a.id: a for a in arc_list}
    if len(arc_map) != len(arc_list):
        raise NonManifoldEdge("duplicate arc ids")
    periods = manifold.periods
    for a in arc_list:
        for nid in (a.start, a.end):
            if nid not in positions:
                raise DanglingReference(f"arc {a.id} references unknown node {nid}")
        _check_arc_ends(a, positions, periods)

    he_origin, he_arc, he_fwd = {}, {}, {}
    he_id = {}
    for k, a in enumerate(arc_list):
        for fwd, hid in ((True, 2 * k), (False, 2 * k + 1)):
            he_id[(a.id, fwd)] = hid
            he_origin[hid] = a.start if fwd else a.end
            he_arc[hid] = a.id
            he_fwd[hid] = fwd

    nxt, face_of = {}, {}
    faces = {}
    for fid in sorted(face_boundaries):
        walk = list(face_boundaries[fid])
        if not walk:
            raise OpenBoundaryWalk(f"face {fid} has an empty boundary")
        hs = []
        for arc_id, orient in walk:
            if arc_id not in arc_map:
                raise DanglingReference(f"face {fid} references unknown arc {arc_id}")
            hs.append(he_id[(arc_id, _orient(orient))])
        for i, h in enumerate(hs):
            h2 = hs[(i + 1) % len(hs)]
            if _dest(h, he_arc, he_fwd, arc_map) != he_origin[h2]:
                raise OpenBoundaryWalk(
                    f"face {fid}: walk breaks between arcs {he_arc[h]} and {he_arc[h2]}")
            if h in face_of:
                raise NonManifoldEdge(
                    f"arc {he_arc[h]} used twice in the same orientation "
                    f"(faces {face_of[h]} and {fid})")
            face_of[h] = fid
            nxt[h] = h2
        faces[int(fid)] = Face(int(fid), hs[0])

    outgoing = {nid: [] for nid in positions}
    for hid, nid in he_origin.items():
        outgoing[nid].append(hid)
    stars = {}
    for nid, hs in outgoing.items():
        stars[nid] = _clockwise(hs, he_arc, he_fwd, arc_map, positions[nid], manifold)
    star_pos = {h: j for s in stars.values() for j, h in enumerate(s)}

    def twin(h):
        return h ^ 1

    def cw_succ(h):
        s = stars[he_origin[h]]
        return s[(star_pos[h] + 1) % len(s)]

    free = sorted(h for h in he_origin if h not in face_of)
    if free and manifold.closed:
        raise NonManifoldEdge(
            f"arc {he_arc[free[0]]} is not used by two oppositely oriented face walks")
    if check_orientation:
        for h, h2 in nxt.items():
            if cw_succ(twin(h)) != h2:
                nid = he_origin[h2]
                raise OrientationMismatch(
                    f"face {face_of[h]} at node {nid}: walk order disagrees with the "
                    "clockwise half-tangent order (face walks must be counter-clockwise)")
        if manifold.kind != SPHERE:
            for fid, f in faces.items():
                if _walk_area(f.boundary, nxt, he_arc, he_fwd, arc_map) <= 0:
                    raise OrientationMismatch(f"face {fid} is walked clockwise")
    # close plane patches with outer faces
    next_fid = max(faces, default=-1) + 1
    for h in free:
        if h in face_of:
            continue
        cycle, cur = [], h
        while cur not in face_of:
            face_of[cur] = next_fid
            cycle.append(cur)
            cur = cw_succ(twin(cur))
            if cur in face_of and face_of[cur] != next_fid:
                raise NonManifoldEdge("outer boundary runs into an interior face")
        for i, c in enumerate(cycle):
            nxt[c] = cycle[(i + 1) % len(cycle)]
        faces[next_fid] = Face(next_fid, cycle[0], outer=True)
        next_fid += 1

    half_edges = {
        h: HalfEdge(h, he_origin[h], he_arc[h], he_fwd[h], twin(h), nxt[h], face_of[h])
        for h in sorted(he_origin)
    }
    node_objs = {nid: Node(nid, positions[nid], tuple(stars[nid])) for nid in sorted(positions)}
    return TilingMesh(node_objs, arc_map, half_edges, faces, manifold, provenance)


def _walk_area(h0, nxt, he_arc, he_fwd, arc_map) -> float:
    """Signed area enclosed by a face walk, chaining torus lifts end to end."""
    pieces, cursor, h = [], None, h0
    while True:
        s = arc_map[he_arc[h]].samples
        s = s if he_fwd[h] else s[::-1]
        if cursor is not None:
            s = s + (cursor - s[0])
        pieces.append(s[:-1])
        cursor = s[-1]
        h = nxt[h]
        if h == h0:
            break
    p = np.vstack(pieces)
    q = np.roll(p, -1, axis=0)
    return float(np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1])) / 2


def _dest(h, he_arc, he_fwd, arc_map):
    a = arc_map[he_arc[h]]
    return a.end if he_fwd[h] else a.start


def _check_arc_ends(a: Arc, positions, periods):
    for end, nid, shift in ((a.samples[0], a.start, a.shift_start),
                            (a.samples[-1], a.end, a.shift_end)):
        expect = positions[nid].copy()
        if periods is not None:
            expect = expect + np.asarray(shift) * periods
        scale = max(1.0, float(np.max(np.abs(expect))))
        if np.max(np.abs(end - expect)) > 1e-12 * scale * 16:
            raise DanglingReference(
                f"arc {a.id}: sample end does not sit on node {nid}")


def _clockwise(hs, he_arc, he_fwd, arc_map, origin_pos, manifold):
    """Sort outgoing half-edges clockwise by half-tangent bearing.

    Exact ties (tangential arcs) fall back to the bearing of the second
    sample along each arc.
    """
    frame = _geo.tangent_frame(manifold, origin_pos)
    keyed = []
    for h in hs:
        a = arc_map[he_arc[h]]
        t = _geo.arc_half_tangent(a, he_fwd[h], frame)
        theta = math.atan2(t[1], t[0]) % (2 * math.pi)
        if theta > 2 * math.pi - 1e-9:
            theta -= 2 * math.pi
        lead = _geo.arc_lead_direction(a, he_fwd[h], frame)
        dev = _geo.wrap_angle(math.atan2(lead[1], lead[0]) - theta)
        keyed.append((theta, dev, h))
    keyed.sort(key=lambda k: (-k[0], -k[1], k[2]))
    # re-sort runs of equal bearings by second-order deviation
    out, i = [], 0
    while i < len(keyed):
        j = i + 1
        while j < len(keyed) and keyed[j - 1][0] - keyed[j][0] <= 1e-9:
            j += 1
        out.extend(sorted(keyed[i:j], key=lambda k: (-k[1], k[2])))
        i = j
    return [k[2] for k in out]


class _PointIndex:
    """Snap points to canonical representatives (periodic on the torus)."""

    def __init__(self, periods, tol):
        self.periods = periods
        self.tol = tol
        self.h = tol * 16
        self.cells = {}
        self.points = []

    def _wrap(self, p):
        p = np.asarray(p, dtype=float)
        if self.periods is None:
            return p
        q = np.mod(p, self.periods)
        q[self.periods - q < self.tol] = 0.0
        return q

    def _dist(self, a, b):
        d = np.abs(a - b)
        if self.periods is not None:
            d = np.minimum(d, self.periods - d)
        return float(np.max(d))

    def find_or_add(self, p):
        q = self._wrap(p)
        key = np.floor(q / self.h).astype(np.int64)
        if self.periods is not None:
            ncell = np.ceil(self.periods / self.h).astype(np.int64)
        nbrs = [()]
        for i, k in enumerate(key):
            ks = [k - 1, k, k + 1]
            if self.periods is not None:
                ks = [c % ncell[i] for c in ks]
            nbrs = [n + (int(c),) for n in nbrs for c in ks]
        for n in nbrs:
            for idx in self.cells.get(n, ()):
                if self._dist(self.points[idx], q) <= self.tol:
                    return idx, False
        idx = len(self.points)
        self.points.append(q)
        self.cells.setdefault(nbrs[len(nbrs) // 2], []).append(idx)
        return idx, True


def mesh_from_face_curves(face_curves: Sequence[Sequence[Curve]],
                          manifold: ManifoldContext, tol: float = 1e-8,
                          samples: Mapping | None = None, provenance: str = "",
                          face_ids: Sequence[int] | None = None) -> TilingMesh:
    """Build a mesh from counter-clockwise face boundaries given as curves.

    Coincident endpoints are merged into nodes (modulo the periods on a
    torus) and an arc shared by two faces is recognised by its midpoint.
    Straight segments are snapped onto the merged node positions.
    """
    sample_counts = dict(DEFAULT_SAMPLES)
    if samples:
        sample_counts.update(samples)
    periods = manifold.periods
    nodes_ix = _PointIndex(periods, tol)
    mids_ix = _PointIndex(periods, tol)
    arc_info = []
    faces = {}

    def shift_of(p, nid):
        if periods is None:
            return (0, 0)
        return tuple(int(s) for s in np.rint((p - nodes_ix.points[nid]) / periods))

    for fi, curves in enumerate(face_curves):
        walk = []
        for c in curves:
            u, _ = nodes_ix.find_or_add(c.start)
            v, _ = nodes_ix.find_or_add(c.end)
            m, new = mids_ix.find_or_add(c.point(0.5))
            if new:
                arc_info.append((u, v, c))
                walk.append((m, 1))
            else:
                au, av, _ = arc_info[m]
                if (au, av) == (u, v) and u != v:
                    raise NonManifoldEdge(f"two faces traverse arc {m} in the same direction")
                walk.append((m, -1))
        faces[face_ids[fi] if face_ids is not None else fi] = walk

    positions = dict(enumerate(nodes_ix.points))
    if manifold.kind == "sphere":
        positions = {k: p * (manifold.radius / np.linalg.norm(p)) for k, p in positions.items()}
    arcs = []
    for aid, (u, v, c) in enumerate(arc_info):
        s0, s1 = shift_of(c.start, u), shift_of(c.end, v)
        if isinstance(c, Segment):
            off0 = 0 if periods is None else np.asarray(s0) * periods
            off1 = 0 if periods is None else np.asarray(s1) * periods
            c = Segment(positions[u] + off0, positions[v] + off1)
        arcs.append(Arc.from_curve(aid, u, v, c, sample_counts.get(c.kind), s0, s1))
    return build_mesh(positions, arcs, faces, manifold, provenance)


# ---------------------------------------------------------------------------
# traversal and validation

def face_boundary(mesh: TilingMesh, face_id: int) -> list:
    """Half-edge ids of the face's boundary cycle, starting at its stored edge."""
    if face_id not in mesh.faces:
        raise UnknownFace(f"unknown face {face_id}")
    start = mesh.faces[face_id].boundary
    out, h = [start], mesh.half_edges[start].next
    while h != start:
        out.append(h)
        h = mesh.half_edges[h].next
        if len(out) > len(mesh.half_edges):
            raise OpenBoundaryWalk(f"face {face_id} does not close")
    return out


def node_star(mesh: TilingMesh, node_id: int) -> list:
    """Outgoing half-edges of a node in clockwise order."""
    if node_id not in mesh.nodes:
        raise UnknownNode(f"unknown node {node_id}")
    return list(mesh.nodes[node_id].star)


def euler_characteristic(mesh: TilingMesh) -> int:
    """``V - E + F`` with F counting interior faces only.

    On the sphere and torus every face is interior.  For a plane patch the
    outer face is left out, so a disk-shaped patch reports 1.
    """
    return mesh.V - mesh.E + mesh.F


@dataclass
class Violation:
    kind: str
    detail: str
    ids: tuple = ()


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {v.kind for v in self.violations}


def validate_normality(mesh: TilingMesh) -> ValidationReport:
    """Report (never raise) violations of normality.

    Checks: degenerate or zero-length arcs, nodes of degree < 2, pinched
    face boundaries (a node visited twice), faces glued to themselves, and
    pairs of faces whose common boundary is disconnected.
    """
    rep = ValidationReport()
    if not mesh.manifold.closed:
        rep.notes.append("plane patch: outer face excluded from checks and from F")
    for a in mesh.arcs.values():
        seg = np.linalg.norm(np.diff(a.samples, axis=0), axis=1)
        if seg.sum() < 1e-12:
            rep.violations.append(Violation("degenerate_arc", f"arc {a.id} has zero length", (a.id,)))
        elif np.any(seg == 0.0):
            rep.violations.append(Violation("coincident_samples", f"arc {a.id} repeats a sample", (a.id,)))
    for n in mesh.nodes.values():
        if len(n.star) < 2:
            rep.violations.append(Violation("low_degree", f"node {n.id} has degree {len(n.star)}", (n.id,)))

    interior = set(mesh.interior_face_ids)
    node_faces = {}
    for fid in mesh.interior_face_ids:
        walk = face_boundary(mesh, fid)
        origins = [mesh.half_edges[h].origin for h in walk]
        if len(set(origins)) != len(origins):
            rep.violations.append(Violation("pinched_face", f"face {fid} revisits a node", (fid,)))
        for nid in set(origins):
            node_faces.setdefault(nid, set()).add(fid)

    shared_arcs = {}
    for a in mesh.arcs.values():
        f1, f2 = mesh.arc_faces(a.id)
        if f1 == f2 and f1 in interior:
            rep.violations.append(Violation("self_adjacent", f"face {f1} lies on both sides of arc {a.id}", (f1, a.id)))
        elif f1 in interior and f2 in interior:
            shared_arcs.setdefault((min(f1, f2), max(f1, f2)), []).append(a)
    shared_nodes = {}
    for nid, fs in node_faces.items():
        fs = sorted(fs)
        for i in range(len(fs)):
            for j in range(i + 1, len(fs)):
                shared_nodes.setdefault((fs[i], fs[j]), set()).add(nid)
    for pair, ns in shared_nodes.items():
        parent = {n: n for n in ns}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a in shared_arcs.get(pair, ()):
            parent[find(a.start)] = find(a.end)
        if len({find(n) for n in ns}) > 1:
            rep.violations.append(Violation(
                "disconnected_intersection",
                f"faces {pair[0]} and {pair[1]} meet in a disconnected set", pair))
    return rep
