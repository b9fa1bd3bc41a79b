"""Turn generic node pairs into smooth continuations without touching combinatorics.

Each node with selected pairs gets new target wedge angles: selected and
already degenerate wedges become pi, and the rest of the full turn is
shared among the remaining wedges in proportion to their current size.
The arcs at that node are then bent inside a small disk around the node
by rotating them in polar coordinates,

    angle(r) = angle_orig(r) + delta * (1 - g(r / R)),

where ``g`` is the smootherstep ramp.  Since every wedge at radius ``r``
is a convex combination of its old and new value, the cyclic order of the
arcs survives the bend.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import geometry as geo
from .curves import BlendedCurve
from .errors import GeometryCollision, InfeasibleTarget, TilingError, ZeroCornerDegree
from .mesh import Arc, TilingMesh
from .metrics import TilingMetrics

DENSE_SAMPLES = 48
MAX_HALVINGS = 8


@dataclass(frozen=True)
class DeregPlan:
    target_rho: float
    rng_seed: int | None
    blend_fraction: float = 0.25
    selected: tuple = ()
    greedy: bool = False

    def __post_init__(self):
        if not 0.0 <= self.target_rho <= 1.0:
            raise ValueError("target_rho must lie in [0, 1]")
        if not 0.0 < self.blend_fraction < 0.5:
            raise ValueError("blend_fraction must lie in (0, 1/2)")


def _bearing(t) -> float:
    return math.atan2(float(t[1]), float(t[0]))


def plan_dereg(mesh: TilingMesh, target_rho: float, rng_seed: int | None = 0,
               blend_fraction: float = 0.25, greedy: bool = False,
               angle_tol: float | None = None) -> DeregPlan:
    """Choose ``round(2V(1 - target_rho))`` degenerate pairs in total.

    Candidates are the generic pairs at nodes of degree at least 3 that
    still have room under the cap of two degenerate pairs per node.  By
    default they are taken in seeded random order; ``greedy`` prefers
    pairs whose angle is already closest to pi.
    """
    if mesh.manifold.kind == "sphere":
        raise TilingError("deregularization is implemented for plane and torus meshes")
    tol = geo.default_angle_tol() if angle_tol is None else angle_tol
    candidates, room, existing = [], {}, 0
    for nid in sorted(mesh.nodes):
        pairs = geo.node_pairs(mesh, nid, tol)
        r = sum(p.degenerate for p in pairs)
        existing += r
        if len(pairs) < 3:
            continue
        room[nid] = 2 - r
        candidates.extend((nid, p.pair_index, p.angle) for p in pairs if not p.degenerate)
    wanted = round(2 * mesh.V * (1 - target_rho)) - existing
    if wanted < 0:
        raise ValueError(f"target_rho {target_rho} exceeds the current regularity")
    rng = random.Random(rng_seed)
    rng.shuffle(candidates)
    if greedy:
        candidates.sort(key=lambda c: math.pi - c[2])
    chosen = []
    for nid, j, _ in candidates:
        if len(chosen) == wanted:
            break
        if room[nid] > 0:
            room[nid] -= 1
            chosen.append((nid, j))
    if len(chosen) < wanted:
        raise InfeasibleTarget(
            f"only {len(chosen)} of {wanted} pairs can be made degenerate under the per-node cap")
    return DeregPlan(target_rho, rng_seed, blend_fraction, tuple(sorted(chosen)), greedy)


def predicted_degrees(n_bar: float, v_bar: float, rho: float) -> tuple:
    """Mean corner degrees ``(n*, v*)`` expected at regularity ``rho``."""
    n_star = n_bar - 2 * (1 - rho)
    return n_star, v_bar * n_star / n_bar


def verify_ray(before: TilingMetrics, after: TilingMetrics, tol: float = 1e-9) -> dict:
    """Check that the corner point lies on the origin ray through the combinatorial point."""
    if after.sum_n - after.sum_r == 0:
        raise ZeroCornerDegree("mean corner degree is zero; the ray is undefined")
    ratio_before = before.v_bar / before.n_bar
    ratio_after = after.v_star_bar / after.n_star_bar
    dev = abs(ratio_before - ratio_after)
    if dev > tol:
        raise AssertionError(f"corner point off the ray: {ratio_before} vs {ratio_after}")
    scale = after.n_star_bar / before.n_bar
    if not 0.0 < scale <= 1.0 + tol:
        raise AssertionError("corner point is not between the origin and the combinatorial point")
    return {"ratio_before": ratio_before, "ratio_after": ratio_after, "max_deviation": dev}


# ---------------------------------------------------------------------------
# geometry

def _node_targets(mesh: TilingMesh, nid: int, chosen: set, tol: float):
    """Rotations and exact new half-tangents for the star of one node."""
    star = mesh.nodes[nid].star
    n = len(star)
    tangents = [geo.outgoing_chart_tangent(mesh, h) for h in star]
    bearings = [_bearing(t) for t in tangents]
    wedges = [(bearings[j] - bearings[(j + 1) % n]) % (2 * math.pi) for j in range(n)]
    flat = [j in chosen or geo.is_degenerate(tangents[j], tangents[(j + 1) % n], tol)
            for j in range(n)]
    rest = 2 * math.pi - math.pi * sum(flat)
    free = [j for j in range(n) if not flat[j]]
    free_sum = sum(wedges[j] for j in free)
    new = list(wedges)
    for j in range(n):
        if flat[j]:
            new[j] = math.pi
        elif free_sum > 0:
            new[j] = wedges[j] * rest / free_sum
        else:
            new[j] = rest / len(free)
    delta = [0.0] * n
    for j in range(1, n):
        delta[j] = delta[j - 1] + wedges[j - 1] - new[j - 1]
    mean = sum(delta) / n
    delta = [d - mean for d in delta]
    # chain exact tangents from a pair that is not flat so that every
    # flat pair is an exact negation
    j0 = (free[-1] + 1) % n if free else 0
    out = {}
    t = np.array([math.cos(bearings[j0] + delta[j0]), math.sin(bearings[j0] + delta[j0])])
    for k in range(n):
        j = (j0 + k) % n
        out[star[j]] = (delta[j], t)
        nxt = (j + 1) % n
        if flat[j]:
            t = -t
        elif new[j] == 0.0:
            t = t.copy()
        else:
            phi = bearings[nxt] + delta[nxt]
            t = np.array([math.cos(phi), math.sin(phi)])
    return out


def _prefix_length(pts: np.ndarray, radius: float) -> int:
    """Index of the first sample at distance >= radius from ``pts[0]``."""
    r = np.hypot(*(pts - pts[0]).T)
    out = np.nonzero(r[1:] >= radius)[0]
    return int(out[0]) + 1 if len(out) else len(pts) - 1


def _crossings(a0, a1, b0, b1) -> np.ndarray:
    """Proper crossings between every segment in (a0, a1) and every one in (b0, b1)."""
    def orient(p, q, r):
        return ((q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1])
                - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0]))
    A0, A1 = a0[:, None], a1[:, None]
    B0, B1 = b0[None], b1[None]
    o1 = orient(A0, A1, B0)
    o2 = orient(A0, A1, B1)
    o3 = orient(B0, B1, A0)
    o4 = orient(B0, B1, A1)
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    if hit.any():
        # segments meeting at a node are not crossings; lifts may be off by an ulp
        eps = 1e-9 * max(1.0, float(np.abs(a0).max()))
        touch = np.zeros_like(hit)
        for p in (A0, A1):
            for q in (B0, B1):
                touch |= np.abs(p - q).max(axis=-1) <= eps
        hit &= ~touch
    return hit


def _lift_near(pts: np.ndarray, p: np.ndarray, periods) -> np.ndarray:
    if periods is None:
        return pts
    mid = pts[len(pts) // 2]
    return pts + np.round((p - mid) / periods) * periods


def _wrap(p, periods):
    w = np.mod(p, periods)
    return np.where(w >= periods, 0.0, w)


class _SegmentSoup:
    """All arc segments of a mesh, indexed by midpoint for local crossing queries."""

    def __init__(self, arcs: dict, periods):
        ids = sorted(arcs)
        self.s0 = np.vstack([arcs[a].samples[:-1] for a in ids])
        self.s1 = np.vstack([arcs[a].samples[1:] for a in ids])
        self.ids = np.concatenate([np.full(len(arcs[a].samples) - 1, a) for a in ids])
        self.mid = (self.s0 + self.s1) / 2
        self.max_half = float(np.hypot(*(self.s1 - self.s0).T).max()) / 2
        self.periods = periods
        if periods is None:
            self.tree = cKDTree(self.mid)
        else:
            self.tree = cKDTree(_wrap(self.mid, periods), boxsize=periods)

    def near(self, center: np.ndarray, radius: float):
        c = center if self.periods is None else _wrap(center, self.periods)
        idx = np.asarray(self.tree.query_ball_point(c, radius + self.max_half), dtype=int)
        s0, s1 = self.s0[idx], self.s1[idx]
        if self.periods is not None:
            shift = np.round((center - self.mid[idx]) / self.periods) * self.periods
            s0, s1 = s0 + shift, s1 + shift
        return s0, s1, self.ids[idx]


def _collides(mesh: TilingMesh, arcs: dict, soup: _SegmentSoup, nid: int,
              bent: dict, radius: float) -> bool:
    """Do the bent pieces at ``nid`` cross any other arc?"""
    pieces, piece_ids = [], []
    for h in mesh.nodes[nid].star:
        he = mesh.half_edges[h]
        m = bent.get(h, 0)
        if m >= 1:
            pts = arcs[he.arc].samples
            pts = pts if he.forward else pts[::-1]
            pieces.append(pts[:m + 1])
            piece_ids.append(np.full(m, he.arc))
    if not pieces:
        return False
    center = pieces[0][0]
    pieces = [_lift_near(p, center, soup.periods) for p in pieces]
    a0 = np.vstack([p[:-1] for p in pieces])
    a1 = np.vstack([p[1:] for p in pieces])
    a_ids = np.concatenate(piece_ids)
    s0, s1, s_ids = soup.near(center, radius * 1.01)
    hit = _crossings(a0, a1, s0, s1)
    # a bent piece is part of its own arc; only other arcs count
    hit &= a_ids[:, None] != s_ids[None, :]
    return bool(hit.any())


def _bend(mesh: TilingMesh, plan: DeregPlan, blend_fraction: float, tol: float):
    by_node = {}
    for nid, j in plan.selected:
        by_node.setdefault(nid, set()).add(j)
    targets = {}
    for nid, chosen in by_node.items():
        if max(chosen) >= len(mesh.nodes[nid].star):
            raise ValueError(f"pair index out of range at node {nid}")
        targets.update(_node_targets(mesh, nid, chosen, tol))
    radii = {}
    for nid in by_node:
        lengths = [mesh.arcs[mesh.half_edges[h].arc].length for h in mesh.nodes[nid].star]
        radii[nid] = blend_fraction * min(lengths)
    new_arcs = dict(mesh.arcs)
    bent_counts = {}
    for aid in sorted({mesh.half_edges[h].arc for h in targets}):
        arc = mesh.arcs[aid]
        ends, tangents = [None, None], [geo.arc_half_tangent(arc, True), geo.arc_half_tangent(arc, False)]
        for k, forward in enumerate((True, False)):
            h = mesh.half_edge_for(aid, forward)
            if h in targets:
                delta, tangents[k] = targets[h]
                ends[k] = (delta, radii[mesh.half_edges[h].origin])
        base = arc.oriented_curve(True)
        curve = BlendedCurve(base, ends[0], ends[1])
        pts = curve.sample(max(DENSE_SAMPLES, len(arc.samples)))
        pts[0], pts[-1] = arc.samples[0], arc.samples[-1]
        new_arcs[aid] = Arc(aid, arc.start, arc.end, pts, tangents[0], tangents[1], curve,
                            arc.shift_start, arc.shift_end)
        for k, forward in enumerate((True, False)):
            if ends[k] is not None:
                h = mesh.half_edge_for(aid, forward)
                bent_counts[h] = _prefix_length(pts if forward else pts[::-1], ends[k][1])
    soup = _SegmentSoup(new_arcs, mesh.manifold.periods)
    for nid in sorted(by_node):
        local = {h: bent_counts.get(h, 0) for h in mesh.nodes[nid].star}
        if _collides(mesh, new_arcs, soup, nid, local, radii[nid]):
            return None, nid
    return new_arcs, None


def apply_dereg(mesh: TilingMesh, plan: DeregPlan, angle_tol: float | None = None) -> TilingMesh:
    """Bend arcs near the planned nodes so each selected pair becomes degenerate.

    Nodes, arcs, half-edges and faces keep their ids and incidences.  If a
    bent arc would cross another one, the blend radius is halved and the
    whole mesh retried, up to eight times.
    """
    if not plan.selected:
        return mesh.with_arcs(mesh.arcs)
    if mesh.manifold.kind == "sphere":
        raise TilingError("deregularization is implemented for plane and torus meshes")
    tol = geo.default_angle_tol() if angle_tol is None else angle_tol
    bf = plan.blend_fraction
    for _ in range(MAX_HALVINGS + 1):
        arcs, culprit = _bend(mesh, plan, bf, tol)
        if arcs is not None:
            tag = f"{mesh.provenance}; dereg rho={plan.target_rho} seed={plan.rng_seed}"
            return mesh.with_arcs(arcs, provenance=tag.lstrip("; "))
        bf /= 2
    raise GeometryCollision(f"bent arcs still cross near node {culprit} after {MAX_HALVINGS} halvings")
