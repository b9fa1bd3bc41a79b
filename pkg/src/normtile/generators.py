"""Pattern families with exact geometry.

Periodic families (honeycomb, brick, rooftile, square grid) are emitted as
counter-clockwise face boundaries and merged into a mesh on either a flat
torus or a finite plane patch.  ``rows`` and ``cols`` count cells.

The roof-tile pattern is a running bond whose vertical joints are
semicircles leaving both of their end nodes horizontally.  Every node then
has one joint tangent to one wall edge and antiparallel to the other, so
both wall-joint pairs are degenerate and each cell keeps only its two
cusps as corners.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, Voronoi

from .curves import CircularArc, GreatCircleArc, Segment
from .errors import InvalidSpec, OutOfDomain, SeedCollision
from .mesh import ManifoldContext, TilingMesh, mesh_from_face_curves

FAMILIES = ("honeycomb", "brick", "rooftile", "square_grid", "platonic",
            "voronoi_torus", "monohedral_demo")
PLATONIC = ("tetrahedron", "cube", "octahedron", "dodecahedron", "icosahedron")

SQ3 = math.sqrt(3.0)


@dataclass(frozen=True)
class PatternSpec:
    family: str
    rows: int = 4
    cols: int = 4
    manifold: str = "torus"  # "torus" | "plane" | "sphere"
    edge_length: float = 1.0
    kind: str | None = None  # platonic solid or monohedral demo kind
    n_seeds: int = 20
    rng_seed: int = 0


def generate(spec: PatternSpec) -> TilingMesh:
    """Build the mesh described by ``spec``."""
    f = spec.family
    if f not in FAMILIES:
        raise InvalidSpec(f"unknown family {f!r}")
    if f == "platonic":
        return platonic(spec.kind or "cube")
    if f == "voronoi_torus":
        return gen_voronoi_torus(spec.n_seeds, spec.rng_seed)
    if f == "monohedral_demo":
        return gen_monohedral_demo(spec.kind or "square", spec.rows, spec.cols)
    if spec.rows < 1 or spec.cols < 1:
        raise InvalidSpec("rows and cols must be >= 1")
    if spec.manifold not in ("torus", "plane"):
        raise InvalidSpec(f"{f} lives on a torus or plane patch, not {spec.manifold!r}")
    build = {"honeycomb": honeycomb, "brick": brick, "rooftile": rooftile,
             "square_grid": square_grid}[f]
    return build(spec.rows, spec.cols, spec.manifold, spec.edge_length)


def _finish(faces, rows, cols, manifold, period, name, samples=None) -> TilingMesh:
    if manifold == "torus":
        ctx = ManifoldContext.flat_torus(*period)
    else:
        ctx = ManifoldContext.plane_patch()
    prov = f"{name} rows={rows} cols={cols} manifold={manifold}"
    return mesh_from_face_curves(faces, ctx, samples=samples, provenance=prov)


def _polygon(pts):
    return [Segment(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]


def _need_even_rows(rows, manifold, name):
    if manifold == "torus" and rows % 2:
        raise InvalidSpec(f"{name} on a torus needs an even number of rows")


def honeycomb(rows: int, cols: int, manifold: str = "torus", edge: float = 1.0) -> TilingMesh:
    """Pointy-top hexagons; row ``j`` is shifted by half a cell when odd."""
    _need_even_rows(rows, manifold, "honeycomb")
    h = SQ3 / 2 * edge
    corners = [(0.0, edge), (-h, edge / 2), (-h, -edge / 2), (0.0, -edge),
               (h, -edge / 2), (h, edge / 2)]
    faces = []
    for j in range(rows):
        for i in range(cols):
            cx, cy = SQ3 * edge * i + (j % 2) * h, 1.5 * edge * j
            faces.append(_polygon([np.array([cx + dx, cy + dy]) for dx, dy in corners]))
    return _finish(faces, rows, cols, manifold, (cols * SQ3 * edge, rows * 1.5 * edge), "honeycomb")


def square_grid(rows: int, cols: int, manifold: str = "torus", edge: float = 1.0) -> TilingMesh:
    faces = []
    for j in range(rows):
        for i in range(cols):
            x, y = i * edge, j * edge
            faces.append(_polygon([np.array(p) for p in
                                   ((x, y), (x + edge, y), (x + edge, y + edge), (x, y + edge))]))
    return _finish(faces, rows, cols, manifold, (cols * edge, rows * edge), "square_grid")


def _bond_cells(rows, cols, edge, joint):
    """Running-bond cells 2*edge wide, edge high; odd rows offset by edge.

    ``joint(x, y0)`` returns the curve of the vertical joint at ``x`` running
    from ``(x, y0 + edge)`` down to ``(x, y0)``.
    """
    faces = []
    for j in range(rows):
        y = j * edge
        for i in range(cols):
            x = 2 * edge * i + (j % 2) * edge
            p = [np.array(q, dtype=float) for q in
                 ((x, y), (x + edge, y), (x + 2 * edge, y),
                  (x + 2 * edge, y + edge), (x + edge, y + edge), (x, y + edge))]
            faces.append([Segment(p[0], p[1]), Segment(p[1], p[2]),
                          joint(x + 2 * edge, y).reversed(),
                          Segment(p[3], p[4]), Segment(p[4], p[5]),
                          joint(x, y)])
    return faces


def brick(rows: int, cols: int, manifold: str = "torus", edge: float = 1.0) -> TilingMesh:
    """Half-offset running bond of 2x1 rectangles (six nodes per cell)."""
    _need_even_rows(rows, manifold, "brick")
    faces = _bond_cells(rows, cols, edge,
                        lambda x, y0: Segment((x, y0 + edge), (x, y0)))
    return _finish(faces, rows, cols, manifold, (2 * cols * edge, rows * edge), "brick")


def rooftile(rows: int, cols: int, manifold: str = "torus", edge: float = 1.0,
             samples: int = 33) -> TilingMesh:
    """Running bond with semicircular joints bulging in +x."""
    _need_even_rows(rows, manifold, "rooftile")

    def joint(x, y0):
        # from the top node heading +x, clockwise to the bottom node
        return CircularArc((x, y0 + edge / 2), edge / 2, math.pi / 2, -math.pi)

    faces = _bond_cells(rows, cols, edge, joint)
    return _finish(faces, rows, cols, manifold, (2 * cols * edge, rows * edge), "rooftile",
                   samples={"circular_arc": samples})


def gen_monohedral_demo(kind: str = "square", rows: int = 4, cols: int = 4) -> TilingMesh:
    """Torus tilings by congruent cells: ``square``, ``brick_rect``, ``rooftile_curved``."""
    if kind == "square":
        return square_grid(rows, cols, "torus")
    if kind == "brick_rect":
        return brick(rows, cols, "torus")
    if kind == "rooftile_curved":
        return rooftile(rows, cols, "torus")
    raise InvalidSpec(f"unknown monohedral demo {kind!r}")


# ---------------------------------------------------------------------------
# Voronoi on the flat torus

def voronoi_torus_mesh(seeds, period: float, provenance: str = "") -> TilingMesh:
    """Periodic Voronoi diagram of ``seeds`` in the square torus ``[0, period)^2``."""
    seeds = np.mod(np.asarray(seeds, dtype=float), period)
    n = len(seeds)
    if n < 2:
        raise InvalidSpec("need at least two seeds")
    d = np.abs(seeds[:, None] - seeds[None])
    d = np.minimum(d, period - d)
    dist = np.hypot(d[..., 0], d[..., 1]) + np.eye(n) * period
    if dist.min() < 1e-9 * period:
        raise SeedCollision("two seeds coincide on the torus")
    offsets = [(0, 0)] + [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)]
    tiled = np.vstack([seeds + np.array(o) * period for o in offsets])
    vor = Voronoi(tiled)
    faces = []
    for i in range(n):
        region = vor.regions[vor.point_region[i]]
        if -1 in region or not region:
            raise InvalidSpec("unbounded Voronoi region; too few seeds for the periodic copies")
        verts = vor.vertices[region]
        ang = np.arctan2(verts[:, 1] - seeds[i, 1], verts[:, 0] - seeds[i, 0])
        verts = verts[np.argsort(ang)]
        faces.append(_polygon(list(verts)))
    ctx = ManifoldContext.flat_torus(period, period)
    return mesh_from_face_curves(faces, ctx, tol=1e-7 * max(1.0, period), provenance=provenance)


def gen_voronoi_torus(n_seeds: int, rng_seed: int = 0, max_retries: int = 8) -> TilingMesh:
    """Voronoi tiling of ``n_seeds`` uniform random seeds, unit mean cell area.

    Non-generic draws (a node of degree other than 3, from cocircular
    seeds) are retried after a 1e-9 perturbation; the provenance string
    records how many perturbations were needed.
    """
    if n_seeds < 2:
        raise InvalidSpec("n_seeds must be >= 2")
    rng = np.random.default_rng(rng_seed)
    period = math.sqrt(n_seeds)
    seeds = rng.uniform(0.0, period, size=(n_seeds, 2))
    for attempt in range(max_retries + 1):
        prov = f"voronoi_torus n_seeds={n_seeds} rng_seed={rng_seed} perturbations={attempt}"
        try:
            mesh = voronoi_torus_mesh(seeds, period, prov)
        except SeedCollision:
            mesh = None
        if mesh is not None and all(len(nd.star) == 3 for nd in mesh.nodes.values()):
            return mesh
        seeds = seeds + rng.normal(scale=1e-9, size=seeds.shape)
    raise SeedCollision(f"no generic Voronoi tiling after {max_retries} perturbations")


# ---------------------------------------------------------------------------
# Platonic solids on the sphere

def _platonic_vertices(kind):
    phi = (1 + math.sqrt(5)) / 2
    if kind == "tetrahedron":
        v = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    elif kind == "cube":
        v = [(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    elif kind == "octahedron":
        v = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    elif kind == "icosahedron":
        v = []
        for a in (-1, 1):
            for b in (-phi, phi):
                v += [(0, a, b), (a, b, 0), (b, 0, a)]
    elif kind == "dodecahedron":
        v = [(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
        for a in (-1 / phi, 1 / phi):
            for b in (-phi, phi):
                v += [(0, a, b), (a, b, 0), (b, 0, a)]
    else:
        raise InvalidSpec(f"unknown Platonic solid {kind!r}")
    v = np.array(v, dtype=float)
    return v / np.linalg.norm(v, axis=1)[:, None]


def platonic(kind: str = "cube", radius: float = 1.0) -> TilingMesh:
    """Radial projection of a Platonic solid onto the sphere (great-circle edges)."""
    verts = _platonic_vertices(kind) * radius
    hull = ConvexHull(verts)
    groups = {}
    for simplex, eq in zip(hull.simplices, hull.equations):
        key = tuple(np.round(eq[:3], 6))
        groups.setdefault(key, set()).update(int(i) for i in simplex)
    faces = []
    for key in sorted(groups):
        idx = sorted(groups[key])
        normal = np.array(key)
        pts = verts[idx]
        c = pts.mean(axis=0)
        e1 = pts[0] - c
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(normal, e1)
        ang = np.arctan2((pts - c) @ e2, (pts - c) @ e1)
        ring = [verts[idx[k]] for k in np.argsort(ang)]
        faces.append([GreatCircleArc(ring[i], ring[(i + 1) % len(ring)])
                      for i in range(len(ring))])
    return mesh_from_face_curves(faces, ManifoldContext.sphere(radius),
                                 provenance=f"platonic {kind}")


# ---------------------------------------------------------------------------
# 3D prism with saddle caps

def prism3d_surface(x: float, y: float, top: bool = True) -> float:
    """Height of the top (``+1``) or bottom (``-1``) cap of the vertex-free prism cell."""
    if abs(x) > 1 or abs(y) > 1:
        raise OutOfDomain(f"({x}, {y}) lies outside [-1, 1]^2")
    z = math.sqrt(1 - x * x) - math.sqrt(1 - y * y)
    return z + 1 if top else z - 1
