"""Reading and writing tilings, symbolic-plane tables and plots.

A tiling document is JSON with one record per line, so a parse error can
name the record it happened in.  Floats are written with ``repr``, the
shortest string that reads back to the same double, which makes
``load(save(m))`` bit-exact.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .curves import curve_from_record
from .errors import IoError, ParseError, VersionMismatch
from .mesh import Arc, ManifoldContext, Node, TilingMesh, build_mesh, face_boundary
from .metrics import SymbolicPoint

FORMAT_VERSION = "tiling/1"
SECTIONS = ("nodes", "arcs", "faces")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False,
                      allow_nan=False)


def _floats(a) -> list:
    return [float(x) if np.ndim(x) == 0 else _floats(x) for x in a]


def mesh_to_records(mesh: TilingMesh) -> dict:
    nodes = [{"id": n.id, "position": _floats(n.position), "star": list(n.star)}
             for n in sorted(mesh.nodes.values(), key=lambda n: n.id)]
    arcs = []
    for a in sorted(mesh.arcs.values(), key=lambda a: a.id):
        rec = {"id": a.id, "start": a.start, "end": a.end, "samples": _floats(a.samples),
               "shift_start": list(a.shift_start), "shift_end": list(a.shift_end)}
        if a.half_tangent_start is not None:
            rec["half_tangent_start"] = _floats(a.half_tangent_start)
        if a.half_tangent_end is not None:
            rec["half_tangent_end"] = _floats(a.half_tangent_end)
        if a.curve is not None:
            rec["curve"] = a.curve.to_record()
        arcs.append(rec)
    faces = []
    for fid in mesh.interior_face_ids:
        walk = [[mesh.half_edges[h].arc, 1 if mesh.half_edges[h].forward else -1]
                for h in face_boundary(mesh, fid)]
        faces.append({"id": fid, "walk": walk})
    return {"format_version": FORMAT_VERSION, "manifold": mesh.manifold.to_record(),
            "provenance": mesh.provenance, "nodes": nodes, "arcs": arcs, "faces": faces}


def dumps(mesh: TilingMesh) -> str:
    doc = mesh_to_records(mesh)
    lines = ["{",
             f'"format_version":{_dump(doc["format_version"])},',
             f'"manifold":{_dump(doc["manifold"])},',
             f'"provenance":{_dump(doc["provenance"])},']
    for k, sec in enumerate(SECTIONS):
        lines.append(f'"{sec}":[')
        recs = doc[sec]
        lines.extend(_dump(r) + ("," if i + 1 < len(recs) else "") for i, r in enumerate(recs))
        lines.append("]" + ("," if k + 1 < len(SECTIONS) else ""))
    lines.append("}")
    return "\n".join(lines) + "\n"


def save(mesh: TilingMesh, path) -> None:
    try:
        Path(path).write_text(dumps(mesh), encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


def _locate(text: str, lineno: int) -> str:
    """Describe which record a 1-based line number falls in."""
    section, first = None, 0
    for i, line in enumerate(text.splitlines()[:lineno], start=1):
        for sec in SECTIONS:
            if line.startswith(f'"{sec}":['):
                section, first = sec, i
    if section is None or lineno == first:
        return "document header"
    return f"{section} record {lineno - first - 1}"


def _first_bad_record(text: str) -> str | None:
    """The decoder often notices a damaged record only on the next line."""
    section, first = None, 0
    for i, line in enumerate(text.splitlines(), start=1):
        if any(line.startswith(f'"{sec}":[') for sec in SECTIONS):
            section, first = line[1:line.index('"', 1)], i
            continue
        if section is None or line.startswith("]"):
            continue
        try:
            json.loads(line.rstrip(","))
        except json.JSONDecodeError:
            return f"{section} record {i - first - 1}"
    return None


def loads(text: str, source: str = "<string>") -> TilingMesh:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        where = _first_bad_record(text) or _locate(text, e.lineno)
        raise ParseError(f"{source}:{e.lineno}:{e.colno}: {e.msg} (in {where})") from e
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{source}: expected {FORMAT_VERSION!r}, found {version!r}")
    return mesh_from_records(doc, source)


def mesh_from_records(doc: dict, source: str = "<document>") -> TilingMesh:
    def field(rec, name, what):
        try:
            return rec[name]
        except (KeyError, TypeError):
            raise ParseError(f"{source}: {what}: missing field {name!r}") from None

    try:
        manifold = ManifoldContext.from_record(field(doc, "manifold", "header"))
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{source}: bad manifold record: {e}") from e
    positions, stars, arcs, walks = {}, {}, [], {}
    for k, rec in enumerate(field(doc, "nodes", "header")):
        what = f"nodes record {k}"
        nid = int(field(rec, "id", what))
        positions[nid] = np.array(field(rec, "position", what), dtype=float)
        if "star" in rec:
            stars[nid] = tuple(int(h) for h in rec["star"])
    for k, rec in enumerate(field(doc, "arcs", "header")):
        what = f"arcs record {k}"
        try:
            curve = curve_from_record(rec["curve"]) if rec.get("curve") else None
            ht0 = rec.get("half_tangent_start")
            ht1 = rec.get("half_tangent_end")
            arcs.append(Arc(int(field(rec, "id", what)), int(field(rec, "start", what)),
                            int(field(rec, "end", what)),
                            np.array(field(rec, "samples", what), dtype=float),
                            None if ht0 is None else np.array(ht0, dtype=float),
                            None if ht1 is None else np.array(ht1, dtype=float),
                            curve, tuple(rec.get("shift_start", (0, 0))),
                            tuple(rec.get("shift_end", (0, 0)))))
        except ParseError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"{source}: {what}: {e}") from e
    for k, rec in enumerate(field(doc, "faces", "header")):
        what = f"faces record {k}"
        try:
            walks[int(field(rec, "id", what))] = [(int(a), int(o)) for a, o in field(rec, "walk", what)]
        except (TypeError, ValueError) as e:
            raise ParseError(f"{source}: {what}: {e}") from e
    mesh = build_mesh(positions, arcs, walks, manifold, str(doc.get("provenance", "")))
    return _restore_star_rotation(mesh, stars)


def _restore_star_rotation(mesh: TilingMesh, stars: dict) -> TilingMesh:
    """Keep the saved starting half-edge of each star (the cyclic order is recomputed)."""
    nodes, changed = dict(mesh.nodes), False
    for nid, saved in stars.items():
        star = mesh.nodes[nid].star
        if saved == star or len(saved) != len(star) or not saved:
            continue
        if saved[0] not in star:
            raise ParseError(f"node {nid}: saved star does not match its arcs")
        j = star.index(saved[0])
        rotated = star[j:] + star[:j]
        if rotated != saved:
            raise ParseError(f"node {nid}: saved star order disagrees with the geometry")
        nodes[nid] = Node(nid, mesh.nodes[nid].position, rotated)
        changed = True
    if not changed:
        return mesh
    return TilingMesh(nodes, mesh.arcs, mesh.half_edges, mesh.faces, mesh.manifold,
                      mesh.provenance)


def load(path) -> TilingMesh:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    return loads(text, str(path))


# ---------------------------------------------------------------------------
# symbolic plane

CSV_HEADER = ("label", "kind", "x", "y")


def _sorted_points(points: Iterable[SymbolicPoint]) -> list:
    return sorted(points, key=lambda p: (p.label, p.kind, p.x, p.y))


def emit_symbolic_csv(points: Iterable[SymbolicPoint], path) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for p in _sorted_points(points):
                w.writerow([p.label, p.kind, repr(float(p.x)), repr(float(p.y))])
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


def read_symbolic_csv(path) -> list:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    out = []
    for k, row in enumerate(rows, start=2):
        try:
            out.append(SymbolicPoint(float(row["x"]), float(row["y"]), row["kind"], row["label"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"{path}:{k}: bad symbolic point row") from e
    return out


class PlotFrame:
    """Fixed viewport mapping data (n, v) to SVG pixels, y axis up."""

    def __init__(self, xmax: float, ymax: float, size: int = 480, margin: int = 56):
        self.xmax, self.ymax = xmax, ymax
        self.size, self.margin = size, margin
        self.span = size - 2 * margin

    @classmethod
    def for_points(cls, points: Sequence[SymbolicPoint]) -> "PlotFrame":
        top = max([8.0] + [math.ceil(max(p.x, p.y)) + 1.0 for p in points])
        return cls(top, top)

    def px(self, x: float, y: float) -> tuple:
        return (self.margin + x / self.xmax * self.span,
                self.size - self.margin - y / self.ymax * self.span)


def h2_curve(frame: PlotFrame, n_points: int = 600) -> list:
    """Pixel polyline of ``v = 2n / (n - 2)`` inside the frame."""
    lo = 2.0 + 2.0 * 2.0 / (frame.ymax - 2.0)  # where v reaches the top edge
    out = []
    for k in range(n_points):
        # denser near the pole, where the curve bends most
        n = lo + (frame.xmax - lo) * (k / (n_points - 1)) ** 2
        out.append(frame.px(n, 2 * n / (n - 2)))
    return out


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def emit_symbolic_svg(points: Sequence[SymbolicPoint], overlays: Iterable[str] = (), path=None) -> str:
    """Scatter plot of symbolic points with optional overlays.

    ``overlays`` may contain ``"h2_hyperbola"`` (the locus of harmonic
    degree 2) and ``"origin_rays"`` (a ray from the origin through each
    combinatorial point that has a corner point with the same label).
    Returns the SVG text and writes it to ``path`` when given.
    """
    overlays = set(overlays)
    unknown = overlays - {"h2_hyperbola", "origin_rays"}
    if unknown:
        raise ValueError(f"unknown overlays {sorted(unknown)}")
    pts = _sorted_points(points)
    frame = PlotFrame.for_points(pts)
    corner_only = bool(pts) and all(p.kind == "corner" for p in pts)
    star = "̅*" if corner_only else "̅"
    x0, y0 = frame.px(0, 0)
    x1, y1 = frame.px(frame.xmax, frame.ymax)
    s = frame.size
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">',
           f'<rect x="0" y="0" width="{s}" height="{s}" fill="white"/>',
           f'<line class="axis" x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y0)}" stroke="black"/>',
           f'<line class="axis" x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(y1)}" stroke="black"/>']
    for k in range(int(frame.xmax) + 1):
        tx, ty = frame.px(k, 0)
        out.append(f'<text x="{_fmt(tx)}" y="{_fmt(ty + 16)}" font-size="10" text-anchor="middle">{k}</text>')
        tx, ty = frame.px(0, k)
        out.append(f'<text x="{_fmt(tx - 8)}" y="{_fmt(ty + 3)}" font-size="10" text-anchor="end">{k}</text>')
    out.append(f'<text class="xlabel" x="{_fmt((x0 + x1) / 2)}" y="{_fmt(s - 12)}" '
               f'font-size="14" text-anchor="middle">n{star}</text>')
    out.append(f'<text class="ylabel" x="14" y="{_fmt((y0 + y1) / 2)}" font-size="14" '
               f'text-anchor="middle">v{star}</text>')
    if "h2_hyperbola" in overlays:
        poly = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in h2_curve(frame))
        out.append(f'<polyline class="h2" points="{poly}" fill="none" stroke="gray"/>')
    if "origin_rays" in overlays:
        corner_labels = {p.label for p in pts if p.kind == "corner"}
        for p in pts:
            if p.kind != "combinatorial" or p.label not in corner_labels or p.x <= 0 and p.y <= 0:
                continue
            t = min(frame.xmax / p.x if p.x > 0 else math.inf,
                    frame.ymax / p.y if p.y > 0 else math.inf)
            ex, ey = frame.px(p.x * t, p.y * t)
            out.append(f'<line class="ray" data-label="{p.label}" x1="{_fmt(x0)}" y1="{_fmt(y0)}" '
                       f'x2="{_fmt(ex)}" y2="{_fmt(ey)}" stroke="gray" stroke-dasharray="4 3"/>')
    for p in pts:
        cx, cy = frame.px(p.x, p.y)
        fill = "black" if p.kind == "combinatorial" else "white"
        out.append(f'<circle class="{p.kind}" data-label="{p.label}" cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
                   f'r="4" fill="{fill}" stroke="black"/>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as e:
            raise IoError(f"cannot write {path}: {e}") from e
    return text
