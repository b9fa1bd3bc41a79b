import csv
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from normtile import deregularize as dr
from normtile import generators as gen
from normtile import io
from normtile import metrics as met
from normtile.errors import IoError, ParseError, VersionMismatch
from normtile.metrics import SymbolicPoint

SVG = "{http://www.w3.org/2000/svg}"


def same_mesh(a, b):
    assert a.manifold == b.manifold and a.provenance == b.provenance
    assert {k: (n.star, n.position.tobytes()) for k, n in a.nodes.items()} == \
        {k: (n.star, n.position.tobytes()) for k, n in b.nodes.items()}
    assert a.half_edges == b.half_edges and a.faces == b.faces
    for k, arc in a.arcs.items():
        other = b.arcs[k]
        assert (arc.start, arc.end, arc.shift_start, arc.shift_end) == \
            (other.start, other.end, other.shift_start, other.shift_end)
        assert arc.samples.tobytes() == other.samples.tobytes()


def corpus():
    yield gen.generate(gen.PatternSpec("honeycomb", 4, 4))
    yield gen.generate(gen.PatternSpec("rooftile", 2, 3))
    yield gen.generate(gen.PatternSpec("brick", 3, 3, manifold="plane"))
    yield gen.platonic("dodecahedron")
    yield gen.gen_voronoi_torus(25, 4)
    m = gen.generate(gen.PatternSpec("honeycomb", 4, 4))
    yield dr.apply_dereg(m, dr.plan_dereg(m, 0.0, 2))


@pytest.mark.parametrize("k", range(6))
def test_round_trip(k):
    mesh = list(corpus())[k]
    text = io.dumps(mesh)
    back = io.loads(text)
    same_mesh(mesh, back)
    assert io.dumps(back) == text


def test_save_and_load(tmp_path):
    mesh = gen.platonic("cube")
    path = tmp_path / "cube.json"
    io.save(mesh, path)
    same_mesh(mesh, io.load(path))
    with pytest.raises(IoError):
        io.load(tmp_path / "missing.json")
    with pytest.raises(IoError):
        io.save(mesh, tmp_path / "no" / "such" / "dir.json")


def test_one_record_per_line():
    mesh = gen.generate(gen.PatternSpec("square_grid", 2, 2))
    lines = io.dumps(mesh).splitlines()
    assert sum(line.startswith('{"curve"') for line in lines) == mesh.E


def test_truncated_document_names_record():
    text = io.dumps(gen.generate(gen.PatternSpec("square_grid", 2, 2)))
    lines = text.splitlines()
    start = lines.index('"arcs":[')
    lines[start + 3] = lines[start + 3][:40]
    with pytest.raises(ParseError, match=r"arcs record 2"):
        io.loads("\n".join(lines))
    with pytest.raises(ParseError):
        io.loads(text[: len(text) // 2])


def test_version_and_missing_fields():
    text = io.dumps(gen.generate(gen.PatternSpec("square_grid", 2, 2)))
    with pytest.raises(VersionMismatch):
        io.loads(text.replace('"tiling/1"', '"tiling/9"'))
    doc = json.loads(text)
    del doc["arcs"][1]["samples"]
    with pytest.raises(ParseError, match="arcs record 1: missing field 'samples'"):
        io.mesh_from_records(doc)
    with pytest.raises(ParseError):
        io.loads("[1, 2]")


@settings(max_examples=5, deadline=None)
@given(n=st.integers(8, 40), seed=st.integers(0, 10_000))
def test_voronoi_round_trip(n, seed):
    mesh = gen.gen_voronoi_torus(n, seed)
    same_mesh(mesh, io.loads(io.dumps(mesh)))


# ---------------------------------------------------------------------------
# symbolic plane

def brick_points():
    m = met.compute_metrics(gen.generate(gen.PatternSpec("brick", 4, 4)))
    return [met.symbolic_points(m, "combinatorial", "brick"), met.symbolic_points(m, "corner", "brick")]


def test_csv_empty_and_rows(tmp_path):
    path = tmp_path / "pts.csv"
    io.emit_symbolic_csv([], path)
    assert path.read_text() == "label,kind,x,y\n"
    assert io.read_symbolic_csv(path) == []
    io.emit_symbolic_csv(brick_points(), path)
    rows = list(csv.reader(path.open()))
    assert rows[1:] == [["brick", "combinatorial", "3.0", "6.0"], ["brick", "corner", "2.0", "4.0"]]
    assert io.read_symbolic_csv(path) == sorted(brick_points(), key=lambda p: p.kind)


def test_csv_bad_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("label,kind,x,y\nq,corner,abc,1\n")
    with pytest.raises(ParseError, match=":2:"):
        io.read_symbolic_csv(path)


def test_regular_points_lie_on_h2():
    for fam in ("honeycomb", "square_grid"):
        m = met.compute_metrics(gen.generate(gen.PatternSpec(fam, 4, 4)))
        p = met.symbolic_points(m, "combinatorial", fam)
        assert p.x * p.y / (p.x + p.y) == 2.0


def circles(root):
    return [(c.get("class"), c.get("data-label"), float(c.get("cx")), float(c.get("cy")))
            for c in root.iter(SVG + "circle")]


def test_svg_markers_on_h2_curve():
    pts = [SymbolicPoint(3, 6, "combinatorial", "hex"), SymbolicPoint(4, 4, "combinatorial", "sq"),
           SymbolicPoint(6, 3, "combinatorial", "tri")]
    root = ET.fromstring(io.emit_symbolic_svg(pts, ["h2_hyperbola"]))
    poly = root.find(SVG + "polyline")
    xy = np.array([[float(v) for v in pair.split(",")] for pair in poly.get("points").split()])
    for _, _, cx, cy in circles(root):
        # distance from the marker centre to the polyline segments
        a, b = xy[:-1], xy[1:]
        d = b - a
        t = np.clip(((np.array([cx, cy]) - a) * d).sum(1) / (d * d).sum(1), 0, 1)
        dist = np.linalg.norm(a + t[:, None] * d - [cx, cy], axis=1).min()
        assert dist <= 1.0


def test_svg_corner_points_on_rays():
    root = ET.fromstring(io.emit_symbolic_svg(brick_points(), ["origin_rays", "h2_hyperbola"]))
    rays = {r.get("data-label"): r for r in root.iter(SVG + "line") if r.get("class") == "ray"}
    assert set(rays) == {"brick"}
    r = rays["brick"]
    x1, y1, x2, y2 = (float(r.get(k)) for k in ("x1", "y1", "x2", "y2"))
    for kind, label, cx, cy in circles(root):
        cross = (x2 - x1) * (cy - y1) - (y2 - y1) * (cx - x1)
        assert abs(cross) / math.hypot(x2 - x1, y2 - y1) <= 0.01


def test_svg_minimal_and_labels(tmp_path):
    text = io.emit_symbolic_svg([], path=tmp_path / "e.svg")
    root = ET.fromstring((tmp_path / "e.svg").read_text())
    assert root.tag == SVG + "svg" and text.endswith("</svg>\n")
    corner = ET.fromstring(io.emit_symbolic_svg([SymbolicPoint(2, 4, "corner", "b")]))
    labels = {t.get("class"): t.text for t in corner.iter(SVG + "text") if t.get("class")}
    assert labels["xlabel"].endswith("*")
    with pytest.raises(ValueError):
        io.emit_symbolic_svg([], ["sunset"])
