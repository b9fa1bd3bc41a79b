"""
Where the classic patterns sit in the degree plane
==================================================

Every tiling gives two points: (mean node degree, mean cell degree) counting
all arcs, and the same pair counting only sharp corners.  Regular patterns
land on the curve v = 2n / (n - 2); their corner points slide down a ray
through the origin as smooth vertices appear.
"""
import sys
from pathlib import Path

from normtile import generators as gen
from normtile import io
from normtile import metrics as met

out = Path(sys.argv[1] if len(sys.argv) > 1 else "symbolic_plane")
out.mkdir(exist_ok=True)

points = []
for family in ("honeycomb", "square_grid", "brick", "rooftile"):
    m = met.compute_metrics(gen.generate(gen.PatternSpec(family, 8, 8)))
    comb = met.symbolic_points(m, "combinatorial", family)
    corner = met.symbolic_points(m, "corner", family)
    points += [comb, corner]
    print(f"{family:12s} (n, v) = ({comb.x:g}, {comb.y:g})   corners (n*, v*) = "
          f"({corner.x:g}, {corner.y:g})   rho = {m.rho:g}")

# the cube sits off the curve: a finite tiling of the sphere
cube = met.compute_metrics(gen.platonic("cube"))
points.append(met.symbolic_points(cube, "combinatorial", "cube"))
print(f"cube harmonic degree {cube.h_bar:.6f} (12/7 = {12 / 7:.6f})")

io.emit_symbolic_csv(points, out / "points.csv")
io.emit_symbolic_svg(points, ["h2_hyperbola", "origin_rays"], out / "points.svg")
print("wrote", out / "points.csv", "and", out / "points.svg")
