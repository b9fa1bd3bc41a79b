"""
Congruent cells and the two-corner minimum
==========================================

Walk the boundary of one cell in each congruent demo tiling, add up how
much the tangent turns, and split that into the smooth part and the jumps
at corners.  The total is one full turn; when the smooth part cancels, the
corners carry everything and at least two are needed.
"""
import math

from normtile import generators as gen
from normtile import monohedral as mono

for kind in ("square", "brick_rect", "rooftile_curved"):
    mesh = gen.gen_monohedral_demo(kind)
    fid = mesh.interior_face_ids[0]
    print(kind)
    for n in (32, 64, 128, 256):
        chk = mono.total_turning_check(mono.boundary_trace(mesh, fid, n))
        print(f"  {n:4d} samples/arc: total turning - 2pi = {chk.K - 2 * math.pi: .2e}   "
              f"smooth part {chk.smooth: .2e}")
    tr = mono.boundary_trace(mesh, fid, 256)
    cc = mono.corner_count(tr)
    print(f"  corners: {cc.count} (largest exterior angle {cc.max_abs_angle:.4f})")
    rep = mono.check_two_corner_minimum(mesh)
    print(f"  every cell has >= 2 corners: {rep.holds}")

# in space the minimum drops to zero: a prism cell with smoothed vertical edges
r = mono.verify_3d_construction()
print(f"prism: stacking {r.stack_residual:g}, side match {r.side_residual:g}, "
      f"worst corner tilt {r.vertex_tangent_residual:.2e} rad")
