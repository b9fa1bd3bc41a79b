"""
Averages over growing balls
===========================

A finite honeycomb patch has rim nodes with only two arcs, so its mean node
degree sits below 3.  Counting only the cells inside a ball and letting the
ball grow, the rim becomes a vanishing fraction and the averages settle.
The answer does not depend on where the ball is centred.
"""
import numpy as np

from normtile import generators as gen
from normtile import metrics as met

patch = gen.generate(gen.PatternSpec("honeycomb", 72, 60, manifold="plane"))
pos = np.array([n.position for n in patch.nodes.values()])
mid = (pos.min(axis=0) + pos.max(axis=0)) / 2
radii = [5, 10, 15, 20, 25, 30, 35, 40]

for center in (mid, mid + [3.7, -2.9]):
    print("center", np.round(center, 2))
    for row in met.ball_sweep(patch, center, radii):
        print(f"  r = {row.radius:4.0f}  cells {row.F:5d}  n = {row.n_bar:.4f}  v = {row.v_bar:.4f}")
