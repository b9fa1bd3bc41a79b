from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from normtile import generators as gen
from normtile import metrics as met
from normtile.errors import BallExceedsPatch, SingularDenominator, TilingError

# V, E, F of the regular solids (standard tables)
SOLIDS = {
    "tetrahedron": (4, 6, 4),
    "cube": (8, 12, 6),
    "octahedron": (6, 12, 8),
    "dodecahedron": (20, 30, 12),
    "icosahedron": (12, 30, 20),
}

# Figure-1 patterns: (n, v, n*, v*, rho)
GOLDEN = {
    "honeycomb": (3, 6, 3, 6, 1),
    "brick": (3, 6, 2, 4, Fraction(1, 2)),
    "rooftile": (3, 6, 1, 2, 0),
}


@pytest.mark.parametrize("family", sorted(GOLDEN))
def test_golden_table(torus_patterns, family):
    m = met.compute_metrics(torus_patterns[family])
    n, v, ns, vs, rho = GOLDEN[family]
    assert (m.n_bar, m.v_bar, m.n_star_bar, m.v_star_bar) == (n, v, ns, vs)
    assert m.rho == rho
    assert m.sum_r == m.sum_q
    assert m.h_bar == 2.0 == m.h_bar_euler


def test_per_node_rows(torus_patterns):
    m = met.compute_metrics(torus_patterns["brick"])
    assert set(m.per_node.values()) == {(3, 1, 2)}
    assert set(m.per_cell.values()) == {(6, 2, 4)}


@pytest.mark.parametrize("solid", sorted(SOLIDS))
def test_platonic_counts_and_identity(platonic_meshes, solid):
    mesh = platonic_meshes[solid]
    V, E, F = SOLIDS[solid]
    m = met.compute_metrics(mesh)
    assert (m.V, m.E, m.F, m.chi) == (V, E, F, 2)
    assert m.sum_r == 0
    assert abs(m.h_bar - 2 * E / (E + 2)) <= 1e-12


def test_cube_harmonic_degree(platonic_meshes):
    m = met.compute_metrics(platonic_meshes["cube"])
    assert m.h_bar == pytest.approx(12 / 7, abs=1e-15)


@pytest.mark.parametrize("solid", sorted(SOLIDS))
def test_bound_matches_euler_route(platonic_meshes, solid):
    # the bound equals (2E - 2V) / F, the fully deregularized corner degree
    V, E, F = SOLIDS[solid]
    rhs = met.corner_degree_bound(E, 2, 2 * E / V)
    assert rhs == pytest.approx((2 * E - 2 * V) / F, abs=1e-12)
    chk = met.check_corner_degree_bound(platonic_meshes[solid])
    assert chk.holds
    assert chk.margin == pytest.approx(2 * E / F - (2 * E - 2 * V) / F)


def test_bound_examples():
    assert met.corner_degree_bound(6, 2, 3.0) == pytest.approx(1.0)
    assert met.corner_degree_bound(12, 2, 3.0) == pytest.approx(4 / 3)
    assert met.corner_degree_bound(48, 0, 3.0) == 2.0
    with pytest.raises(SingularDenominator):
        met.corner_degree_bound(10, 0, 2.0)


def test_harmonic_degree_of_regular_patterns():
    for n, v in [(3, 6), (4, 4), (6, 3)]:
        assert met.harmonic_degree(n, v) == 2.0
    with pytest.raises(ValueError):
        met.harmonic_degree(0, 3)


def test_plane_patch_statistics():
    mesh = gen.generate(gen.PatternSpec("honeycomb", 6, 6, manifold="plane"))
    m = met.compute_metrics(mesh)
    assert not m.closed
    assert m.bound_rhs is None and m.h_bar_euler is None
    assert m.V - m.E + m.F == 1
    assert m.sum_r == m.sum_q + m.sum_q_outer
    assert m.v_bar == 6.0
    assert m.n_bar < 3.0
    with pytest.raises(TilingError):
        met.check_corner_degree_bound(mesh)


def test_symbolic_points(torus_patterns):
    m = met.compute_metrics(torus_patterns["brick"])
    p = met.symbolic_points(m, "combinatorial", "brick")
    q = met.symbolic_points(m, "corner", "brick")
    assert (p.x, p.y, q.x, q.y) == (3, 6, 2, 4)
    with pytest.raises(ValueError):
        met.symbolic_points(m, "other")


def test_ball_sweep_guards(torus_patterns):
    with pytest.raises(TilingError):
        met.ball_sweep(torus_patterns["honeycomb"], (0, 0), [1.0])
    patch = gen.generate(gen.PatternSpec("honeycomb", 8, 8, manifold="plane"))
    c = (7 * np.sqrt(3) / 2, 7 * 1.5 / 2)
    with pytest.raises(BallExceedsPatch):
        met.ball_sweep(patch, c, [1.0, 50.0])
    with pytest.raises(ValueError):
        met.ball_sweep(patch, c, [2.0, 1.0])
    with pytest.raises(ValueError):
        met.ball_sweep(patch, c, [1.0], counting_policy="area")


def test_ball_sweep_counts():
    patch = gen.generate(gen.PatternSpec("honeycomb", 16, 16, manifold="plane"))
    c = (15 * np.sqrt(3) / 2, 15 * 1.5 / 2)
    rows = met.ball_sweep(patch, c, [2.0, 4.0, 6.0])
    for r in rows:
        # a finite union of hexagons is a disk: V - E + F = 1
        assert r.V - r.E + r.F == 1
        assert r.v_bar == 6.0
        assert r.n_bar == pytest.approx(2 * r.E / r.V)
    assert [r.F for r in rows] == sorted(r.F for r in rows)
    inner = met.ball_sweep(patch, c, [4.0], counting_policy="vertices")[0]
    assert inner.F <= rows[1].F


@settings(max_examples=10, deadline=None)
@given(n=st.integers(10, 60), seed=st.integers(0, 1000))
def test_voronoi_statistics(n, seed):
    m = met.compute_metrics(gen.gen_voronoi_torus(n, seed))
    assert m.n_bar == 3.0
    assert m.v_bar == 6.0
    assert m.rho == 1.0
    assert m.h_bar == pytest.approx(m.h_bar_euler, abs=1e-12)
    assert m.v_star_bar >= m.bound_rhs - 1e-9
