from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from normtile import deregularize as dr
from normtile import generators as gen
from normtile import geometry as geo
from normtile import metrics as met
from normtile.errors import GeometryCollision, InfeasibleTarget, TilingError, ZeroCornerDegree
from normtile.mesh import validate_normality


def comb_table(mesh):
    return (sorted((n.id, n.star) for n in mesh.nodes.values()),
            sorted(mesh.half_edges.items()), sorted(mesh.faces.items()),
            sorted((a.id, a.start, a.end) for a in mesh.arcs.values()))


def test_plan_sizes(torus_patterns):
    m = torus_patterns["honeycomb"]
    assert dr.plan_dereg(m, 1.0, 0).selected == ()
    half = dr.plan_dereg(m, 0.5, 0)
    assert len(half.selected) == m.V
    assert max(Counter(n for n, _ in half.selected).values()) <= 2
    full = dr.plan_dereg(m, 0.0, 0)
    assert len(full.selected) == 2 * m.V
    assert set(Counter(n for n, _ in full.selected).values()) == {2}


def test_plan_is_seeded(voronoi_small):
    a = dr.plan_dereg(voronoi_small, 0.5, 11)
    assert a == dr.plan_dereg(voronoi_small, 0.5, 11)
    assert a.selected != dr.plan_dereg(voronoi_small, 0.5, 12).selected


def test_plan_counts_existing_pairs(torus_patterns):
    brick = torus_patterns["brick"]
    assert dr.plan_dereg(brick, 0.5, 0).selected == ()
    assert len(dr.plan_dereg(brick, 0.0, 0).selected) == brick.V
    with pytest.raises(ValueError):
        dr.plan_dereg(brick, 0.75, 0)


def test_greedy_prefers_straight_pairs():
    m = gen.gen_voronoi_torus(40, 2)
    plan = dr.plan_dereg(m, 0.75, 0, greedy=True)
    chosen = [geo.classify_pair(m, n, j).angle for n, j in plan.selected]
    rest = [p.angle for n in m.nodes for p in geo.node_pairs(m, n)
            if (n, p.pair_index) not in set(plan.selected)]
    assert min(chosen) >= np.percentile(rest, 50)


def test_infeasible_on_small_patch():
    patch = gen.generate(gen.PatternSpec("honeycomb", 2, 2, manifold="plane"))
    with pytest.raises(InfeasibleTarget):
        dr.plan_dereg(patch, 0.0, 0)


def test_plan_validation():
    with pytest.raises(ValueError):
        dr.DeregPlan(1.5, 0)
    with pytest.raises(ValueError):
        dr.DeregPlan(0.5, 0, blend_fraction=0.5)


def test_sphere_not_supported(platonic_meshes):
    with pytest.raises(TilingError):
        dr.plan_dereg(platonic_meshes["cube"], 0.5, 0)


def test_empty_plan_is_identity(torus_patterns):
    m = torus_patterns["honeycomb"]
    out = dr.apply_dereg(m, dr.plan_dereg(m, 1.0, 0))
    assert all(out.arcs[k] is m.arcs[k] for k in m.arcs)


@pytest.mark.parametrize("family,expected", [("honeycomb", (1, 2)), ("square_grid", (2, 2)),
                                             ("brick", (1, 2))])
def test_full_deregularization(torus_patterns, family, expected):
    m = torus_patterns[family]
    plan = dr.plan_dereg(m, 0.0, 4)
    out = dr.apply_dereg(m, plan)
    after = met.compute_metrics(out)
    assert after.rho == 0.0
    assert (after.n_star_bar, after.v_star_bar) == pytest.approx(expected, abs=1e-12)
    assert comb_table(out) == comb_table(m)
    assert validate_normality(out).ok
    for nid, j in plan.selected:
        star = out.nodes[nid].star
        t1 = geo.outgoing_chart_tangent(out, star[j])
        t2 = geo.outgoing_chart_tangent(out, star[(j + 1) % len(star)])
        assert float(t1 @ t2) + 1.0 <= 1e-12


def test_existing_smooth_pairs_survive(torus_patterns):
    m = torus_patterns["brick"]
    before = {(n, p.pair_index) for n in m.nodes for p in geo.node_pairs(m, n) if p.degenerate}
    out = dr.apply_dereg(m, dr.plan_dereg(m, 0.0, 1))
    after = {(n, p.pair_index) for n in out.nodes for p in geo.node_pairs(out, n) if p.degenerate}
    assert before <= after


def _segments_cross(mesh):
    """Brute-force crossing test over all arc samples of a plane patch."""
    segs, owner = [], []
    for a in mesh.arcs.values():
        s = a.samples
        segs.extend(zip(s[:-1], s[1:]))
        owner.extend([a.id] * (len(s) - 1))
    p0 = np.array([s[0] for s in segs])
    p1 = np.array([s[1] for s in segs])
    owner = np.array(owner)

    def orient(a, b, c):
        return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])

    for i in range(len(segs)):
        o1 = orient(p0[i], p1[i], p0)
        o2 = orient(p0[i], p1[i], p1)
        o3 = orient(p0, p1, p0[i])
        o4 = orient(p0, p1, p1[i])
        hit = (o1 * o2 < -1e-18) & (o3 * o4 < -1e-18) & (owner != owner[i])
        if hit.any():
            return True
    return False


def test_no_crossings_after_bending():
    patch = gen.generate(gen.PatternSpec("honeycomb", 4, 4, manifold="plane"))
    out = dr.apply_dereg(patch, dr.plan_dereg(patch, 0.5, 3))
    assert validate_normality(out).ok
    assert not _segments_cross(out)
    after = met.compute_metrics(out)
    assert after.sum_r == after.sum_q + after.sum_q_outer


def test_collision_retries_then_fails(torus_patterns, monkeypatch):
    calls = []

    def always(*args, **kwargs):
        calls.append(args[-1])
        return True

    monkeypatch.setattr(dr, "_collides", always)
    m = torus_patterns["honeycomb"]
    with pytest.raises(GeometryCollision):
        dr.apply_dereg(m, dr.plan_dereg(m, 0.5, 0))
    radii = sorted(set(calls), reverse=True)
    assert len(radii) == dr.MAX_HALVINGS + 1
    assert radii[0] / radii[-1] == pytest.approx(2 ** dr.MAX_HALVINGS)


def test_predicted_degrees():
    assert dr.predicted_degrees(3, 6, 0.5) == (2, 4)
    assert dr.predicted_degrees(3, 6, 0.0) == (1, 2)
    assert dr.predicted_degrees(4.2, 5.7, 1.0) == (4.2, 5.7)


def test_verify_ray(torus_patterns):
    hc = met.compute_metrics(torus_patterns["honeycomb"])
    for fam in ("brick", "rooftile", "honeycomb"):
        out = dr.verify_ray(hc, met.compute_metrics(torus_patterns[fam]))
        assert out["max_deviation"] == 0.0


def test_ray_needs_corners(torus_patterns):
    m = met.compute_metrics(torus_patterns["honeycomb"])
    flat = met.TilingMetrics(m.V, m.E, m.F, m.chi, True, m.sum_n, m.sum_v, m.sum_n, m.sum_n,
                             0, {}, {})
    with pytest.raises(ZeroCornerDegree):
        dr.verify_ray(m, flat)


def test_monotone_sweep():
    m = gen.gen_voronoi_torus(60, 8)
    before = met.compute_metrics(m)
    values = []
    for rho in (1.0, 0.75, 0.5, 0.25, 0.0):
        after = met.compute_metrics(dr.apply_dereg(m, dr.plan_dereg(m, rho, 8)))
        values.append(after.v_star_bar)
        assert after.v_star_bar >= after.bound_rhs - 1e-9
    assert values == sorted(values, reverse=True) and len(set(values)) == 5
    assert values[-1] - 2 == pytest.approx(before.v_bar * (before.n_bar - 2) / before.n_bar - 2, abs=1e-12)


@settings(max_examples=8, deadline=None)
@given(n=st.integers(12, 50), seed=st.integers(0, 500), rho=st.sampled_from([0.0, 0.2, 0.5, 0.9]))
def test_prediction_property(n, seed, rho):
    m = gen.gen_voronoi_torus(n, seed)
    before = met.compute_metrics(m)
    after = met.compute_metrics(dr.apply_dereg(m, dr.plan_dereg(m, rho, seed)))
    ns, vs = dr.predicted_degrees(before.n_bar, before.v_bar, after.rho)
    assert abs(after.n_star_bar - ns) <= 1e-9
    assert abs(after.v_star_bar - vs) <= 1e-9
    assert (after.V, after.E, after.F) == (before.V, before.E, before.F)
