"""Circle packing solver, layout, good embeddings, and the length metric."""

import math

import numpy as np
import pytest

from packlab.planar_graph import (
    flower_graph,
    grid_graph,
    tetrahedron_graph,
)
from packlab.packing import (
    LayoutError,
    NonConvergenceError,
    Packing,
    PackingError,
    check_good_embedding,
    embedding_volume_profile,
    layout_centers,
    length_metric,
    pack,
    pack_radii,
    pack_radii_newton,
    prepare_disk,
    read_packing,
    write_packing,
    write_packing_svg,
)
from packlab.subdivision import level_graph

TETRA_RADIUS = 2.0 / math.sqrt(3.0) - 1.0


def hexagonal_packing():
    g = flower_graph(6)
    return pack(g, removed_face=(6, 5, 4, 3, 2, 1), boundary_radius=1.0)


# -- radii ----------------------------------------------------------------------


def test_hexagonal_flower_unit_radii():
    p = hexagonal_packing()
    assert np.allclose(p.radii, 1.0, atol=1e-12)


def test_tetrahedron_closed_form():
    g = tetrahedron_graph()
    p = pack(g, removed_face=(1, 3, 2), boundary_radius=1.0)
    assert abs(p.radii[0] - TETRA_RADIUS) < 1e-6


def test_four_flower_closed_form():
    g = flower_graph(4)
    p = pack(g, removed_face=(4, 3, 2, 1), boundary_radius=1.0)
    assert abs(p.radii[0] - (math.sqrt(2.0) - 1.0)) < 1e-9


def test_newton_agrees_with_sweeps():
    g, base = level_graph("cube", 1)[0].graph, 0
    tri, removed = prepare_disk(g, base)
    bmap = {v: 1.0 for v in removed}
    r1, _, res1 = pack_radii(tri, bmap, tol=1e-11)
    r2, _, res2 = pack_radii_newton(tri, bmap, tol=1e-11)
    assert res1 <= 1e-11 and res2 <= 1e-11
    assert np.max(np.abs(r1 - r2) / r1) < 1e-9


def test_solver_determinism():
    g = level_graph("cube", 1)[0].graph
    tri, removed = prepare_disk(g, 0)
    bmap = {v: 1.0 for v in removed}
    r1 = pack_radii(tri, bmap, tol=1e-10)[0]
    r2 = pack_radii(tri, bmap, tol=1e-10)[0]
    assert np.array_equal(r1, r2)


def test_scaling_covariance_dyadic():
    # power-of-two rescaling is exact in floating point: radii, lengths,
    # angles, ratios, and distortion samples all scale or stay bit-identical
    g = flower_graph(5)
    p1 = pack(g, removed_face=(5, 4, 3, 2, 1), boundary_radius=1.0)
    p2 = pack(g, removed_face=(5, 4, 3, 2, 1), boundary_radius=4.0)
    assert np.array_equal(p2.radii, 4.0 * p1.radii)
    lm1, lm2 = length_metric(p1), length_metric(p2)
    assert np.array_equal(lm2.lengths, 4.0 * lm1.lengths)
    r1 = check_good_embedding(p1, D=2.0, eta=0.5)
    r2 = check_good_embedding(p2, D=2.0, eta=0.5)
    assert r1.max_adjacent_length_ratio == r2.max_adjacent_length_ratio
    assert r1.max_angle == r2.max_angle


def test_non_triangulation_rejected():
    g = grid_graph(3, 3)
    with pytest.raises(PackingError):
        pack_radii(g, {0: 1.0, 1: 1.0, 4: 1.0, 3: 1.0})


def test_boundary_must_be_a_face():
    g = tetrahedron_graph()
    with pytest.raises(PackingError):
        pack_radii(g, {0: 1.0, 1: 1.0})


def test_nonconvergence_carries_residual():
    g = level_graph("cube", 1)[0].graph
    tri, removed = prepare_disk(g, 0)
    with pytest.raises(NonConvergenceError) as exc:
        pack_radii(tri, {v: 1.0 for v in removed}, tol=1e-12, max_sweeps=3)
    assert exc.value.residual > 1e-12


# -- layout ---------------------------------------------------------------------


def test_two_tangent_circles_normalization():
    # smallest boundary vertex at the origin, its successor in the removed
    # cycle on the positive x-axis at distance r_u + r_v
    p = hexagonal_packing()
    assert np.allclose(p.centers[1], (0.0, 0.0))
    assert np.allclose(p.centers[6], (2.0, 0.0))


def test_hexagonal_flower_layout():
    p = hexagonal_packing()
    # outer centers on a regular hexagon of circumradius 2 around the hub
    hub = p.centers[0]
    d = [math.hypot(*(p.centers[v] - hub)) for v in range(1, 7)]
    assert np.allclose(d, 2.0, atol=1e-12)
    ring = [math.hypot(*(p.centers[v % 6 + 1] - p.centers[v])) for v in range(1, 7)]
    assert np.allclose(ring, 2.0, atol=1e-12)


def test_tetra_interior_at_centroid():
    g = tetrahedron_graph()
    p = pack(g, removed_face=(1, 3, 2), boundary_radius=1.0)
    centroid = p.centers[[1, 2, 3]].mean(axis=0)
    assert np.allclose(p.centers[0], centroid, atol=1e-9)


def test_tangency_residual_within_tolerance():
    c, base = level_graph("cube", 1)
    tri, removed = prepare_disk(c.graph, base)
    p = pack(tri, removed_face=removed, tol=1e-9)
    assert p.tangency_residual() <= 10.0 * p.tol
    assert p.angle_residual <= p.tol


def test_layout_refuses_inconsistent_radii():
    g = tetrahedron_graph()
    radii = np.array([0.4, 1.0, 1.0, 1.0])  # wrong interior radius
    with pytest.raises(LayoutError):
        layout_centers(g, radii, (1, 3, 2), tol=1e-9)


# -- length metric -----------------------------------------------------------------


def test_length_metric_flower():
    p = hexagonal_packing()
    lm = length_metric(p)
    assert np.allclose(lm.lengths, 2.0)
    assert np.allclose(lm.separation_radii, 2.0)
    d = lm.distances_from(0)
    assert d[0] == 0.0
    assert np.allclose(d[1:], 2.0)


def test_length_metric_tetra_spoke():
    g = tetrahedron_graph()
    p = pack(g, removed_face=(1, 3, 2), boundary_radius=1.0)
    lm = length_metric(p)
    spoke = 1.0 + TETRA_RADIUS
    for (u, v), l in zip(lm.edges, lm.lengths):
        expect = spoke if 0 in (u, v) else 2.0
        assert abs(l - expect) < 1e-9


def test_path_distance_shorter_through_detour():
    # d_l(u,v) <= l(u,v) for every edge, with equality on the flower spokes
    p = hexagonal_packing()
    lm = length_metric(p)
    d0 = lm.distances_from(0)
    for (u, v), l in zip(lm.edges, lm.lengths):
        assert lm.distances_from(u)[v] <= l + 1e-12


# -- good embedding ----------------------------------------------------------------


def test_flower_good_embedding():
    p = hexagonal_packing()
    rep = check_good_embedding(p, D=1.5, eta=2 * math.pi / 3 - 0.01)
    assert abs(rep.max_angle - math.pi / 3) < 1e-9
    assert abs(rep.max_adjacent_length_ratio - 1.0) < 1e-9
    assert rep.passed


def test_degenerate_straight_angle_fails():
    # a fabricated layout with a flat angle is reported as failing
    g = tetrahedron_graph()
    centers = np.array([[0.0, 0.0], [2.0, 0.0], [-2.0, 0.0], [1.0, 2.0]])
    p = Packing(graph=g, radii=np.ones(4), centers=centers, boundary=(1, 2, 3),
                removed_face=(1, 3, 2), tol=1e-9, sweeps=0, angle_residual=0.0,
                layout_mismatch=0.0)
    rep = check_good_embedding(p, D=10.0, eta=0.3)
    assert rep.max_angle >= math.pi - 1e-12
    assert not rep.passed


def test_snowball_level2_good_embedding_baseline():
    # measured regression baseline for the packed barycenter triangulation
    c, base = level_graph("cube", 2)
    tri, removed = prepare_disk(c.graph, base)
    p = pack(tri, removed_face=removed, tol=1e-9)
    rep = check_good_embedding(p, D=150.0, eta=0.3)
    assert rep.max_angle < 2.6          # measured 2.4783
    assert rep.max_adjacent_length_ratio < 150.0   # measured 105.96 (boundary circles)
    assert rep.max_adjacent_radius_ratio < 250.0   # measured 196.7
    assert rep.passed


# -- volume profile ----------------------------------------------------------------


def test_volume_profile_half_edge():
    g = flower_graph(3)
    lm = length_metric(pack(g, removed_face=(3, 2, 1), boundary_radius=1.0))
    # hand instance: mass of a partially covered edge is l^2 * fraction
    from packlab.packing import LengthMetric
    from packlab.planar_graph import path_graph

    gp = path_graph(2)
    lm1 = LengthMetric(graph=gp, edges=((0, 1),), lengths=np.array([1.0]),
                       separation_radii=np.array([1.0, 1.0]))
    rows = embedding_volume_profile(lm1, [0], [0.5])
    (_, _, mass, rx, ratio) = rows[0]
    assert abs(mass - 0.5) < 1e-12
    assert rx == 1.0


def test_volume_profile_flower_strict_ball():
    p = hexagonal_packing()
    lm = length_metric(p)
    rows = embedding_volume_profile(lm, [0], [2.0])
    (_, _, mass, rx, ratio) = rows[0]
    # spokes fully inside contribute 6 * 4; the rim is at distance exactly 2
    assert abs(mass - 24.0) < 1e-9
    assert abs(ratio - 24.0 / (2.0 * 2.0)) < 1e-9


def test_volume_profile_snowball_band(packed_snowball3):
    # sampled centers and dyadic radii on the packed level-3 triangulation:
    # the mass/(r (r v r_x)) ratios stay in one factor-50 band
    from packlab.qs import sample_trusted_vertices

    tri, base, p = packed_snowball3
    lm = length_metric(p)
    dloc = lm.distances_from(base)
    scale = np.sort(dloc)[100]
    centers = [base] + sample_trusted_vertices(tri, base, within=8, count=4, seed=2)
    rows = embedding_volume_profile(lm, centers, [scale, 2 * scale, 4 * scale, 8 * scale])
    ratios = [row[4] for row in rows]
    assert max(ratios) / min(ratios) < 50.0


# -- io -----------------------------------------------------------------------------


def test_packing_round_trip(tmp_path):
    c, base = level_graph("cube", 1)
    tri, removed = prepare_disk(c.graph, base)
    p = pack(tri, removed_face=removed, tol=1e-9)
    path = tmp_path / "p.pack"
    write_packing(p, path)
    q = read_packing(path, tri)
    assert np.array_equal(q.radii, p.radii)
    assert np.array_equal(q.centers, p.centers)
    assert q.removed_face == p.removed_face
    assert q.sweeps == p.sweeps


def test_packing_rejects_wrong_graph(tmp_path):
    g = tetrahedron_graph()
    p = pack(g, removed_face=(1, 3, 2))
    path = tmp_path / "p.pack"
    write_packing(p, path)
    with pytest.raises(PackingError):
        read_packing(path, flower_graph(6))


def test_svg_deterministic(tmp_path):
    p = hexagonal_packing()
    write_packing_svg(p, tmp_path / "a.svg")
    write_packing_svg(p, tmp_path / "b.svg")
    a = (tmp_path / "a.svg").read_bytes()
    assert a == (tmp_path / "b.svg").read_bytes()
    assert b"<circle" in a and b"<line" in a


def test_prepare_disk_wheel_keeps_hexagon():
    g = flower_graph(6)
    tri, removed = prepare_disk(g, 0)
    assert tri is g
    assert sorted(removed) == [1, 2, 3, 4, 5, 6]


def test_prepare_disk_triangulates_quadrangulation():
    c, base = level_graph("cube", 1)
    tri, removed = prepare_disk(c.graph, base)
    assert tri.vertex_count == c.vertex_count + c.face_count
    assert len(removed) == 3


def test_packing_stabilizes_near_base_point(packed_snowball3):
    # level-to-level record of the local distortion near the base point:
    # how fast finite packings stabilize is open, so the values are
    # recorded (and must stay finite and of one scale), not rate-asserted
    from packlab.qs import MetricPair, distortion

    values = {}
    for lvl in (1, 2):
        c, p = level_graph("cube", lvl)
        tri, removed = prepare_disk(c.graph, p)
        pk = pack(tri, removed_face=removed, tol=1e-9)
        mp = MetricPair.graph_vs_centers(tri, pk.centers)
        values[lvl] = distortion(mp, p, 2)
    tri, p3, pk3 = packed_snowball3
    mp = MetricPair.graph_vs_centers(tri, pk3.centers)
    values[3] = distortion(mp, p3, 2)
    print("local distortion H(p_n, 2) by level:", values)
    assert all(1.0 <= v < 50.0 for v in values.values())
    assert max(values.values()) / min(values.values()) < 5.0
