"""Distortion, relative distance, annular quasi-convexity, Loewner scans."""

import math

import numpy as np
import pytest

from packlab.packing import LengthMetric
from packlab.planar_graph import (
    bfs_distances,
    grid_graph,
    path_graph,
)
from packlab.qs import (
    MetricPair,
    annular_qc_check,
    distortion,
    geodesic_segment,
    loewner_scan,
    qs_profile,
    relative_distance,
    sample_trusted_vertices,
    sphere_arc,
)


def graph_metric_pair(g):
    d = lambda x: bfs_distances(g, x).astype(np.float64)
    return MetricPair(g.vertex_count, d, d)


def long_edge_pair():
    g = path_graph(10)
    lengths = np.array([100.0] + [1.0] * 8)
    lm = LengthMetric(graph=g, edges=tuple(g.edges()), lengths=lengths,
                      separation_radii=np.minimum.reduce([np.r_[lengths, 1.0],
                                                           np.r_[1.0, lengths]]))
    return g, MetricPair.graph_vs_lengths(g, lm)


# -- distortion -------------------------------------------------------------------


def test_identity_metrics_distortion_one():
    g = grid_graph(9, 9)
    mp = graph_metric_pair(g)
    for x, r in ((40, 1), (40, 3), (0, 5)):
        assert distortion(mp, x, r) == 1.0


def test_scaling_invariance_exact():
    g = grid_graph(7, 7)
    d = lambda x: bfs_distances(g, x).astype(np.float64)
    mp1 = MetricPair(g.vertex_count, d, d)
    mp3 = MetricPair(g.vertex_count, d, lambda x: 3.0 * d(x))
    for x, r in ((24, 2), (24, 4), (0, 3)):
        assert distortion(mp3, x, r) == distortion(mp1, x, r) == 1.0


def test_dyadic_rescaling_bit_identical():
    # d2 -> 4 * d2 leaves every sample bit-identical (dyadic scaling is
    # exact in floating point)
    g = grid_graph(9, 9)
    pts = np.array([(v % 9, v // 9) for v in range(81)], dtype=float)
    mp1 = MetricPair.graph_vs_centers(g, pts)
    mp4 = MetricPair.graph_vs_centers(g, 4.0 * pts)
    for x in (0, 13, 40):
        for r in (1, 2, 4):
            assert distortion(mp1, x, r) == distortion(mp4, x, r)


def test_long_edge_distortion_pinned():
    g, mp = long_edge_pair()
    # x at the inner end of the 100-long edge, r = 2: sup covers the long
    # edge (100), inf is the 2-step path on unit edges
    assert distortion(mp, 1, 2) == 50.0


def test_distortion_radius_beyond_eccentricity():
    g = path_graph(5)
    mp = graph_metric_pair(g)
    with pytest.raises(ValueError):
        distortion(mp, 2, 99)


def test_qs_profile_grid_control():
    # grid graph against its unit-square embedding: H bounded by the
    # diagonal factor sqrt(2), hence <= 2, at every window
    g = grid_graph(33, 33)
    pts = np.array([(v % 33, v // 33) for v in range(33 * 33)], dtype=float)
    mp = MetricPair.graph_vs_centers(g, pts)
    centers = sample_trusted_vertices(g, 16 * 33 + 16, within=4, count=9, seed=1)
    rep = qs_profile(mp, centers, [1, 2, 4, 8])
    assert rep.h_max <= 2.0
    assert rep.excluded == 0


def test_qs_profile_flags_adversarial_metric():
    # doubling d2 on a single annulus inflates H there
    g = grid_graph(33, 33)
    x0 = 16 * 33 + 16
    base = lambda x: bfs_distances(g, x).astype(np.float64)

    def warped(x):
        d = base(x)
        return np.where((d >= 4) & (d < 8), 2.0 * d, d)

    clean = qs_profile(MetricPair(g.vertex_count, base, base), [x0], [2, 4, 8])
    warp = qs_profile(MetricPair(g.vertex_count, base, warped), [x0], [2, 4, 8])
    assert warp.h_max > clean.h_max


def test_qs_profile_trust_rule():
    g = path_graph(40)
    mp = graph_metric_pair(g)
    bdist = bfs_distances(g, [0]).astype(float)
    rep = qs_profile(mp, [2, 20], [16], boundary_distance=bdist)
    # center 2 is 2 < 16/4 steps from the boundary vertex: excluded
    assert rep.excluded == 1
    assert all(x == 20 for x, _, _ in rep.samples)


# -- relative distance ---------------------------------------------------------------


def test_relative_distance_basic():
    g = path_graph(12)
    d = lambda x: bfs_distances(g, x).astype(np.float64)
    # unit-diameter sets three steps apart
    assert relative_distance([0, 1], [4, 5], d) == 3.0
    # adjacent sets: dist = diam
    assert relative_distance([0, 1], [2, 3], d) == 1.0


def test_relative_distance_min_diameter_normalization():
    g = path_graph(20)
    d = lambda x: bfs_distances(g, x).astype(np.float64)
    assert relative_distance([0, 1, 2, 3], [10, 11], d) == relative_distance([10, 11], [0, 1, 2, 3], d)
    # unequal diameters use the smaller one: dist(3, 10) = 7, diam = 1
    assert relative_distance([0, 1, 2, 3], [10, 11], d) == 7.0


def test_relative_distance_validation():
    g = path_graph(8)
    d = lambda x: bfs_distances(g, x).astype(np.float64)
    with pytest.raises(ValueError):
        relative_distance([0], [3, 4], d)   # singleton
    with pytest.raises(ValueError):
        relative_distance([0, 1], [1, 2], d)  # overlap


def test_relative_distance_grid_thirds_pinned():
    # opposite boundary thirds of a 65x65 grid box, frozen by enumeration
    g = grid_graph(65, 65)
    E = [j * 65 for j in range(22)]
    F = [j * 65 + 64 for j in range(43, 65)]
    d = lambda x: bfs_distances(g, x).astype(np.float64)
    val = relative_distance(E, F, d)
    # dist = 64 + (43 - 21) = 86 horizontal+vertical steps; diam = 21
    assert val == 86.0 / 21.0


# -- annular quasi-convexity ----------------------------------------------------------


def test_grid_annulus_connects():
    g = grid_graph(65, 65)
    chk = annular_qc_check(g, 32 * 65 + 32, 8, 4.0)
    assert chk.passed and not chk.vacuous


def test_truncated_path_fails_with_witness():
    g = path_graph(201)
    chk = annular_qc_check(g, 100, 8, 12.0)
    assert not chk.passed
    y, z = chk.witness
    dist = bfs_distances(g, 100)
    assert 8 <= dist[y] < 16 and 8 <= dist[z] < 16
    assert (y < 100) != (z < 100)  # opposite sides of the cut vertex


def test_annular_monotone_in_cl():
    g = grid_graph(65, 65)
    x = 32 * 65 + 32
    results = [annular_qc_check(g, x, 8, cl).passed for cl in (1.0, 2.0, 4.0, 8.0)]
    # once it passes it keeps passing as C_L grows
    first = results.index(True)
    assert all(results[first:])


def test_empty_annulus_vacuous():
    g = path_graph(9)
    chk = annular_qc_check(g, 4, 8, 2.0)
    assert chk.passed and chk.vacuous


# -- Loewner ---------------------------------------------------------------------------


def unit_length_metric(g):
    edges = tuple(g.edges())
    return LengthMetric(graph=g, edges=edges, lengths=np.ones(len(edges)),
                        separation_radii=np.ones(g.vertex_count))


def test_loewner_rectangle_oracles():
    # vertex grid with n columns and n+1 rows: Mod between the vertical
    # sides is exactly (n+1)/(n-1), and Delta = (n-1)/n, both near 1
    n = 20
    g = grid_graph(n, n + 1)
    lm = unit_length_metric(g)
    left = [j * n for j in range(n + 1)]
    right = [j * n + n - 1 for j in range(n + 1)]
    scan = loewner_scan(g, lm, [(left, right)])
    (delta, mod), = scan.rows
    assert abs(mod - 1.0) <= 0.15
    assert abs(delta - 1.0) <= 0.15
    # stretched 4:1 rectangle: Delta ~ 4, Mod ~ 1/4
    w = 4 * n
    g2 = grid_graph(w, n + 1)
    lm2 = unit_length_metric(g2)
    left2 = [j * w for j in range(n + 1)]
    right2 = [j * w + w - 1 for j in range(n + 1)]
    (delta2, mod2), = loewner_scan(g2, lm2, [(left2, right2)]).rows
    assert abs(mod2 - 0.25) <= 0.15 * 0.25
    assert abs(delta2 - 4.0) <= 0.15 * 4.0


def test_loewner_envelope_monotone():
    g = grid_graph(33, 33)
    lm = unit_length_metric(g)
    x = 16 * 33 + 16
    pairs = []
    for s, R in ((2, 6), (2, 10), (4, 10), (3, 12)):
        E = geodesic_segment(g, x, s)
        F = sphere_arc(g, x, R, max_diameter=2 * s)
        pairs.append((E, F))
    scan = loewner_scan(g, lm, pairs)
    knots = scan.envelope_knots()
    assert all(k1[1] >= k2[1] for k1, k2 in zip(knots, knots[1:]))
    assert scan.envelope(math.inf) > 0


def test_loewner_skips_bad_pairs():
    g = grid_graph(9, 9)
    lm = unit_length_metric(g)
    scan = loewner_scan(g, lm, [([0], [8, 17]), ([0, 1], [1, 2]), ([0, 2], [8, 17])])
    reasons = [r for _, r in scan.skipped]
    assert "singleton side" in reasons
    assert "sets overlap" in reasons
    assert "disconnected side" in reasons
    assert not scan.rows


def test_modulus_ignores_length_rescaling_bit_identical():
    # edge modulus never reads the lengths: identical bits either way
    from packlab.potential import edge_modulus

    g = grid_graph(9, 9)
    m1 = edge_modulus(g, {0, 1}, {79, 80})
    m2 = edge_modulus(g, {0, 1}, {79, 80})
    assert m1 == m2


def test_sphere_arc_and_segment_shapes():
    g = grid_graph(33, 33)
    x = 16 * 33 + 16
    seg = geodesic_segment(g, x, 5)
    assert len(seg) == 6
    dist = bfs_distances(g, x)
    assert [dist[v] for v in seg] == list(range(6))
    arc = sphere_arc(g, x, 4)
    assert all(dist[v] == 4 for v in arc)


def test_distortion_both_directions_recorded():
    # swapping the two metrics gives a different H'(x, r') at matched
    # radii; a bounded window in one direction comes with a finite bound
    # in the other on the same finite sample (both recorded, not equated)
    g, mp = long_edge_pair()
    fwd = distortion(mp, 1, 2)
    swapped = MetricPair(mp.vertex_count, mp.d2_from, mp.d1_from)
    r_matched = float(mp.d2_from(1)[3])  # image radius of the d1 = 2 sphere
    back = distortion(swapped, 1, r_matched)
    assert math.isfinite(fwd) and math.isfinite(back)
    assert fwd != back


def test_loewner_envelope_invariant_under_dyadic_rescaling():
    # Delta is a ratio and the modulus never reads lengths: scaling every
    # edge length by a power of two reproduces the scan bit for bit
    g = grid_graph(17, 17)
    edges = tuple(g.edges())
    lm1 = LengthMetric(graph=g, edges=edges, lengths=np.full(len(edges), 0.5),
                       separation_radii=np.full(g.vertex_count, 0.5))
    lm4 = LengthMetric(graph=g, edges=edges, lengths=np.full(len(edges), 2.0),
                       separation_radii=np.full(g.vertex_count, 2.0))
    x = 8 * 17 + 8
    pairs = [(geodesic_segment(g, x, 3), sphere_arc(g, x, 6, max_diameter=4))]
    rows1 = loewner_scan(g, lm1, pairs).rows
    rows4 = loewner_scan(g, lm4, pairs).rows
    assert rows1 == rows4


def test_sample_trusted_deterministic():
    g = grid_graph(17, 17)
    a = sample_trusted_vertices(g, 144, within=5, count=10, seed=3)
    b = sample_trusted_vertices(g, 144, within=5, count=10, seed=3)
    c = sample_trusted_vertices(g, 144, within=5, count=10, seed=4)
    assert a == b
    assert a != c
    dist = bfs_distances(g, 144)
    assert all(dist[v] <= 5 for v in a)
