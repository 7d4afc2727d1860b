"""Quasisymmetry distortion, annular quasi-convexity, and Loewner scans.

The distortion of the identity map between two metrics on the same vertex
set at (x, r) is H = sup{d2(x,y) : d1(x,y) <= r} / inf{d2(x,y) : d1(x,y) >= r},
computed exactly over the finite vertex set.  A packing is compared against
the graph metric either through the straight-line metric between circle
centers or through the shortest-path length metric; the choice is the
MetricPair constructor's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .packing import LengthMetric
from .planar_graph import PlanarGraph, bfs_distances
from .potential import edge_modulus
from .walks import counter_random


class MetricPair:
    """Two metrics on one vertex set, as distance-vector accessors."""

    def __init__(self, vertex_count, d1_from, d2_from):
        self.vertex_count = vertex_count
        self.d1_from = d1_from
        self.d2_from = d2_from

    @classmethod
    def graph_vs_centers(cls, g: PlanarGraph, centers) -> "MetricPair":
        """Graph metric against the straight-line packing metric |f(x)-f(y)|."""
        pts = np.asarray(centers, dtype=np.float64)

        def d2(x):
            return np.hypot(pts[:, 0] - pts[x, 0], pts[:, 1] - pts[x, 1])

        return cls(g.vertex_count, lambda x: bfs_distances(g, x).astype(np.float64), d2)

    @classmethod
    def graph_vs_lengths(cls, g: PlanarGraph, lm: LengthMetric) -> "MetricPair":
        """Graph metric against the shortest-path metric under edge lengths."""
        return cls(g.vertex_count, lambda x: bfs_distances(g, x).astype(np.float64),
                   lm.distances_from)


def distortion(mp: MetricPair, x: int, r: float) -> float:
    """H(x, r), exact over the finite vertex set."""
    d1 = mp.d1_from(x)
    d2 = mp.d2_from(x)
    near = d1 <= r
    far = d1 >= r
    if not far.any() or not near.any():
        raise ValueError(f"radius {r} exceeds the eccentricity of vertex {x}")
    sup = float(d2[near].max())
    inf = float(d2[far].min())
    if inf == 0.0:
        raise ValueError("degenerate metric: distinct vertices at distance 0")
    return sup / inf


@dataclass(frozen=True)
class DistortionReport:
    samples: tuple           # (x, r, H) triples
    h_max: float
    window: tuple            # (r_min, r_max) admitted
    excluded: int            # untrusted or invalid samples skipped

    def h_max_within(self, r_limit: float) -> float:
        vals = [h for _, r, h in self.samples if r <= r_limit]
        return max(vals) if vals else math.nan


def qs_profile(mp: MetricPair, centers, radii, boundary_distance=None) -> DistortionReport:
    """Distortion over a grid of centers and radii.

    ``boundary_distance`` (optional per-vertex array) is the graph distance
    to the deleted boundary face; samples closer than r/4 to it are
    excluded as untrusted, and so are radii beyond a center's eccentricity.
    Untrusted samples are counted, not errors.
    """
    samples = []
    excluded = 0
    for x in centers:
        x = int(x)
        d1 = mp.d1_from(x)
        d2 = mp.d2_from(x)
        ecc = d1.max()
        for r in radii:
            if r > ecc:
                excluded += 1
                continue
            if boundary_distance is not None and boundary_distance[x] < r / 4.0:
                excluded += 1
                continue
            near = d1 <= r
            far = d1 >= r
            sup = float(d2[near].max())
            inf = float(d2[far].min())
            samples.append((x, float(r), sup / inf))
    if not samples:
        raise ValueError("no admissible distortion samples")
    rs = [r for _, r, _ in samples]
    return DistortionReport(samples=tuple(samples),
                            h_max=max(h for _, _, h in samples),
                            window=(min(rs), max(rs)), excluded=excluded)


def relative_distance(E, F, dist_from) -> float:
    """dist(E, F) / (diam E ^ diam F), exact over the finite sets.

    ``dist_from`` maps a vertex to its distance vector.  Sets must be
    disjoint with at least two points each (positive diameters).
    """
    E = sorted(int(v) for v in set(E))
    F = sorted(int(v) for v in set(F))
    if set(E) & set(F):
        raise ValueError("sets must be disjoint")
    if len(E) < 2 or len(F) < 2:
        raise ValueError("relative distance needs sets of more than one point")
    fa = np.asarray(F, dtype=np.int64)
    ea = np.asarray(E, dtype=np.int64)
    dist_ef = math.inf
    diam_e = 0.0
    for v in E:
        row = dist_from(v)
        dist_ef = min(dist_ef, float(row[fa].min()))
        diam_e = max(diam_e, float(row[ea].max()))
    diam_f = 0.0
    for v in F:
        row = dist_from(v)
        diam_f = max(diam_f, float(row[fa].max()))
    if diam_e == 0.0 or diam_f == 0.0:
        raise ValueError("zero-diameter set")
    return dist_ef / min(diam_e, diam_f)


@dataclass(frozen=True)
class AnnularCheck:
    passed: bool
    vacuous: bool
    witness: tuple | None     # a disconnected pair (y, z) on failure
    annulus_size: int
    components: int


def annular_qc_check(g: PlanarGraph, x: int, r: int, c_l: float) -> AnnularCheck:
    """Do all pairs in B(x,2r) \\ B(x,r) connect inside the fattened annulus
    B(x, C_L r) \\ B(x, r / C_L)?

    Balls are strict with real radii, so the inner hole always contains x
    (as in the metric-space definition; flooring the inner radius would
    empty it for C_L > r and vacuously pass cut points).  Components are
    computed on the induced subgraph of the fattened annulus.  An empty
    middle annulus passes vacuously (flagged).
    """
    if r < 1:
        raise ValueError("radius must be >= 1")
    if c_l < 1:
        raise ValueError("C_L must be >= 1")
    dist = bfs_distances(g, x)
    mid = (dist >= r) & (dist < 2 * r)
    if not mid.any():
        return AnnularCheck(passed=True, vacuous=True, witness=None, annulus_size=0, components=0)
    fat = (dist >= r / c_l) & (dist < c_l * r)
    # label components of the induced subgraph on `fat` by BFS
    label = np.full(g.vertex_count, -1, dtype=np.int64)
    ncomp = 0
    for s in np.flatnonzero(fat):
        if label[s] >= 0:
            continue
        stack = [int(s)]
        label[s] = ncomp
        while stack:
            u = stack.pop()
            for w in g.adjacency[u]:
                if fat[w] and label[w] < 0:
                    label[w] = ncomp
                    stack.append(w)
        ncomp += 1
    mid_ids = np.flatnonzero(mid)
    comps = np.unique(label[mid_ids])
    if comps.size == 1:
        return AnnularCheck(passed=True, vacuous=False, witness=None,
                            annulus_size=int(mid_ids.size), components=1)
    y = int(mid_ids[label[mid_ids] == comps[0]][0])
    z = int(mid_ids[label[mid_ids] == comps[1]][0])
    return AnnularCheck(passed=False, vacuous=False, witness=(y, z),
                        annulus_size=int(mid_ids.size), components=int(comps.size))


@dataclass(frozen=True)
class LoewnerScan:
    rows: tuple              # (delta, modulus) per admitted pair
    skipped: tuple           # (pair index, reason)

    def envelope(self, t: float) -> float:
        """Lower envelope: min modulus over pairs with Delta <= t."""
        vals = [m for d, m in self.rows if d <= t]
        return min(vals) if vals else math.inf

    def envelope_knots(self):
        knots = []
        best = math.inf
        for d, m in sorted(self.rows):
            best = min(best, m)
            knots.append((d, best))
        return knots


def _connected(g: PlanarGraph, vs) -> bool:
    vs = set(vs)
    start = next(iter(vs))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in g.adjacency[u]:
            if w in vs and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == vs


def loewner_scan(g: PlanarGraph, lm: LengthMetric, pairs) -> LoewnerScan:
    """Relative distance (in the length metric) against edge modulus per pair.

    Pairs must be disjoint connected vertex sets of at least 2 vertices
    (discrete continua); offending pairs are skipped with a reason.
    """
    rows = []
    skipped = []
    for i, (E, F) in enumerate(pairs):
        E, F = set(int(v) for v in E), set(int(v) for v in F)
        if len(E) < 2 or len(F) < 2:
            skipped.append((i, "singleton side"))
            continue
        if E & F:
            skipped.append((i, "sets overlap"))
            continue
        if not _connected(g, E) or not _connected(g, F):
            skipped.append((i, "disconnected side"))
            continue
        delta = relative_distance(E, F, lm.distances_from)
        mod = edge_modulus(g, E, F)
        rows.append((delta, mod))
    return LoewnerScan(rows=tuple(rows), skipped=tuple(skipped))


def geodesic_segment(g: PlanarGraph, start: int, length: int):
    """Vertices of a BFS geodesic of the given length from ``start``.

    Deterministic: each step extends toward the smallest-id vertex that is
    farther from the start.
    """
    dist = bfs_distances(g, start)
    if length > dist.max():
        raise ValueError("requested segment longer than the eccentricity")
    seg = [start]
    cur = start
    for d in range(1, length + 1):
        nxt = min(w for w in g.adjacency[cur] if dist[w] == d)
        seg.append(nxt)
        cur = nxt
    return seg


def sphere_arc(g: PlanarGraph, center: int, radius: int, max_diameter=None):
    """A connected arc of the BFS sphere {d(center, .) = radius}.

    Takes the component of the smallest-id sphere vertex within the induced
    subgraph on the sphere, optionally trimmed (by BFS inside the sphere)
    to the given diameter.
    """
    dist = bfs_distances(g, center)
    shell = np.flatnonzero(dist == radius)
    if shell.size == 0:
        raise ValueError("empty sphere")
    shell_set = set(int(v) for v in shell)
    start = int(shell.min())
    seen = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.adjacency[u]:
                if w in shell_set and w not in seen:
                    seen[w] = seen[u] + 1
                    nxt.append(w)
        frontier = nxt
    if max_diameter is None:
        return sorted(seen)
    return sorted(v for v, d in seen.items() if d <= max_diameter)


def sample_trusted_vertices(g: PlanarGraph, near: int, within: int, count: int,
                            seed: int, exclude=()):
    """Deterministic seeded sample of ``count`` vertices with d(near, .) <= within."""
    dist = bfs_distances(g, near)
    pool = np.flatnonzero(dist <= within)
    pool = pool[~np.isin(pool, np.asarray(list(exclude), dtype=np.int64))] if exclude else pool
    if pool.size < count:
        raise ValueError(f"only {pool.size} vertices within distance {within}")
    ranks = counter_random(seed, pool.astype(np.uint64), 0)
    order = np.argsort(ranks, kind="stable")
    return [int(v) for v in pool[order[:count]]]
