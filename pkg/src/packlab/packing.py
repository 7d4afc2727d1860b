"""Circle packings of triangulated disks and their length metrics.

Radii solve the boundary-value angle problem: every interior vertex's
incident triangle angles sum to 2*pi, with the removed face's vertices held
at fixed radii.  The per-vertex update replaces the neighbors by the
uniform-neighbor model with the same angle sum and jumps to the radius
whose uniform angle sum is exactly 2*pi; sweeps run over a fixed greedy
coloring (same-color vertices share no edge, so the batched update equals
the sequential one), with Aitken-style supersteps once the error ratio
stabilizes.  Everything is deterministic for fixed inputs.
"""

from __future__ import annotations

import hashlib
import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csgraph
import scipy.sparse as sp

from .planar_graph import (
    PlanarGraph,
    bfs_distances,
    face_barycenter_triangulation,
    faces_from_rotation,
)


class PackingError(ValueError):
    """Input is not a packable triangulated disk."""


class NonConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class LayoutError(RuntimeError):
    def __init__(self, message, mismatch):
        super().__init__(f"{message} (mismatch {mismatch:.3e})")
        self.mismatch = mismatch


DEFAULT_TOL = 1e-9


def _find_face(faces, vertex_set):
    for i, f in enumerate(faces):
        if frozenset(f) == vertex_set:
            return i
    return None


def _corner_tables(tri, faces, removed, interior_mask):
    """Per-color corner arrays for the batched Gauss-Seidel sweep."""
    n = tri.vertex_count
    corners = [[] for _ in range(n)]  # per vertex: list of (u, w) neighbor pairs
    for i, f in enumerate(faces):
        if i == removed:
            continue
        a, b, c = f
        corners[a].append((b, c))
        corners[b].append((c, a))
        corners[c].append((a, b))
    color = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        if not interior_mask[v]:
            continue
        used = {color[w] for w in tri.adjacency[v] if interior_mask[w] and color[w] >= 0}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    ncolors = int(color.max()) + 1 if interior_mask.any() else 0
    tables = []
    for c in range(ncolors):
        verts = np.flatnonzero(color == c)
        cu, cw, seg = [], [], [0]
        for v in verts:
            for u, w in corners[v]:
                cu.append(u)
                cw.append(w)
            seg.append(len(cu))
        tables.append((
            verts,
            np.asarray(cu, dtype=np.int64),
            np.asarray(cw, dtype=np.int64),
            np.asarray(seg[:-1], dtype=np.int64),
            np.diff(seg).astype(np.float64),
        ))
    return tables


def _angle_sums(r, verts, cu, cw, seg):
    rv = np.repeat(r[verts], np.diff(np.append(seg, len(cu))).astype(np.int64))
    beta = (r[cu] * r[cw]) / ((rv + r[cu]) * (rv + r[cw]))
    alpha = 2.0 * np.arcsin(np.sqrt(beta))
    return np.add.reduceat(alpha, seg)


def pack_radii(tri: PlanarGraph, boundary_radii, tol: float = DEFAULT_TOL,
               max_sweeps: int = 10**6, best_effort: bool = False):
    """Radii with interior angle sums 2*pi, boundary radii fixed.

    ``boundary_radii`` maps the vertices of one face (the removed face) to
    their fixed radii.  Returns (radii, sweeps, residual).  With
    ``best_effort`` the iteration may stop at the floating-point floor
    instead of raising, returning whatever residual it reached.
    """
    faces = faces_from_rotation(tri)
    bmap = {int(v): float(r) for v, r in dict(boundary_radii).items()}
    if any(r <= 0 for r in bmap.values()):
        raise PackingError("boundary radii must be positive")
    removed = _find_face(faces.faces, frozenset(bmap))
    if removed is None:
        raise PackingError("boundary vertices do not form a face of the triangulation")
    for i, f in enumerate(faces):
        if i != removed and len(f) != 3:
            raise PackingError(f"face {f} is not a triangle; input is not a triangulation")
    n = tri.vertex_count
    interior = np.ones(n, dtype=bool)
    for v in bmap:
        interior[v] = False
    r = np.empty(n, dtype=np.float64)
    mean_b = sum(bmap.values()) / len(bmap)
    r[:] = mean_b
    for v, val in bmap.items():
        r[v] = val
    if not interior.any():
        return r, 0, 0.0

    tables = _corner_tables(tri, faces.faces, removed, interior)
    two_pi = 2.0 * math.pi

    def full_residual(rad):
        worst = 0.0
        for verts, cu, cw, seg, k in tables:
            theta = _angle_sums(rad, verts, cu, cw, seg)
            worst = max(worst, float(np.max(np.abs(theta - two_pi))))
        return worst

    sweeps = 0
    e_prev = None
    lam_prev = None
    best_seen = math.inf
    last_improvement = 0
    interior_ids = np.flatnonzero(interior)
    while sweeps < max_sweeps:
        r_before = r.copy()
        esum = 0.0
        emax = 0.0
        for verts, cu, cw, seg, k in tables:
            theta = _angle_sums(r, verts, cu, cw, seg)
            dev = np.abs(theta - two_pi)
            esum += float(dev.sum())
            emax = max(emax, float(dev.max()))
            b = np.sin(theta / (2.0 * k))
            delta = np.sin(math.pi / k)
            rhat = (b / (1.0 - b)) * r[verts]
            r[verts] = ((1.0 - delta) / delta) * rhat
        sweeps += 1
        if emax <= 4.0 * tol:
            res = full_residual(r)
            if res <= tol:
                return r, sweeps, res
        if esum < 0.999 * best_seen:
            best_seen = esum
            last_improvement = sweeps
        elif best_effort and sweeps - last_improvement > 200:
            # floating-point floor: the sweep error stopped improving
            return r, sweeps, full_residual(r)
        # superstep: extrapolate along the sweep direction once the error
        # ratio has settled into a slow linear regime
        if e_prev is not None and 0.0 < esum < e_prev:
            lam = esum / e_prev
            if lam_prev is not None and lam > 0.5 and abs(lam - lam_prev) < 0.05 * lam:
                factor = lam / (1.0 - lam)
                dr = r - r_before
                while factor > 1.0:
                    cand = r[interior_ids] + factor * dr[interior_ids]
                    if np.all(cand > 0.0):
                        r[interior_ids] = cand
                        break
                    factor *= 0.5
                e_prev = None
                lam_prev = None
                continue
            lam_prev = lam
        e_prev = esum
    if best_effort:
        return r, sweeps, full_residual(r)
    raise NonConvergenceError(f"radius iteration hit the {max_sweeps}-sweep cap",
                              full_residual(r))


def pack_radii_newton(tri: PlanarGraph, boundary_radii, tol: float = DEFAULT_TOL,
                      max_iterations: int = 200, warmup_sweeps: int = 20,
                      best_effort: bool = False):
    """Damped Newton iteration on log-radii for the angle-sum problem.

    The angle sum is the gradient of a convex functional of u = log r, so
    Newton with halving line search converges globally; each step solves a
    sparse SPD system (the negated Jacobian is an M-matrix with per-corner
    entries Q/(r_v + r_u), Q = sqrt(r_v r_u r_w / (r_v + r_u + r_w))).
    Same contract as ``pack_radii``; preferred for large inputs.
    """
    faces = faces_from_rotation(tri)
    bmap = {int(v): float(r) for v, r in dict(boundary_radii).items()}
    if any(r <= 0 for r in bmap.values()):
        raise PackingError("boundary radii must be positive")
    removed = _find_face(faces.faces, frozenset(bmap))
    if removed is None:
        raise PackingError("boundary vertices do not form a face of the triangulation")
    for i, f in enumerate(faces):
        if i != removed and len(f) != 3:
            raise PackingError(f"face {f} is not a triangle; input is not a triangulation")
    n = tri.vertex_count
    interior = np.ones(n, dtype=bool)
    for v in bmap:
        interior[v] = False
    if not interior.any():
        r = np.empty(n)
        for v, val in bmap.items():
            r[v] = val
        return r, 0, 0.0
    # a few relaxation sweeps give Newton a good basin
    r, _, _ = pack_radii(tri, bmap, tol=math.inf, max_sweeps=warmup_sweeps, best_effort=True)

    cv, cu, cw = [], [], []
    for i, f in enumerate(faces):
        if i == removed:
            continue
        a, b, c = f
        cv.extend((a, b, c))
        cu.extend((b, c, a))
        cw.extend((c, a, b))
    cv = np.asarray(cv, dtype=np.int64)
    cu = np.asarray(cu, dtype=np.int64)
    cw = np.asarray(cw, dtype=np.int64)
    iid = np.full(n, -1, dtype=np.int64)
    ivs = np.flatnonzero(interior)
    iid[ivs] = np.arange(ivs.size)
    two_pi = 2.0 * math.pi

    def angle_sums(r):
        beta = (r[cu] * r[cw]) / ((r[cv] + r[cu]) * (r[cv] + r[cw]))
        alpha = 2.0 * np.arcsin(np.sqrt(beta))
        theta = np.zeros(n)
        np.add.at(theta, cv, alpha)
        return theta

    def residual_of(r):
        return float(np.max(np.abs(angle_sums(r)[ivs] - two_pi)))

    u = np.log(r)
    res = residual_of(r)
    iterations = 0
    while res > tol and iterations < max_iterations:
        iterations += 1
        rr = np.exp(u)
        q = np.sqrt(rr[cv] * rr[cu] * rr[cw] / (rr[cv] + rr[cu] + rr[cw]))
        dvu = q / (rr[cv] + rr[cu])
        dvw = q / (rr[cv] + rr[cw])
        mask_u = interior[cv] & interior[cu]
        mask_w = interior[cv] & interior[cw]
        mask_d = interior[cv]
        rows = np.concatenate([iid[cv[mask_u]], iid[cv[mask_w]], iid[cv[mask_d]]])
        cols = np.concatenate([iid[cu[mask_u]], iid[cw[mask_w]], iid[cv[mask_d]]])
        vals = np.concatenate([-dvu[mask_u], -dvw[mask_w], (dvu + dvw)[mask_d]])
        m = ivs.size
        negJ = sp.csr_matrix((vals, (rows, cols)), shape=(m, m))
        rhs = angle_sums(rr)[ivs] - two_pi
        from scipy.sparse.linalg import cg as _cg

        M = sp.diags(1.0 / negJ.diagonal())
        delta, info = _cg(negJ, rhs, rtol=1e-12, atol=0.0, maxiter=40 * m, M=M)
        step = 1.0
        for _ in range(40):
            u_new = u.copy()
            u_new[ivs] += step * delta[iid[ivs]]
            res_new = residual_of(np.exp(u_new))
            if res_new < res:
                u = u_new
                res = res_new
                break
            step *= 0.5
        else:
            break  # no descent direction left: floating-point floor
    r = np.exp(u)
    if res > tol and not best_effort:
        raise NonConvergenceError("Newton iteration stalled above the requested tolerance", res)
    return r, iterations, res


def layout_centers(tri: PlanarGraph, radii, boundary, tol: float = DEFAULT_TOL,
                   layout_tol: float | None = None):
    """Centers realizing all tangencies, via BFS over faces from the
    normalization edge.

    The smallest boundary vertex sits at the origin with its edge to the
    next boundary vertex (in removed-face order) along the positive x-axis.
    Every face placement is cross-checked; a mismatch beyond ``layout_tol``
    (default 10 * tol) refuses the layout.  Returns (centers, mismatch).
    """
    if layout_tol is None:
        layout_tol = 10.0 * tol
    r = np.asarray(radii, dtype=np.float64)
    faces = faces_from_rotation(tri)
    bset = frozenset(int(v) for v in boundary)
    removed = _find_face(faces.faces, bset)
    if removed is None:
        raise PackingError("boundary vertices do not form a face")
    bcycle = faces.faces[removed]
    b0 = min(bcycle)
    b1 = bcycle[(bcycle.index(b0) + 1) % len(bcycle)]
    n = tri.vertex_count
    centers = np.full((n, 2), np.nan)
    placed = np.zeros(n, dtype=bool)
    centers[b0] = (0.0, 0.0)
    centers[b1] = (r[b0] + r[b1], 0.0)
    placed[[b0, b1]] = True

    incident = [[] for _ in range(n)]
    for i, f in enumerate(faces):
        if i == removed:
            continue
        for v in f:
            incident[v].append(i)
    queue = deque(incident[b0] + incident[b1])
    queued = set(queue)
    done = set()
    mismatch = 0.0

    def place_third(a, b, c):
        # c lies left of a -> b (faces are consistently oriented)
        pa, pb = centers[a], centers[b]
        ex = pb - pa
        dist = math.hypot(ex[0], ex[1])
        ex = ex / dist
        ey = np.array([-ex[1], ex[0]])
        ra, rb = r[a] + r[c], r[b] + r[c]
        xx = (dist * dist + ra * ra - rb * rb) / (2.0 * dist)
        yy = math.sqrt(max(ra * ra - xx * xx, 0.0))
        return pa + xx * ex + yy * ey

    while queue:
        fi = queue.popleft()
        queued.discard(fi)
        if fi in done:
            continue
        f = faces.faces[fi]
        have = [placed[v] for v in f]
        npl = sum(have)
        if npl < 2:
            continue
        if npl == 2:
            k = have.index(False)
            a, b, c = f[(k + 1) % 3], f[(k + 2) % 3], f[k]
            centers[c] = place_third(a, b, c)
            placed[c] = True
            for fj in incident[c]:
                if fj not in done and fj not in queued:
                    queue.append(fj)
                    queued.add(fj)
        # all three placed now: record the worst tangency defect of this face
        worst = 0.0
        for i in range(3):
            u, v = f[i], f[(i + 1) % 3]
            d = math.hypot(*(centers[u] - centers[v]))
            worst = max(worst, abs(d - (r[u] + r[v])))
        mismatch = max(mismatch, worst)
        done.add(fi)
        for v in f:
            for fj in incident[v]:
                if fj not in done and fj not in queued:
                    queue.append(fj)
                    queued.add(fj)

    if not placed.all():
        raise LayoutError("layout did not reach every vertex", float("nan"))
    if mismatch > layout_tol:
        raise LayoutError("inconsistent radii: face placements disagree", mismatch)
    return centers, mismatch


@dataclass(frozen=True)
class Packing:
    """A solved and laid-out circle packing of a triangulated disk."""

    graph: PlanarGraph
    radii: np.ndarray
    centers: np.ndarray
    boundary: tuple
    removed_face: tuple
    tol: float
    sweeps: int
    angle_residual: float
    layout_mismatch: float

    def tangency_residual(self) -> float:
        worst = 0.0
        for u, v in self.graph.edges():
            d = math.hypot(*(self.centers[u] - self.centers[v]))
            worst = max(worst, abs(d - (self.radii[u] + self.radii[v])))
        return worst


def pack(tri: PlanarGraph, removed_face=None, boundary_radius: float = 1.0,
         tol: float = DEFAULT_TOL, layout_tol: float | None = None,
         max_sweeps: int = 10**6) -> Packing:
    """Solve radii and lay out centers for a sphere triangulation minus a face.

    ``removed_face`` is a vertex cycle of the face to delete (defaults to
    the face farthest from vertex 0); its vertices take equal fixed radii.
    The radius iteration drives the angle residual well below ``tol``
    (toward the floating-point floor) so that the holonomy drift of the
    chained layout stays inside the layout tolerance.
    """
    faces = faces_from_rotation(tri)
    if removed_face is None:
        dist = bfs_distances(tri, 0)
        best = None
        for f in faces:
            key = (-min(int(dist[v]) for v in f), f)
            if best is None or key < best[0]:
                best = (key, f)
        removed_face = best[1]
    removed_face = tuple(int(v) for v in removed_face)
    boundary_radii = {v: boundary_radius for v in removed_face}
    inner_tol = max(tol * 1e-5, 1e-15)
    if tri.vertex_count <= 500:
        radii, sweeps, residual = pack_radii(tri, boundary_radii, tol=inner_tol,
                                             max_sweeps=max_sweeps, best_effort=True)
    else:
        radii, sweeps, residual = pack_radii_newton(tri, boundary_radii, tol=inner_tol,
                                                    best_effort=True)
    if residual > tol:
        raise NonConvergenceError("radius iteration stalled above the requested tolerance",
                                  residual)
    centers, mismatch = layout_centers(tri, radii, removed_face, tol=tol, layout_tol=layout_tol)
    return Packing(graph=tri, radii=radii, centers=centers,
                   boundary=tuple(sorted(removed_face)), removed_face=removed_face,
                   tol=tol, sweeps=sweeps, angle_residual=residual,
                   layout_mismatch=mismatch)


def prepare_disk(g: PlanarGraph, base_point: int = 0):
    """Triangulation plus removed-face choice for an arbitrary sphere graph.

    All-triangle graphs keep their combinatorics, with the face antipodal
    to the base point (max-min BFS distance, lexicographic ties) removed.
    A graph with exactly one non-triangle face loses that face.  Anything
    else is barycenter-triangulated first.
    """
    faces = faces_from_rotation(g)
    non_tri = [f for f in faces if len(f) != 3]
    if len(non_tri) == 1:
        return g, non_tri[0]
    if non_tri:
        g = face_barycenter_triangulation(g)
        faces = faces_from_rotation(g)
    dist = bfs_distances(g, base_point)
    best = None
    for f in faces:
        key = (-min(int(dist[v]) for v in f), f)
        if best is None or key < best[0]:
            best = (key, f)
    return g, best[1]


# -- length metric -------------------------------------------------------------


@dataclass(frozen=True)
class LengthMetric:
    """Edge lengths of the straight-line embedding and the induced path metric."""

    graph: PlanarGraph
    edges: tuple
    lengths: np.ndarray
    separation_radii: np.ndarray

    def distances_from(self, x: int) -> np.ndarray:
        return csgraph.dijkstra(self._weighted_csr(), indices=x)

    def _weighted_csr(self):
        g = self.graph
        n = g.vertex_count
        eu = np.fromiter((e[0] for e in self.edges), dtype=np.int64, count=len(self.edges))
        ev = np.fromiter((e[1] for e in self.edges), dtype=np.int64, count=len(self.edges))
        w = np.concatenate([self.lengths, self.lengths])
        return sp.csr_matrix((w, (np.concatenate([eu, ev]), np.concatenate([ev, eu]))),
                             shape=(n, n))


def length_metric(p: Packing) -> LengthMetric:
    """l(e) = Euclidean center distance; r_x = min incident edge length."""
    g = p.graph
    edges = tuple(g.edges())
    lengths = np.array([math.hypot(*(p.centers[u] - p.centers[v])) for u, v in edges])
    if np.any(lengths <= 0):
        raise PackingError("degenerate embedding: zero-length edge")
    sep = np.full(g.vertex_count, np.inf)
    for (u, v), l in zip(edges, lengths):
        if l < sep[u]:
            sep[u] = l
        if l < sep[v]:
            sep[v] = l
    return LengthMetric(graph=g, edges=edges, lengths=lengths, separation_radii=sep)


# -- good embedding check --------------------------------------------------------


@dataclass(frozen=True)
class GoodEmbeddingReport:
    max_angle: float
    max_adjacent_length_ratio: float
    max_adjacent_radius_ratio: float
    angle_bound: float
    ratio_bound: float

    @property
    def angles_pass(self) -> bool:
        return self.max_angle <= self.angle_bound

    @property
    def ratios_pass(self) -> bool:
        return self.max_adjacent_length_ratio <= self.ratio_bound

    @property
    def passed(self) -> bool:
        return self.angles_pass and self.ratios_pass


def _inner_angle(pa, pb, pc):
    """Angle at pa in the triangle (pa, pb, pc)."""
    v1 = pb - pa
    v2 = pc - pa
    num = float(np.dot(v1, v2))
    den = math.hypot(*v1) * math.hypot(*v2)
    return math.acos(max(-1.0, min(1.0, num / den)))


def check_good_embedding(p: Packing, D: float, eta: float) -> GoodEmbeddingReport:
    """No flat angles (all face angles <= pi - eta) and comparable adjacent
    edge lengths (ratio <= D), measured over the laid-out disk."""
    if D < 1:
        raise ValueError("D must be >= 1")
    if not 0 < eta < math.pi:
        raise ValueError("eta must lie in (0, pi)")
    faces = faces_from_rotation(p.graph)
    removed = _find_face(faces.faces, frozenset(p.removed_face))
    max_angle = 0.0
    for i, f in enumerate(faces):
        if i == removed:
            continue
        for k in range(len(f)):
            ang = _inner_angle(p.centers[f[k]], p.centers[f[(k + 1) % len(f)]],
                               p.centers[f[(k - 1) % len(f)]])
            max_angle = max(max_angle, ang)
    max_len_ratio = 1.0
    for v in range(p.graph.vertex_count):
        ls = [math.hypot(*(p.centers[v] - p.centers[w])) for w in p.graph.adjacency[v]]
        if len(ls) > 1:
            max_len_ratio = max(max_len_ratio, max(ls) / min(ls))
    max_rad_ratio = 1.0
    for u, v in p.graph.edges():
        ratio = p.radii[u] / p.radii[v]
        max_rad_ratio = max(max_rad_ratio, ratio, 1.0 / ratio)
    return GoodEmbeddingReport(max_angle=max_angle,
                               max_adjacent_length_ratio=max_len_ratio,
                               max_adjacent_radius_ratio=max_rad_ratio,
                               angle_bound=math.pi - eta, ratio_bound=D)


# -- embedded volume profile ------------------------------------------------------


def embedding_volume_profile(lm: LengthMetric, centers, radii):
    """Mass of metric balls under the edge measure mu(e) = l(e)^2.

    An edge partially inside the ball contributes proportionally to the
    covered length fraction.  Each row reports the ratio against the
    predicted r * (r v r_x) scaling.
    """
    eu = np.fromiter((e[0] for e in lm.edges), dtype=np.int64, count=len(lm.edges))
    ev = np.fromiter((e[1] for e in lm.edges), dtype=np.int64, count=len(lm.edges))
    rows = []
    for x in centers:
        dist = lm.distances_from(int(x))
        a = dist[eu]
        b = dist[ev]
        for rad in radii:
            cov = (np.clip(rad - a, 0.0, lm.lengths) + np.clip(rad - b, 0.0, lm.lengths))
            frac = np.minimum(cov / lm.lengths, 1.0)
            mass = float(np.dot(lm.lengths**2, frac))
            rx = float(lm.separation_radii[int(x)])
            denom = rad * max(rad, rx)
            rows.append((int(x), float(rad), mass, rx, mass / denom))
    return rows


# -- serialization -----------------------------------------------------------------


def graph_digest(g: PlanarGraph) -> str:
    lines = ["version 1", f"vertex_count {g.vertex_count}", f"spherical {int(g.spherical)}"]
    for u, nbrs in enumerate(g.adjacency):
        lines.append(f"{u}: " + " ".join(str(v) for v in nbrs))
    return hashlib.sha256(("\n".join(lines) + "\n").encode()).hexdigest()


def write_packing(p: Packing, path) -> None:
    lines = [
        "packing 1",
        f"graph_sha256 {graph_digest(p.graph)}",
        f"vertex_count {p.graph.vertex_count}",
        "removed_face " + " ".join(str(v) for v in p.removed_face),
        f"tol {float(p.tol)!r}",
        f"sweeps {p.sweeps}",
        f"angle_residual {float(p.angle_residual)!r}",
        f"layout_mismatch {float(p.layout_mismatch)!r}",
        "radii",
    ]
    lines.extend(repr(float(r)) for r in p.radii)
    lines.append("centers")
    lines.extend(f"{float(c[0])!r} {float(c[1])!r}" for c in p.centers)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_packing(path, graph: PlanarGraph) -> Packing:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != "packing 1":
        raise PackingError(f"{path}: not a packing file")
    meta = {}
    i = 1
    while lines[i] != "radii":
        key, _, val = lines[i].partition(" ")
        meta[key] = val
        i += 1
    if meta["graph_sha256"] != graph_digest(graph):
        raise PackingError(f"{path}: packing does not match the supplied graph")
    n = int(meta["vertex_count"])
    radii = np.array([float(x) for x in lines[i + 1:i + 1 + n]])
    assert lines[i + 1 + n] == "centers"
    centers = np.array([[float(t) for t in ln.split()] for ln in lines[i + 2 + n:i + 2 + 2 * n]])
    removed = tuple(int(v) for v in meta["removed_face"].split())
    return Packing(graph=graph, radii=radii, centers=centers,
                   boundary=tuple(sorted(removed)), removed_face=removed,
                   tol=float(meta["tol"]), sweeps=int(meta["sweeps"]),
                   angle_residual=float(meta["angle_residual"]),
                   layout_mismatch=float(meta["layout_mismatch"]))


def write_packing_svg(p: Packing, path) -> None:
    """Circles and straight edges, one user unit per length unit."""
    lo = p.centers.min(axis=0) - p.radii.max()
    hi = p.centers.max(axis=0) + p.radii.max()
    w, h = hi - lo
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{lo[0]:.6g} {lo[1]:.6g} {w:.6g} {h:.6g}">',
        f'<g fill="none" stroke="black" stroke-width="{(w / 1000):.6g}">',
    ]
    for v in range(p.graph.vertex_count):
        parts.append(f'<circle cx="{p.centers[v][0]:.9g}" cy="{p.centers[v][1]:.9g}" r="{p.radii[v]:.9g}"/>')
    for u, v in p.graph.edges():
        parts.append(f'<line x1="{p.centers[u][0]:.9g}" y1="{p.centers[u][1]:.9g}" '
                     f'x2="{p.centers[v][0]:.9g}" y2="{p.centers[v][1]:.9g}" stroke="gray"/>')
    parts.append("</g></svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
