"""Planar graphs encoded by rotation systems (combinatorial maps).

A rotation system is, for each vertex, the cyclic order of its neighbors.
Face tracing, duals, and barycenter triangulations are purely combinatorial
operations on that data; no coordinates are involved.

Convention: the dart following (u -> v) inside a face is (v -> w) where w is
the cyclic successor of u in the rotation at v.  ``PlanarGraph.from_faces``
builds rotations so that a consistently oriented face list is recovered
verbatim by ``faces_from_rotation``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .fitting import ExponentFit, fit_power_law


class GraphError(ValueError):
    """Structurally invalid graph input."""


class PlanarGraph:
    """Immutable simple connected graph with a rotation system.

    ``adjacency[v]`` lists the neighbors of v in cyclic order.  When
    ``spherical`` is set, face tracing must close up into a sphere
    (V - E + F = 2); otherwise the neighbor order carries no promise.
    """

    __slots__ = ("adjacency", "labels", "spherical", "_csr", "_pos_maps")

    def __init__(self, adjacency, labels=None, spherical=False, validate=True):
        self.adjacency = tuple(tuple(int(w) for w in nbrs) for nbrs in adjacency)
        self.labels = dict(labels) if labels else {}
        self.spherical = bool(spherical)
        self._csr = None
        self._pos_maps = None
        if validate:
            self._validate()

    # -- basic accessors -------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.adjacency)

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbors(self, v: int):
        return self.adjacency[v]

    def edges(self):
        """All undirected edges as sorted pairs, lexicographically ordered."""
        out = []
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    out.append((u, v))
        out.sort()
        return out

    def degrees(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.int64)

    # -- validation ------------------------------------------------------

    def _validate(self):
        n = self.vertex_count
        if n == 0:
            raise GraphError("empty graph")
        nbr_sets = []
        for u, nbrs in enumerate(self.adjacency):
            s = set(nbrs)
            if u in s:
                raise GraphError(f"self-loop at vertex {u}")
            if len(s) != len(nbrs):
                raise GraphError(f"repeated neighbor in rotation at vertex {u}")
            for v in nbrs:
                if not 0 <= v < n:
                    raise GraphError(f"neighbor {v} of {u} out of range")
            nbr_sets.append(s)
        for u, s in enumerate(nbr_sets):
            for v in s:
                if u not in nbr_sets[v]:
                    raise GraphError(f"asymmetric adjacency: {u} lists {v} but not conversely")
        # connectivity
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            u = stack.pop()
            for v in self.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    stack.append(v)
        if count != n:
            raise GraphError(f"graph not connected ({count} of {n} vertices reachable)")
        if self.spherical:
            faces = faces_from_rotation(self)
            if self.vertex_count - self.edge_count + len(faces.faces) != 2:
                raise GraphError("rotation system does not close into a sphere")

    # -- cached sparse adjacency -----------------------------------------

    def adjacency_csr(self) -> sp.csr_matrix:
        if self._csr is None:
            n = self.vertex_count
            indptr = np.zeros(n + 1, dtype=np.int64)
            for u, nbrs in enumerate(self.adjacency):
                indptr[u + 1] = indptr[u] + len(nbrs)
            indices = np.empty(indptr[-1], dtype=np.int32)
            for u, nbrs in enumerate(self.adjacency):
                indices[indptr[u]:indptr[u + 1]] = nbrs
            data = np.ones(indptr[-1], dtype=np.float64)
            self._csr = sp.csr_matrix((data, indices, indptr), shape=(n, n))
        return self._csr

    def rotation_positions(self):
        """Per-vertex dict neighbor -> position in the rotation list."""
        if self._pos_maps is None:
            self._pos_maps = tuple({w: i for i, w in enumerate(nbrs)} for nbrs in self.adjacency)
        return self._pos_maps

    # -- construction ----------------------------------------------------

    @classmethod
    def from_faces(cls, faces, vertex_count=None, labels=None) -> "PlanarGraph":
        """Build the rotation system of a spherical complex from its oriented faces.

        Every directed edge must occur in exactly one face; adjacent faces
        traverse their shared edge in opposite directions.
        """
        if vertex_count is None:
            vertex_count = 1 + max(max(f) for f in faces)
        succ = [dict() for _ in range(vertex_count)]
        for face in faces:
            k = len(face)
            if k < 3:
                raise GraphError(f"face of length {k} < 3")
            if len(set(face)) != k:
                raise GraphError(f"face with repeated vertex: {face}")
            for i in range(k):
                prev, v, nxt = face[i - 1], face[i], face[(i + 1) % k]
                if prev in succ[v]:
                    raise GraphError(f"directed edge ({prev},{v}) used by more than one face")
                succ[v][prev] = nxt
        adjacency = []
        for v in range(vertex_count):
            cyc = succ[v]
            if not cyc:
                raise GraphError(f"vertex {v} not on any face")
            start = min(cyc)
            rot = [start]
            cur = cyc[start]
            while cur != start:
                if cur not in cyc or len(rot) > len(cyc):
                    raise GraphError(f"rotation at vertex {v} does not close into one cycle")
                rot.append(cur)
                cur = cyc[cur]
            if len(rot) != len(cyc):
                raise GraphError(f"rotation at vertex {v} splits into several cycles")
            adjacency.append(rot)
        return cls(adjacency, labels=labels, spherical=True)


@dataclass(frozen=True)
class FaceList:
    """Directed face cycles traced from a rotation system."""

    faces: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.faces)

    def lengths(self):
        return [len(f) for f in self.faces]

    def __iter__(self):
        return iter(self.faces)


def _canonical_cycle(cycle):
    """Rotate a cycle so its minimum vertex comes first (orientation kept)."""
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


def faces_from_rotation(g: PlanarGraph) -> FaceList:
    """Trace all face cycles of the rotation system.

    Each directed edge lies in exactly one face.  For spherical inputs
    the result satisfies V - E + F = 2.
    """
    pos = g.rotation_positions()
    visited = set()
    faces = []
    for u0, nbrs in enumerate(g.adjacency):
        for v0 in nbrs:
            if (u0, v0) in visited:
                continue
            cycle = []
            u, v = u0, v0
            while (u, v) not in visited:
                visited.add((u, v))
                cycle.append(u)
                rot = g.adjacency[v]
                w = rot[(pos[v][u] + 1) % len(rot)]
                u, v = v, w
            if (u, v) != (u0, v0):
                raise GraphError("face tracing did not close at its starting dart")
            faces.append(_canonical_cycle(cycle))
    return FaceList(tuple(faces))


def euler_characteristic(g: PlanarGraph) -> int:
    return g.vertex_count - g.edge_count + len(faces_from_rotation(g))


# -- metric ---------------------------------------------------------------


def bfs_distances(g: PlanarGraph, source) -> np.ndarray:
    """Graph distances from ``source`` (a vertex or a set of vertices).

    Unreachable vertices get a large sentinel (never occurs on connected
    graphs).  Returns an int64 array.
    """
    srcs = [source] if np.isscalar(source) else list(source)
    dist = csgraph.dijkstra(g.adjacency_csr(), unweighted=True, indices=srcs, min_only=len(srcs) > 1)
    if dist.ndim > 1:
        dist = dist[0]
    out = np.where(np.isinf(dist), -1, dist).astype(np.int64)
    if np.any(out < 0):
        raise GraphError("graph not connected")
    return out


def graph_ball(g: PlanarGraph, x: int, r) -> np.ndarray:
    """B(x, r) = {y : d(x, y) < r}, with the strict inequality."""
    if not 0 <= x < g.vertex_count:
        raise GraphError(f"vertex {x} out of range")
    if r < 0:
        raise GraphError("negative radius")
    dist = bfs_distances(g, x)
    return np.flatnonzero(dist < r)


def volume_growth_fit(g: PlanarGraph, center: int, radii) -> ExponentFit:
    """Fit |B(center, r)| ~ r^d over the given radii by log-log least squares."""
    radii = [int(r) for r in radii]
    if len(radii) < 3:
        raise ValueError("volume growth fit needs at least 3 radii")
    if any(r < 2 for r in radii):
        raise ValueError("volume growth radii must be >= 2")
    if any(b >= a for a, b in zip(radii[1:], radii[:-1])):
        raise ValueError("radii must be strictly increasing")
    dist = bfs_distances(g, center)
    counts = [(r, int(np.count_nonzero(dist < r))) for r in radii]
    return fit_power_law(counts)


# -- dual and triangulation ------------------------------------------------


def planar_dual(g: PlanarGraph) -> PlanarGraph:
    """Dual map: one vertex per face, adjacency through shared edges.

    Rejects duals that would be multigraphs (two faces sharing several
    edges, or a face adjacent to itself), since only simple graphs are
    supported.
    """
    if not g.spherical:
        raise GraphError("planar dual requires a spherical graph")
    faces = faces_from_rotation(g)
    face_of = {}
    for i, f in enumerate(faces):
        k = len(f)
        for j in range(k):
            face_of[(f[j], f[(j + 1) % k])] = i
    dual_adj = []
    for i, f in enumerate(faces):
        k = len(f)
        row = []
        for j in range(k):
            twin = face_of[(f[(j + 1) % k], f[j])]
            if twin == i:
                raise GraphError("dual would have a self-loop (face adjacent to itself)")
            row.append(twin)
        if len(set(row)) != len(row):
            raise GraphError("dual would be a multigraph (faces share more than one edge)")
        dual_adj.append(row)
    return PlanarGraph(dual_adj, spherical=True)


def face_barycenter_triangulation(g: PlanarGraph) -> PlanarGraph:
    """Join a new vertex per face to all vertices of that face.

    Barycenters get ids V, V+1, ... in face order.  The result is a
    spherical triangulation with V' = V + F and E' = 3E.
    """
    if not g.spherical:
        raise GraphError("barycenter triangulation requires a spherical graph")
    faces = faces_from_rotation(g)
    n = g.vertex_count
    tri_faces = []
    for i, f in enumerate(faces):
        b = n + i
        k = len(f)
        for j in range(k):
            tri_faces.append((f[j], f[(j + 1) % k], b))
    return PlanarGraph.from_faces(tri_faces, vertex_count=n + len(faces))


# -- canonical form, isomorphism, automorphisms ----------------------------


def _code_from_dart(g: PlanarGraph, u0: int, v0: int, mirror: bool):
    """Canonical traversal code starting from dart (u0 -> v0).

    Vertices are relabeled in first-visit order; each visited vertex
    contributes its rotation read from the entry neighbor (reversed when
    ``mirror``).  Two darts give equal codes iff there is a map
    (orientation-reversing when ``mirror`` differs) automorphism/isomorphism
    sending one to the other.
    """
    pos = g.rotation_positions()
    label = {u0: 0}
    order = [u0]
    entry = {u0: v0}
    code = []
    qi = 0
    while qi < len(order):
        u = order[qi]
        qi += 1
        rot = g.adjacency[u]
        d = len(rot)
        k = pos[u][entry[u]]
        if mirror:
            seq = [rot[(k - i) % d] for i in range(d)]
        else:
            seq = [rot[(k + i) % d] for i in range(d)]
        row = []
        for w in seq:
            if w not in label:
                label[w] = len(order)
                order.append(w)
                entry[w] = u
            row.append(label[w])
        code.append(tuple(row))
    return tuple(code)


def _darts(g: PlanarGraph):
    return [(u, v) for u, nbrs in enumerate(g.adjacency) for v in nbrs]


def canonical_code(g: PlanarGraph):
    """Minimum traversal code over all starting darts and both orientations."""
    best = None
    for mirror in (False, True):
        for u, v in _darts(g):
            code = _code_from_dart(g, u, v, mirror)
            if best is None or code < best:
                best = code
    return best


def is_map_isomorphic(g1: PlanarGraph, g2: PlanarGraph) -> bool:
    if g1.vertex_count != g2.vertex_count or g1.edge_count != g2.edge_count:
        return False
    return canonical_code(g1) == canonical_code(g2)


def _dart_signature(g: PlanarGraph, u: int, v: int):
    pos = g.rotation_positions()
    rot = g.adjacency[u]
    d = len(rot)
    k = pos[u][v]
    return (d, len(g.adjacency[v]), tuple(len(g.adjacency[rot[(k + i) % d]]) for i in range(d)))


def map_automorphism_count(g: PlanarGraph, include_mirror: bool = False) -> int:
    """Number of map automorphisms, counted as darts equivalent to a base dart.

    A map automorphism is determined by the image of one dart, so the count
    equals the number of darts whose traversal code matches the base dart's.
    """
    darts = _darts(g)
    u0, v0 = darts[0]
    base = _code_from_dart(g, u0, v0, False)
    sig0 = _dart_signature(g, u0, v0)
    count = 0
    for u, v in darts:
        if _dart_signature(g, u, v) != sig0:
            continue
        if _code_from_dart(g, u, v, False) == base:
            count += 1
        elif include_mirror and _code_from_dart(g, u, v, True) == base:
            count += 1
    return count


# -- file format ------------------------------------------------------------

GRAPH_FORMAT_VERSION = 1


def write_graph(g: PlanarGraph, path) -> None:
    """Plain-text graph format; neighbor order is the rotation system."""
    lines = [f"version {GRAPH_FORMAT_VERSION}", f"vertex_count {g.vertex_count}",
             f"spherical {int(g.spherical)}"]
    for u, nbrs in enumerate(g.adjacency):
        lines.append(f"{u}: " + " ".join(str(v) for v in nbrs))
    if g.labels:
        lines.append("labels")
        for v in sorted(g.labels):
            lines.append(f"{v} {g.labels[v]}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_graph(path) -> PlanarGraph:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("version "):
        raise GraphError(f"{path}: missing version header")
    version = int(lines[0].split()[1])
    if version != GRAPH_FORMAT_VERSION:
        raise GraphError(f"{path}: unsupported graph format version {version}")
    n = int(lines[1].split()[1])
    spherical = bool(int(lines[2].split()[1]))
    adjacency = []
    labels = {}
    i = 3
    for u in range(n):
        head, _, rest = lines[i].partition(":")
        if int(head) != u:
            raise GraphError(f"{path}: expected adjacency row for vertex {u}")
        adjacency.append([int(tok) for tok in rest.split()])
        i += 1
    if i < len(lines) and lines[i] == "labels":
        for ln in lines[i + 1:]:
            v, _, tag = ln.partition(" ")
            labels[int(v)] = tag
    return PlanarGraph(adjacency, labels=labels, spherical=spherical)


# -- common constructions ----------------------------------------------------


def path_graph(n: int) -> PlanarGraph:
    """Path on n vertices 0 - 1 - ... - (n-1)."""
    if n < 2:
        raise GraphError("path needs >= 2 vertices")
    adj = [[1]] + [[i - 1, i + 1] for i in range(1, n - 1)] + [[n - 2]]
    return PlanarGraph(adj)


def cycle_graph(n: int) -> PlanarGraph:
    if n < 3:
        raise GraphError("cycle needs >= 3 vertices")
    adj = [[(i - 1) % n, (i + 1) % n] for i in range(n)]
    return PlanarGraph(adj, spherical=True)


def grid_graph(nx: int, ny: int) -> PlanarGraph:
    """nx-by-ny vertex grid with the planar rotation (E, N, W, S)."""

    def vid(i, j):
        return j * nx + i

    adj = []
    for j in range(ny):
        for i in range(nx):
            row = []
            if i + 1 < nx:
                row.append(vid(i + 1, j))
            if j + 1 < ny:
                row.append(vid(i, j + 1))
            if i > 0:
                row.append(vid(i - 1, j))
            if j > 0:
                row.append(vid(i, j - 1))
            adj.append(row)
    return PlanarGraph(adj, spherical=True)


def complete_graph(n: int) -> PlanarGraph:
    if n == 4:
        return tetrahedron_graph()
    adj = [[v for v in range(n) if v != u] for u in range(n)]
    return PlanarGraph(adj, spherical=(n == 3))


def tetrahedron_graph() -> PlanarGraph:
    return PlanarGraph.from_faces([(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)])


def flower_graph(k: int = 6) -> PlanarGraph:
    """Wheel: hub 0 joined to a k-cycle 1..k (the k-flower of circle packing)."""
    if k < 3:
        raise GraphError("flower needs >= 3 petals")
    faces = [(0, i, i % k + 1) for i in range(1, k + 1)]
    outer = tuple(range(k, 0, -1))
    return PlanarGraph.from_faces(list(faces) + [outer], vertex_count=k + 1)
