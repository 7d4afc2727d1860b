"""The two subdivision rules: 13-3 snowball squares and 6-2 pentagons.

Level-n complexes are polygonal 2-complexes on the sphere.  The cube rule
replaces each square by a 3x3 grid whose central subsquare is swapped for
an open box (4 lateral squares plus a top), 13 quadrilaterals in all; the
pentagon rule inserts side midpoints and an inner pentagon, 6 pentagons in
all.  Face counts are 6*13^n and 12*6^n, with side lengths 3^-n and 2^-n.

One face per base face stays marked "central" at every level (the box top,
resp. the inner pentagon); the base point is the smallest vertex id on a
central face.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import cached_property

from .planar_graph import GraphError, PlanarGraph, bfs_distances, write_graph, read_graph

DEFAULT_MAX_LEVEL = 5


class ResourceGuardError(RuntimeError):
    """Requested level exceeds the configured resource guard."""


class SubdivisionComplex:
    """Polygonal sphere complex at a given subdivision level."""

    def __init__(self, level, base_kind, vertex_count, faces, central_faces, side_length):
        self.level = int(level)
        self.base_kind = base_kind
        self.vertex_count = int(vertex_count)
        self.faces = tuple(tuple(f) for f in faces)
        self.central_faces = tuple(central_faces)
        self.side_length = Fraction(side_length)

    @cached_property
    def graph(self) -> PlanarGraph:
        return PlanarGraph.from_faces(self.faces, vertex_count=self.vertex_count)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def edge_count(self) -> int:
        return sum(len(f) for f in self.faces) // 2

    def base_point(self) -> int:
        """Smallest vertex id lying on a central face."""
        return min(v for i in self.central_faces for v in self.faces[i])

    def check_invariants(self) -> None:
        v, e, f = self.vertex_count, self.edge_count, self.face_count
        if v - e + f != 2:
            raise GraphError(f"Euler relation fails: {v} - {e} + {f} != 2")
        if self.base_kind == "cube":
            if any(len(face) != 4 for face in self.faces):
                raise GraphError("cube-based complex has a non-quadrilateral face")
            if f != 6 * 13**self.level:
                raise GraphError(f"cube-based complex has {f} faces, expected {6 * 13 ** self.level}")
        else:
            if any(len(face) != 5 for face in self.faces):
                raise GraphError("dodecahedron-based complex has a non-pentagonal face")
            if f != 12 * 6**self.level:
                raise GraphError(f"pentagonal complex has {f} faces, expected {12 * 6 ** self.level}")


# -- base complexes ----------------------------------------------------------


def _cube_faces():
    # Vertices are the cube corners numbered by bits (x, y, z); faces are
    # oriented consistently (outward-facing cycles traverse each edge twice
    # in opposite directions across the six squares).
    # Corners 0..3 on the bottom square, 4..7 above them.
    return [
        (0, 3, 2, 1),
        (4, 5, 6, 7),
        (0, 1, 5, 4),
        (1, 2, 6, 5),
        (2, 3, 7, 6),
        (3, 0, 4, 7),
    ]


def _dodecahedron_faces():
    """The 12 oriented pentagons, derived from the standard coordinates.

    Vertices are the 20 points (+-1,+-1,+-1), (0,+-1/phi,+-phi) and cyclic
    shifts; each face is the set of 5 vertices on a supporting plane of the
    convex hull, ordered by angle around the outward normal.
    """
    import math

    phi = (1 + math.sqrt(5)) / 2
    pts = []
    for sx in (-1, 1):
        for sy in (-1, 1):
            for sz in (-1, 1):
                pts.append((sx, sy, sz))
    for a in (-1 / phi, 1 / phi):
        for b in (-phi, phi):
            pts.append((0.0, a, b))
            pts.append((a, b, 0.0))
            pts.append((b, 0.0, a))
    # The 12 face centers lie along (+-1, 0, +-phi) and cyclic shifts.
    normals = []
    for a in (-1, 1):
        for b in (-phi, phi):
            normals.append((a, 0.0, b))
            normals.append((b, a, 0.0))
            normals.append((0.0, b, a))
    faces = []
    for nrm in normals:
        dots = [sum(p[i] * nrm[i] for i in range(3)) for p in pts]
        top = max(dots)
        members = [v for v, d in enumerate(dots) if d > top - 1e-9]
        assert len(members) == 5
        # order around the outward normal
        nx, ny, nz = nrm
        nlen = math.sqrt(nx * nx + ny * ny + nz * nz)
        n = (nx / nlen, ny / nlen, nz / nlen)
        centroid = tuple(sum(pts[v][i] for v in members) / 5 for i in range(3))
        ref = tuple(pts[members[0]][i] - centroid[i] for i in range(3))
        # orthonormal frame (e1, e2) in the face plane with e1 x e2 = n
        r_dot_n = sum(ref[i] * n[i] for i in range(3))
        e1 = tuple(ref[i] - r_dot_n * n[i] for i in range(3))
        e1len = math.sqrt(sum(c * c for c in e1))
        e1 = tuple(c / e1len for c in e1)
        e2 = (n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0])

        def angle(v):
            d = tuple(pts[v][i] - centroid[i] for i in range(3))
            return math.atan2(sum(d[i] * e2[i] for i in range(3)), sum(d[i] * e1[i] for i in range(3)))

        members.sort(key=angle)
        faces.append(tuple(members))
    return faces


def base_complex(kind: str) -> SubdivisionComplex:
    """Level-0 complex: the cube (6 squares) or the dodecahedron (12 pentagons)."""
    if kind == "cube":
        faces = _cube_faces()
        c = SubdivisionComplex(0, "cube", 8, faces, range(len(faces)), Fraction(1))
    elif kind == "dodecahedron":
        faces = _dodecahedron_faces()
        c = SubdivisionComplex(0, "dodecahedron", 20, faces, range(len(faces)), Fraction(1))
    else:
        raise ValueError(f"unknown base kind {kind!r} (expected 'cube' or 'dodecahedron')")
    c.check_invariants()
    return c


# -- subdivision -------------------------------------------------------------


class _VertexAllocator:
    def __init__(self, start, edge_points_per_side):
        self.next_id = start
        self.m = edge_points_per_side
        self.edge_points = {}

    def fresh(self, count):
        ids = list(range(self.next_id, self.next_id + count))
        self.next_id += count
        return ids

    def along_edge(self, a, b):
        """Ids of the subdivision points on edge {a,b}, ordered from a to b."""
        key = (a, b) if a < b else (b, a)
        if key not in self.edge_points:
            self.edge_points[key] = self.fresh(self.m)
        pts = self.edge_points[key]
        return pts if a < b else pts[::-1]


def _subdivide_square(face, alloc):
    """13 child quadrilaterals of one square face (central child last)."""
    p0, p1, p2, p3 = face
    b = alloc.along_edge(p0, p1)
    r = alloc.along_edge(p1, p2)
    t = alloc.along_edge(p2, p3)
    lf = alloc.along_edge(p3, p0)
    i11, i21, i22, i12 = alloc.fresh(4)
    # 4x4 grid of corner/edge/interior points, g[i][j] at (i/3, j/3)
    g = [
        [p0, lf[1], lf[0], p3],
        [b[0], i11, i12, t[1]],
        [b[1], i21, i22, t[0]],
        [p1, r[0], r[1], p2],
    ]
    children = []
    for j in range(3):
        for i in range(3):
            if i == 1 and j == 1:
                continue
            children.append((g[i][j], g[i + 1][j], g[i + 1][j + 1], g[i][j + 1]))
    # open box over the central subsquare: 4 laterals then the top
    c = (i11, i21, i22, i12)
    tt = alloc.fresh(4)
    for k in range(4):
        children.append((c[k], c[(k + 1) % 4], tt[(k + 1) % 4], tt[k]))
    children.append(tuple(tt))
    return children


def _subdivide_pentagon(face, alloc):
    """6 child pentagons of one pentagonal face (central child last)."""
    m = [alloc.along_edge(face[k], face[(k + 1) % 5])[0] for k in range(5)]
    q = alloc.fresh(5)
    children = []
    for k in range(5):
        children.append((face[k], m[k], q[k], q[(k - 1) % 5], m[(k - 1) % 5]))
    children.append(tuple(q))
    return children


def subdivide(c: SubdivisionComplex) -> SubdivisionComplex:
    """One application of the complex's subdivision rule."""
    if c.base_kind == "cube":
        rule, per_side, ratio = _subdivide_square, 2, 3
    else:
        rule, per_side, ratio = _subdivide_pentagon, 1, 2
    alloc = _VertexAllocator(c.vertex_count, per_side)
    central = set(c.central_faces)
    new_faces = []
    new_central = []
    for idx, face in enumerate(c.faces):
        children = rule(face, alloc)
        if idx in central:
            new_central.append(len(new_faces) + len(children) - 1)
        new_faces.extend(children)
    return SubdivisionComplex(
        c.level + 1, c.base_kind, alloc.next_id, new_faces, new_central,
        c.side_length / ratio,
    )


def level_graph(kind: str, n: int, max_level: int = DEFAULT_MAX_LEVEL):
    """Iterated subdivision from the base complex, with its base point.

    Returns (complex, base_point).  Levels past ``max_level`` are refused.
    """
    if n < 0:
        raise ValueError("level must be nonnegative")
    if n > max_level:
        raise ResourceGuardError(f"level {n} exceeds the resource guard {max_level}")
    c = base_complex(kind)
    for _ in range(n):
        c = subdivide(c)
    c.check_invariants()
    return c, c.base_point()


def antipodal_face(c: SubdivisionComplex, base_point: int) -> int:
    """Face farthest from the base point (max-min BFS distance, lexicographic ties)."""
    dist = bfs_distances(c.graph, base_point)
    best = None
    for i, f in enumerate(c.faces):
        d = min(int(dist[v]) for v in f)
        key = (-d, tuple(f))
        if best is None or key < best[0]:
            best = (key, i)
    return best[1]


# -- serialization -----------------------------------------------------------


def write_complex(c: SubdivisionComplex, graph_path, sidecar_path) -> None:
    """Graph file plus a JSON sidecar with faces, level, kind, and base point."""
    write_graph(c.graph, graph_path)
    doc = {
        "level": c.level,
        "base_kind": c.base_kind,
        "vertex_count": c.vertex_count,
        "side_length": str(c.side_length),
        "base_point": c.base_point(),
        "central_faces": list(c.central_faces),
        "faces": [list(f) for f in c.faces],
    }
    with open(sidecar_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=None, separators=(",", ":"), sort_keys=True)
        fh.write("\n")


def read_complex(graph_path, sidecar_path) -> SubdivisionComplex:
    with open(sidecar_path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    c = SubdivisionComplex(
        doc["level"], doc["base_kind"], doc["vertex_count"],
        [tuple(f) for f in doc["faces"]], doc["central_faces"],
        Fraction(doc["side_length"]),
    )
    g = read_graph(graph_path)
    if g.adjacency != c.graph.adjacency:
        raise GraphError(f"{graph_path} does not match the complex sidecar {sidecar_path}")
    return c
