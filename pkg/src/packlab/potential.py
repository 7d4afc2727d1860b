"""Discrete potential theory: harmonic functions, capacity, modulus.

The harmonic hitting probability u (1 on E, 0 on F) minimizes the Dirichlet
energy sum c_e (u_x - u_y)^2 among functions with that boundary data; the
minimum is the capacity / effective conductance between the sets, and for
unit conductances it equals the discrete 2-modulus of the connecting curve
family (edge-density version, by convex duality).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .planar_graph import PlanarGraph, bfs_distances


class SolveError(RuntimeError):
    """Linear solver failed to reach the requested residual."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class DirichletProblem:
    """Boundary data u = 1 on source_set, u = 0 on sink_set."""

    graph: PlanarGraph
    source_set: frozenset
    sink_set: frozenset
    conductances: np.ndarray | None = None  # per edge, in graph.edges() order

    def __post_init__(self):
        E = frozenset(int(v) for v in self.source_set)
        F = frozenset(int(v) for v in self.sink_set)
        object.__setattr__(self, "source_set", E)
        object.__setattr__(self, "sink_set", F)
        if not E or not F:
            raise ValueError("source and sink sets must be nonempty")
        if E & F:
            raise ValueError("source and sink sets must be disjoint")
        n = self.graph.vertex_count
        if any(not 0 <= v < n for v in E | F):
            raise ValueError("source/sink vertex out of range")
        if self.conductances is not None:
            c = np.asarray(self.conductances, dtype=np.float64)
            if c.shape != (self.graph.edge_count,):
                raise ValueError("conductances must have one entry per edge")
            if np.any(c <= 0):
                raise ValueError("conductances must be positive")
            object.__setattr__(self, "conductances", c)


@dataclass(frozen=True)
class PotentialSolution:
    u: np.ndarray
    energy: float
    residual: float
    iterations: int


def _edge_arrays(g: PlanarGraph):
    edges = g.edges()
    eu = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
    ev = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
    return eu, ev


def _weighted_laplacian(g: PlanarGraph, cond: np.ndarray) -> sp.csr_matrix:
    eu, ev = _edge_arrays(g)
    n = g.vertex_count
    rows = np.concatenate([eu, ev, eu, ev])
    cols = np.concatenate([ev, eu, eu, ev])
    vals = np.concatenate([-cond, -cond, cond, cond])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def solve_dirichlet(problem: DirichletProblem, tol: float = DEFAULT_TOL) -> PotentialSolution:
    """Harmonic extension of the boundary data, with its Dirichlet energy.

    The reported residual is the worst violation of the weighted-average
    property at a free vertex, normalized by the vertex's total conductance.
    """
    g = problem.graph
    n = g.vertex_count
    cond = problem.conductances
    if cond is None:
        cond = np.ones(g.edge_count, dtype=np.float64)
    L = _weighted_laplacian(g, cond)
    u = np.zeros(n, dtype=np.float64)
    src = np.fromiter(sorted(problem.source_set), dtype=np.int64)
    snk = np.fromiter(sorted(problem.sink_set), dtype=np.int64)
    u[src] = 1.0
    fixed = np.zeros(n, dtype=bool)
    fixed[src] = True
    fixed[snk] = True
    free = np.flatnonzero(~fixed)
    iterations = 0
    if free.size:
        Lff = L[free][:, free].tocsr()
        b = -(L[free][:, src] @ np.ones(src.size))
        diag = Lff.diagonal()
        M = sp.diags(1.0 / diag)
        rtol = min(1e-12, tol * 1e-3)
        x = np.zeros(free.size)
        for attempt in range(3):
            x, info = cg(Lff, b, x0=x, rtol=rtol, atol=0.0, maxiter=40 * n, M=M)
            iterations += 1
            u[free] = x
            res = _harmonic_residual(L, u, free)
            if res <= tol:
                break
            rtol *= 1e-3
        else:
            raise SolveError("Dirichlet solve did not converge", res)
    eu, ev = _edge_arrays(g)
    du = u[eu] - u[ev]
    energy = float(np.dot(cond * du, du))
    residual = _harmonic_residual(L, u, free) if free.size else 0.0
    return PotentialSolution(u=u, energy=energy, residual=residual, iterations=iterations)


def _harmonic_residual(L: sp.csr_matrix, u: np.ndarray, free: np.ndarray) -> float:
    if free.size == 0:
        return 0.0
    r = (L @ u)[free] / L.diagonal()[free]
    return float(np.max(np.abs(r)))


def dirichlet_flow(problem: DirichletProblem, solution: PotentialSolution) -> float:
    """Net current out of the source set (Green identity check)."""
    g = problem.graph
    cond = problem.conductances
    if cond is None:
        cond = np.ones(g.edge_count, dtype=np.float64)
    u = solution.u
    total = 0.0
    for (a, b), c in zip(g.edges(), cond):
        if (a in problem.source_set) != (b in problem.source_set):
            if b in problem.source_set:
                a, b = b, a
            total += c * (u[a] - u[b])
    return total


# -- capacity ----------------------------------------------------------------


def capacity(g: PlanarGraph, conductances, A, D, tol: float = DEFAULT_TOL) -> float:
    """Cap_D(A): energy of the harmonic u with u = 1 on A, u = 0 off D."""
    A = set(int(v) for v in A)
    D = set(int(v) for v in D)
    if not A:
        raise ValueError("A must be nonempty")
    if not A <= D:
        raise ValueError("A must be contained in D")
    sink = set(range(g.vertex_count)) - D
    if not sink:
        raise ValueError("D must omit at least one vertex (no sink otherwise)")
    prob = DirichletProblem(g, frozenset(A), frozenset(sink), conductances)
    return solve_dirichlet(prob, tol=tol).energy


@dataclass(frozen=True)
class AnnulusCapacityEntry:
    k: int
    outer_radius: int
    cap: float | None          # None when the outer ball swallows the graph
    product: float | None      # k * cap
    trusted: bool
    residual: float = 0.0
    iterations: int = 0


@dataclass(frozen=True)
class AnnulusCapacityScan:
    center: int
    inner_radius: int
    entries: tuple[AnnulusCapacityEntry, ...]
    cap_le_at_2: float | None   # Cap_{B(x,2r)}(B(x,r)), the fixed-M = 2 bound

    def products(self):
        return [e.product for e in self.entries if e.product is not None]

    def log_law_ok(self, geometric_ratio: float = 1.6) -> bool:
        """False when capacities decay geometrically rather than like 1/k.

        Under the log law Cap_k/Cap_{k+1} tends to (k+1)/k; geometric decay
        keeps the ratio near 2.  The last available ratio decides.
        """
        caps = [e.cap for e in self.entries if e.cap is not None]
        if len(caps) < 2:
            return True
        return caps[-2] / caps[-1] < geometric_ratio


def annulus_capacity_scan(g: PlanarGraph, x: int, r: int, ks, boundary=None,
                          tol: float = DEFAULT_TOL) -> AnnulusCapacityScan:
    """Cap_{B(x, 2^k r)}(B(x, r)) for each k, with k*Cap products.

    Scales whose outer ball swallows the whole (finite) graph are marked
    invalid rather than raising.  When a boundary vertex set is supplied,
    scales whose outer radius comes within 2 BFS steps of it are flagged
    untrusted.
    """
    dist = bfs_distances(g, x)
    n = g.vertex_count
    inner = np.flatnonzero(dist < r)
    if inner.size == 0 or inner.size == n:
        raise ValueError("inner ball must be a proper nonempty subset")
    bdist = None
    if boundary is not None and len(boundary):
        bdist = int(bfs_distances(g, list(boundary))[x])
    entries = []
    for k in sorted(int(k) for k in ks):
        R = (2**k) * r
        outer = dist < R
        if outer.all():
            entries.append(AnnulusCapacityEntry(k, R, None, None, False))
            continue
        sink = np.flatnonzero(~outer)
        sol = solve_dirichlet(DirichletProblem(g, frozenset(inner.tolist()),
                                               frozenset(sink.tolist())), tol=tol)
        trusted = True if bdist is None else (R + 2 <= bdist)
        entries.append(AnnulusCapacityEntry(k, R, sol.energy, k * sol.energy, trusted,
                                            residual=sol.residual,
                                            iterations=sol.iterations))
    outer2 = dist < 2 * r
    cap2 = None
    if not outer2.all():
        cap2 = capacity(g, None, inner.tolist(), np.flatnonzero(outer2).tolist(), tol=tol)
    return AnnulusCapacityScan(x, r, tuple(entries), cap2)


# -- modulus -----------------------------------------------------------------


def edge_modulus(g: PlanarGraph, E, F, tol: float = DEFAULT_TOL) -> float:
    """Discrete 2-modulus of the E-F curve family with unit edge weights.

    Equals the unit-conductance capacity Cap_{F^c}(E) by duality; the
    production path is the Dirichlet solve.  Edge lengths never enter.
    """
    E = frozenset(int(v) for v in E)
    F = frozenset(int(v) for v in F)
    prob = DirichletProblem(g, E, F, None)
    return solve_dirichlet(prob, tol=tol).energy


# -- Poincare constant --------------------------------------------------------


def poincare_constant(g: PlanarGraph, ball_vertices, tol: float = 1e-8,
                      max_iterations: int = 10_000) -> float:
    """lambda(B) = sup_f sum_B (f - mean)^2 / sum_{edges in B} (df)^2.

    Computed as 1/lambda_2 of the Neumann (induced-subgraph) Laplacian via
    inverse iteration with the constant vector deflated.
    """
    verts = sorted(int(v) for v in ball_vertices)
    if len(verts) < 2:
        raise ValueError("ball must have at least 2 vertices")
    index = {v: i for i, v in enumerate(verts)}
    m = len(verts)
    rows, cols = [], []
    for v in verts:
        for w in g.adjacency[v]:
            if w in index:
                rows.append(index[v])
                cols.append(index[w])
    if not rows:
        raise ValueError("induced ball has no edges")
    vals = np.ones(len(rows))
    A = sp.csr_matrix((vals, (rows, cols)), shape=(m, m))
    deg = np.asarray(A.sum(axis=1)).ravel()
    L = sp.diags(deg) - A
    # connectivity of the induced subgraph
    ncomp = sp.csgraph.connected_components(A, directed=False, return_labels=False)
    if ncomp != 1:
        raise ValueError("induced ball is disconnected (Poincare constant infinite)")
    if m == 2:
        return 0.5
    # inverse iteration on the orthogonal complement of constants
    x = np.arange(m, dtype=np.float64)
    x -= x.mean()
    x /= np.linalg.norm(x)
    M = sp.diags(1.0 / np.maximum(deg, 1.0))
    lam_prev = np.inf
    for _ in range(max_iterations):
        y, info = cg(L, x, rtol=1e-12, atol=0.0, maxiter=20 * m, M=M)
        y -= y.mean()
        ny = np.linalg.norm(y)
        if ny == 0 or info != 0:
            raise SolveError("inverse iteration inner solve failed", float(info))
        lam = float(y @ x) / float(y @ y)  # Rayleigh quotient of L at y
        x = y / ny
        if abs(lam - lam_prev) <= tol * abs(lam):
            return 1.0 / lam
        lam_prev = lam
    raise SolveError("inverse iteration did not converge", abs(lam - lam_prev))


def psi_scaling(r: float, d: float) -> float:
    """Space-time scaling Psi(r) = r^2 v r^d used for the Poincare comparison."""
    return max(r**2, r**d)
