"""Simple-random-walk statistics, exact and Monte Carlo.

Return probabilities pair consecutive steps, p_n(x,x) + p_{n+1}(x,x), to
neutralize bipartite parity (the snowball quadrangulations are bipartite).
Monte-Carlo randomness is a counter-based hash keyed by
(seed, trial, step), so trials are order-independent and the whole run is
reproducible bit for bit from the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .fitting import ExponentFit, fit_power_law  # noqa: F401  (re-exported)
from .planar_graph import PlanarGraph, bfs_distances

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix64(x):
    x = np.asarray(x, dtype=np.uint64)
    x = (x ^ (x >> np.uint64(30))) * _MIX1
    x = (x ^ (x >> np.uint64(27))) * _MIX2
    return x ^ (x >> np.uint64(31))


def counter_random(seed: int, trial, step) -> np.ndarray:
    """Uniform uint64 stream indexed by (seed, trial, step)."""
    with np.errstate(over="ignore"):
        s = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
        t = np.asarray(trial, dtype=np.uint64)
        n = np.asarray(step, dtype=np.uint64)
        return _mix64(_mix64(s ^ _mix64(t + _GAMMA)) + (n + np.uint64(1)) * _GAMMA)


@dataclass(frozen=True)
class WalkConfig:
    seed: int
    trials: int = 1000
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


# -- exact heat kernel ---------------------------------------------------------


@dataclass(frozen=True)
class HeatKernelCurve:
    """Paired diagonal heat kernel values from one start vertex.

    values[i] = p_n(x,x) + p_{n+1}(x,x) at n = n_values[i]; distributions
    holds full p_n(x, .) vectors at the requested checkpoints (and at n+1,
    for the paired lower bound).  monotone_from is the first index from
    which the paired values are non-increasing (checked, not assumed).
    """

    x: int
    n_values: np.ndarray
    values: np.ndarray
    diagonal: np.ndarray            # p_n(x,x) for n = 0..n_max
    distributions: dict = field(default_factory=dict)
    monotone_from: int = 0
    mass_drift: float = 0.0         # worst |sum_y p_n(x,y) - 1| over all n

    def pair_checkpoints(self):
        """Checkpoint n with both p_n and p_{n+1} distributions retained."""
        return sorted(n for n in self.distributions if n + 1 in self.distributions)


def transition_operator(g: PlanarGraph) -> sp.csr_matrix:
    """W = A D^{-1}, so that p_{n+1} = W p_n for column distributions."""
    A = g.adjacency_csr()
    deg = np.asarray(A.sum(axis=1)).ravel()
    return (A @ sp.diags(1.0 / deg)).tocsr()


def heat_kernel_exact(g: PlanarGraph, x: int, n_max: int, checkpoints=(),
                      budget: int = 5_000_000_000) -> HeatKernelCurve:
    """Exact walk distribution from x by n_max applications of the operator."""
    if n_max * g.edge_count > budget:
        raise ValueError(f"resource budget exceeded: {n_max} steps on {g.edge_count} edges")
    W = transition_operator(g)
    n = g.vertex_count
    v = np.zeros(n)
    v[x] = 1.0
    diag = np.empty(n_max + 1)
    diag[0] = 1.0
    want = set()
    for c in checkpoints:
        want.add(int(c))
        want.add(int(c) + 1)
    dists = {}
    drift = 0.0
    for step in range(1, n_max + 1):
        v = W @ v
        diag[step] = v[x]
        drift = max(drift, abs(float(v.sum()) - 1.0))
        if step in want:
            dists[step] = v.copy()
    ns = np.arange(1, n_max)
    paired = diag[1:n_max] + diag[2:n_max + 1]
    mono = len(paired) - 1
    while mono > 0 and paired[mono - 1] >= paired[mono]:
        mono -= 1
    return HeatKernelCurve(x=x, n_values=ns, values=paired, diagonal=diag,
                           distributions=dists, monotone_from=mono, mass_drift=drift)


# -- Monte Carlo ----------------------------------------------------------------


@dataclass(frozen=True)
class WalkStatistics:
    radii: tuple
    exit_mean: np.ndarray
    exit_stderr: np.ndarray
    censored_fraction: np.ndarray
    horizons: tuple
    displacement_mean: np.ndarray
    displacement_stderr: np.ndarray
    trials: int

    def trusted(self, threshold: float = 0.01) -> bool:
        return bool(np.all(self.censored_fraction < threshold))

    def exit_time_fit(self) -> ExponentFit:
        return fit_power_law(zip(self.radii, self.exit_mean))


def walk_monte_carlo(g: PlanarGraph, x: int, radii, horizons, cfg: WalkConfig) -> WalkStatistics:
    """Sample exit times from B(x,r) and displacements d(Y_0, Y_n).

    Exit from the strict ball B(x,r) happens at the first step with
    d(x, Y) >= r.  Trials hitting max_steps before exiting a ball are
    censored for that radius and excluded from its mean.
    """
    radii = tuple(sorted({int(r) for r in radii}))
    horizons = tuple(sorted({int(h) for h in horizons}))
    if any(r < 1 for r in radii):
        raise ValueError("radii must be >= 1")
    if horizons and horizons[-1] > cfg.max_steps:
        raise ValueError("horizons must not exceed max_steps")
    dist = bfs_distances(g, x)
    if radii and radii[-1] > dist.max():
        raise ValueError(f"radius {radii[-1]} exceeds the eccentricity {dist.max()} of x")
    A = g.adjacency_csr()
    indptr = A.indptr.astype(np.int64)
    indices = A.indices
    deg = np.diff(indptr).astype(np.uint64)

    T = cfg.trials
    trial_ids = np.arange(T, dtype=np.uint64)
    pos = np.full(T, x, dtype=np.int64)
    nr = np.zeros(T, dtype=np.int64)            # index of next radius to exit
    exit_time = np.full((T, len(radii)), -1, dtype=np.int64)
    disp = np.zeros((T, len(horizons)), dtype=np.int64)
    maxh = horizons[-1] if horizons else 0
    hpos = {h: i for i, h in enumerate(horizons)}
    R = len(radii)
    radii_arr = np.asarray(radii, dtype=np.int64)

    step = 0
    while step < cfg.max_steps:
        need_exit = nr < R
        active = need_exit if step >= maxh else np.ones(T, dtype=bool)
        if not active.any():
            break
        step += 1
        ids = np.flatnonzero(active)
        rnd = counter_random(cfg.seed, trial_ids[ids], np.uint64(step))
        p = pos[ids]
        choice = (rnd % deg[p]).astype(np.int64)
        p = indices[indptr[p] + choice].astype(np.int64)
        pos[ids] = p
        if R:
            dcur = dist[p]
            crossing = ids[(nr[ids] < R) & (dcur >= radii_arr[np.minimum(nr[ids], R - 1)])]
            if crossing.size:
                exit_time[crossing, nr[crossing]] = step
                nr[crossing] += 1
        if step in hpos:
            disp[:, hpos[step]] = dist[pos]

    exit_mean = np.empty(R)
    exit_stderr = np.empty(R)
    censored = np.empty(R)
    for i in range(R):
        t = exit_time[:, i]
        ok = t >= 0
        censored[i] = 1.0 - ok.mean()
        vals = t[ok].astype(np.float64)
        exit_mean[i] = vals.mean() if vals.size else np.nan
        exit_stderr[i] = vals.std(ddof=1) / np.sqrt(vals.size) if vals.size > 1 else np.nan
    dm = disp.mean(axis=0).astype(np.float64)
    ds = disp.std(axis=0, ddof=1) / np.sqrt(T) if T > 1 else np.zeros(len(horizons))
    return WalkStatistics(radii=radii, exit_mean=exit_mean, exit_stderr=exit_stderr,
                          censored_fraction=censored, horizons=horizons,
                          displacement_mean=dm, displacement_stderr=ds, trials=T)


def exact_exit_times(g: PlanarGraph, x: int, r: int, max_vertices: int = 1000) -> float:
    """E tau_{B(x,r)} by a dense linear solve; the small-graph oracle."""
    dist = bfs_distances(g, x)
    ball = np.flatnonzero(dist < r)
    if ball.size > max_vertices:
        raise ValueError(f"ball has {ball.size} vertices, oracle capped at {max_vertices}")
    if ball.size == dist.size:
        raise ValueError("ball is the whole graph; exit time infinite")
    index = {int(v): i for i, v in enumerate(ball)}
    m = ball.size
    P = np.zeros((m, m))
    for v in ball:
        nbrs = g.adjacency[v]
        w = 1.0 / len(nbrs)
        for u in nbrs:
            j = index.get(int(u))
            if j is not None:
                P[index[int(v)], j] += w
    t = np.linalg.solve(np.eye(m) - P, np.ones(m))
    return float(t[index[x]])


# -- checkpoint distribution files ------------------------------------------------

_HK_MAGIC = b"PKHK\x01\x00"


def write_distribution(path, vec: np.ndarray, n: int) -> None:
    """Binary checkpoint vector: magic, vertex count, step index, float64 data."""
    vec = np.asarray(vec, dtype=np.float64)
    with open(path, "wb") as fh:
        fh.write(_HK_MAGIC)
        fh.write(np.array([vec.size, n], dtype=np.uint64).tobytes())
        fh.write(vec.tobytes())


def read_distribution(path):
    """Returns (vector, n)."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_HK_MAGIC))
        if magic != _HK_MAGIC:
            raise ValueError(f"{path}: not a checkpoint distribution file")
        size, n = np.frombuffer(fh.read(16), dtype=np.uint64)
        vec = np.frombuffer(fh.read(int(size) * 8), dtype=np.float64)
        if vec.size != size:
            raise ValueError(f"{path}: truncated distribution file")
    return vec.copy(), int(n)


# -- sub-Gaussian envelope -------------------------------------------------------


@dataclass(frozen=True)
class EnvelopeReport:
    upper_c: float
    lower_c: float
    upper_bounded: bool
    lower_bounded: bool
    upper_points: int
    lower_points: int


def subgaussian_envelope(curve: HeatKernelCurve, distances: np.ndarray, d: float,
                         d_w: float, c_cap: float = 1e6, c_tol: float = 1e-3,
                         max_distance: float | None = None,
                         min_prob: float = 1e-300) -> EnvelopeReport:
    """Smallest constants making the two-sided heat kernel envelope hold.

    Upper: p_n(x,y) <= C n^{-d/d_w} exp(-(dist^{d_w}/(C n))^{1/(d_w-1)}) at
    every retained checkpoint.  Lower: p_n + p_{n+1} >= the mirrored bound
    over pairs with n >= 1 v dist.  Values beyond the cap are reported
    unbounded.  Probabilities below ``min_prob`` are skipped (underflow).
    """
    if d_w <= 1:
        raise ValueError("d_w must exceed 1")
    dist = np.asarray(distances, dtype=np.float64)
    ns = sorted(curve.distributions)
    if not ns:
        raise ValueError("curve carries no checkpoint distributions")
    if max_distance is None:
        max_distance = 4.0 * max(ns) ** (1.0 / d_w)
    alpha = d / d_w
    beta = 1.0 / (d_w - 1.0)

    up_n, up_p, up_dist = [], [], []
    for n in ns:
        p = curve.distributions[n]
        mask = (dist <= max_distance) & (p >= min_prob)
        up_n.append(np.full(mask.sum(), n, dtype=np.float64))
        up_p.append(p[mask])
        up_dist.append(dist[mask])
    un = np.concatenate(up_n)
    up = np.concatenate(up_p)
    ud = np.concatenate(up_dist)

    def upper_ok(C):
        # log p <= log C - alpha log n - (dist^dw / (C n))^beta
        return np.all(np.log(up) <= np.log(C) - alpha * np.log(un) + -((ud**d_w / (C * un)) ** beta))

    lo_n, lo_q, lo_dist = [], [], []
    for n in curve.pair_checkpoints():
        q = curve.distributions[n] + curve.distributions[n + 1]
        mask = (dist <= max_distance) & (dist <= n) & (q >= min_prob)
        lo_n.append(np.full(mask.sum(), n, dtype=np.float64))
        lo_q.append(q[mask])
        lo_dist.append(dist[mask])
    ln_ = np.concatenate(lo_n) if lo_n else np.empty(0)
    lq = np.concatenate(lo_q) if lo_q else np.empty(0)
    ld = np.concatenate(lo_dist) if lo_dist else np.empty(0)

    def lower_ok(C):
        if ln_.size == 0:
            return True
        return np.all(np.log(lq) >= -np.log(C) - alpha * np.log(ln_) - (C * ld**d_w / ln_) ** beta)

    def bisect(ok):
        if not ok(c_cap):
            return float("inf"), False
        lo, hi = 1.0, c_cap
        if ok(lo):
            return lo, True
        while hi - lo > c_tol:
            mid = 0.5 * (lo + hi)
            if ok(mid):
                hi = mid
            else:
                lo = mid
        return hi, True

    uc, ub = bisect(upper_ok)
    lc, lb = bisect(lower_ok)
    return EnvelopeReport(upper_c=uc, lower_c=lc, upper_bounded=ub, lower_bounded=lb,
                          upper_points=int(un.size), lower_points=int(ln_.size))
