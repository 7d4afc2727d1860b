"""Command-line driver: generate, pack, and analyze subdivision graphs.

Every command persists its artifacts next to a manifest of input digests,
parameters, and output hashes.  Exit codes: 0 success, 2 invalid input,
3 non-convergence, 4 resource guard.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .fitting import fit_power_law
from .planar_graph import (
    GraphError,
    bfs_distances,
    graph_ball,
    read_graph,
    write_graph,
)
from .packing import (
    LayoutError,
    NonConvergenceError,
    PackingError,
    check_good_embedding,
    length_metric,
    pack,
    prepare_disk,
    read_packing,
    write_packing,
    write_packing_svg,
)
from .potential import SolveError, annulus_capacity_scan, poincare_constant, psi_scaling
from .qs import (
    MetricPair,
    geodesic_segment,
    loewner_scan,
    qs_profile,
    sample_trusted_vertices,
    sphere_arc,
)
from .reports import RunManifest, figure_loglog_fit, figure_scatter, figure_series, write_csv
from .subdivision import ResourceGuardError, level_graph, write_complex
from .walks import (
    WalkConfig,
    heat_kernel_exact,
    subgaussian_envelope,
    walk_monte_carlo,
    write_distribution,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NONCONVERGENCE = 3
EXIT_GUARD = 4

DEFAULT_MAX_LEVEL = 5


def sidecar_path(graph_path) -> str:
    return str(graph_path) + ".sidecar.json"


def _load_base_point(graph_path):
    """(base_point, kind, level) from the sidecar when present."""
    import json

    sc = sidecar_path(graph_path)
    if os.path.exists(sc):
        with open(sc, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return doc["base_point"], doc.get("base_kind"), doc.get("level")
    return 0, None, None


def cmd_generate(args) -> int:
    c, p = level_graph(args.kind, args.level, max_level=args.unsafe_level or DEFAULT_MAX_LEVEL)
    write_complex(c, args.out, sidecar_path(args.out))
    manifest = RunManifest("generate", __version__,
                           {"kind": args.kind, "level": args.level})
    manifest.add_output(args.out)
    manifest.add_output(sidecar_path(args.out))
    manifest.write(str(args.out) + ".manifest.txt")
    print(f"generated {args.kind} level {args.level}: V={c.vertex_count} "
          f"E={c.edge_count} F={c.face_count} base_point={p}")
    print(f"graph: {args.out}\nsidecar: {sidecar_path(args.out)}")
    return EXIT_OK


def cmd_pack(args) -> int:
    g = read_graph(args.graph)
    base, _, _ = _load_base_point(args.graph)
    tri, removed = prepare_disk(g, base_point=base)
    packing = pack(tri, removed_face=removed, boundary_radius=1.0, tol=args.tol,
                   layout_tol=args.layout_tol)
    tri_path = str(args.out) + ".tri.graph"
    write_graph(tri, tri_path)
    write_packing(packing, args.out)
    report = check_good_embedding(packing, D=args.good_d, eta=args.good_eta)
    with open(args.out, "a", encoding="utf-8", newline="\n") as fh:
        fh.write(f"goodembedding max_angle {report.max_angle!r}\n"
                 f"goodembedding max_adjacent_length_ratio {report.max_adjacent_length_ratio!r}\n"
                 f"goodembedding max_adjacent_radius_ratio {report.max_adjacent_radius_ratio!r}\n")
    outputs = [args.out, tri_path]
    if args.svg:
        svg_path = str(args.out) + ".svg"
        write_packing_svg(packing, svg_path)
        outputs.append(svg_path)
    manifest = RunManifest("pack", __version__, {"tol": args.tol})
    manifest.add_input(args.graph)
    for o in outputs:
        manifest.add_output(o)
    manifest.write(str(args.out) + ".manifest.txt")
    print(f"packed {tri.vertex_count} circles in {packing.sweeps} iterations: "
          f"angle residual {packing.angle_residual:.3e}, "
          f"layout mismatch {packing.layout_mismatch:.3e}")
    print(f"good embedding: max angle {report.max_angle:.4f}, "
          f"adjacent length ratio {report.max_adjacent_length_ratio:.3f}, "
          f"adjacent radius ratio {report.max_adjacent_radius_ratio:.3f}")
    return EXIT_OK


def _parse_radii(text, default):
    if not text:
        return list(default)
    return [int(tok) for tok in text.split(",")]


def _suite_volume(g, base, radii, outdir, run_id, files):
    dist = bfs_distances(g, base)
    ecc = int(dist.max())
    if not radii:
        # dyadic defaults fitted to the graph's reach
        radii = [r for r in (4, 8, 16, 32, 64, 128, 256) if r <= ecc] or [2, 3, 4]
    usable = [r for r in radii if 2 <= r <= ecc]
    rows = [(run_id, base, r, int(np.count_nonzero(dist < r))) for r in usable]
    write_csv(os.path.join(outdir, "volume.csv"),
              ["run_id", "center", "radius", "ball_size"], rows)
    files.append("volume.csv")
    fit = fit_power_law([(r, c) for _, _, r, c in rows])
    write_csv(os.path.join(outdir, "volume_fit.csv"),
              ["run_id", "exponent", "r_squared", "r_min", "r_max"],
              [(run_id, fit.exponent, fit.r_squared, fit.window[0], fit.window[1])])
    files.append("volume_fit.csv")
    figure_loglog_fit(os.path.join(outdir, "volume.png"),
                      [r for _, _, r, _ in rows], [c for _, _, _, c in rows], fit,
                      "radius r", "|B(x,r)|", "ball volume growth")
    files.append("volume.png")
    return {"volume_exponent": fit.exponent, "volume_r2": fit.r_squared}


def _suite_capacity(g, base, radii, outdir, run_id, files, kind):
    r = radii[0] if radii else 8
    scan = annulus_capacity_scan(g, base, r, (1, 2, 3, 4))
    rows = []
    for e in scan.entries:
        rows.append((run_id, e.k, e.outer_radius,
                     e.cap if e.cap is not None else math.nan,
                     e.product if e.product is not None else math.nan,
                     e.trusted, e.cap is not None, e.residual, e.iterations))
    write_csv(os.path.join(outdir, "capacity.csv"),
              ["run_id", "k", "outer_radius", "capacity", "k_times_cap", "trusted",
               "valid", "residual", "iterations"],
              rows)
    files.append("capacity.csv")
    write_csv(os.path.join(outdir, "capacity_summary.csv"),
              ["run_id", "inner_radius", "cap_le_M2", "log_law_ok"],
              [(run_id, r, scan.cap_le_at_2 if scan.cap_le_at_2 is not None else math.nan,
                scan.log_law_ok())])
    files.append("capacity_summary.csv")
    products = scan.products()
    if products:
        figure_series(os.path.join(outdir, "capacity.png"),
                      [e.k for e in scan.entries if e.product is not None], products,
                      "k", "k * Cap(B(x,r), B(x,2^k r))", "capacity log law")
        files.append("capacity.png")
    # Poincare constants on balls, against Psi(r) = r^2 v r^d
    d = {"cube": math.log(13) / math.log(3),
         "dodecahedron": math.log(6) / math.log(2)}.get(kind, 2.0)
    prows = []
    for rr in radii or (8, 16, 32):
        ball = graph_ball(g, base, rr)
        if ball.size < 2 or ball.size > 20000 or ball.size == g.vertex_count:
            continue
        lam = poincare_constant(g, ball.tolist())
        psi = psi_scaling(rr, d)
        prows.append((run_id, rr, lam, psi, lam / psi))
    if prows:
        write_csv(os.path.join(outdir, "poincare.csv"),
                  ["run_id", "radius", "lambda", "psi", "ratio"], prows)
        files.append("poincare.csv")
    return {"k_cap_products": products, "log_law_ok": scan.log_law_ok()}


def _suite_walk(g, base, radii, seed, trials, nmax, outdir, run_id, files, kind,
                dump_checkpoints=False):
    cfg = WalkConfig(seed=seed, trials=trials)
    horizons = [h for h in (64, 256, 1024) if h <= cfg.max_steps]
    stats = walk_monte_carlo(g, base, radii or (8, 16, 32, 64), horizons, cfg)
    rows = [(run_id, r, stats.exit_mean[i], stats.exit_stderr[i], stats.censored_fraction[i])
            for i, r in enumerate(stats.radii)]
    write_csv(os.path.join(outdir, "walk_exit.csv"),
              ["run_id", "radius", "mean_exit_time", "stderr", "censored_fraction"], rows)
    files.append("walk_exit.csv")
    drows = [(run_id, h, stats.displacement_mean[i], stats.displacement_stderr[i])
             for i, h in enumerate(stats.horizons)]
    write_csv(os.path.join(outdir, "displacement.csv"),
              ["run_id", "horizon", "mean_displacement", "stderr"], drows)
    files.append("displacement.csv")
    exit_fit = stats.exit_time_fit()
    figure_loglog_fit(os.path.join(outdir, "walk_exit.png"),
                      list(stats.radii), stats.exit_mean.tolist(), exit_fit,
                      "radius r", "E exit time", "exit-time walk dimension")
    files.append("walk_exit.png")

    checkpoints = sorted({max(2, nmax // 8), max(2, nmax // 4), max(2, nmax // 2), nmax})
    hk = heat_kernel_exact(g, base, nmax, checkpoints=checkpoints)
    hrows = [(run_id, int(n), float(v)) for n, v in zip(hk.n_values, hk.values)]
    write_csv(os.path.join(outdir, "heat_kernel.csv"),
              ["run_id", "n", "paired_return_probability"], hrows)
    files.append("heat_kernel.csv")
    lo = max(10, nmax // 100)
    mask = (hk.n_values >= lo)
    hk_fit = fit_power_law(zip(hk.n_values[mask].tolist(), hk.values[mask].tolist()))
    figure_loglog_fit(os.path.join(outdir, "heat_kernel.png"),
                      hk.n_values[mask].tolist(), hk.values[mask].tolist(), hk_fit,
                      "n", "p_n(x,x) + p_{n+1}(x,x)", "return probability decay")
    files.append("heat_kernel.png")
    d_s = -2 * hk_fit.exponent
    write_csv(os.path.join(outdir, "walk_fits.csv"),
              ["run_id", "d_w_exit", "d_w_r2", "return_slope", "return_r2", "d_s",
               "censoring_trusted", "mass_drift"],
              [(run_id, exit_fit.exponent, exit_fit.r_squared, hk_fit.exponent,
                hk_fit.r_squared, d_s, stats.trusted(), hk.mass_drift)])
    files.append("walk_fits.csv")
    if dump_checkpoints:
        for n in sorted(hk.distributions):
            name = f"checkpoint_{n}.hk"
            write_distribution(os.path.join(outdir, name), hk.distributions[n], n)
            files.append(name)
    # two-sided envelope at the kind's volume exponent and the fitted d_w
    d = {"cube": math.log(13) / math.log(3),
         "dodecahedron": math.log(6) / math.log(2)}.get(kind, 2.0)
    d_w = exit_fit.exponent
    if d_w > 1.0:
        env = subgaussian_envelope(hk, bfs_distances(g, base).astype(float), d, d_w)
        write_csv(os.path.join(outdir, "envelope.csv"),
                  ["run_id", "d", "d_w", "upper_c", "lower_c", "upper_bounded",
                   "lower_bounded"],
                  [(run_id, d, d_w, env.upper_c, env.lower_c, env.upper_bounded,
                    env.lower_bounded)])
        files.append("envelope.csv")
    return {"d_w": exit_fit.exponent, "d_s": d_s}


def _suite_qs(tri, packing, base, radii, seed, outdir, run_id, files):
    mp = MetricPair.graph_vs_centers(tri, packing.centers)
    if not radii:
        # default dyadic windows sized to the graph: largest radius about a
        # third of the base point's eccentricity
        ecc = int(bfs_distances(tri, base).max())
        rmax_default = max(4, 2 ** int(math.log2(max(ecc, 3) / 3.0)))
        radii = [r for r in (1, 2, 4, 8, 16, 32, 64) if r <= rmax_default]
    rmax = max(radii)
    # keep every window well inside the packing: center pool within rmax/2
    # of the base point, far from the deleted face's inflated circles
    centers = sample_trusted_vertices(tri, base, within=max(8, rmax // 2), count=50, seed=seed)
    bdist = bfs_distances(tri, list(packing.removed_face))
    report = qs_profile(mp, centers, radii, boundary_distance=bdist)
    rows = [(run_id, x, r, h) for x, r, h in report.samples]
    write_csv(os.path.join(outdir, "qs.csv"), ["run_id", "center", "radius", "H"], rows)
    files.append("qs.csv")
    summary = [(run_id, r, report.h_max_within(r)) for r in radii]
    write_csv(os.path.join(outdir, "qs_summary.csv"),
              ["run_id", "window_max_radius", "h_max"], summary)
    files.append("qs_summary.csv")
    figure_scatter(os.path.join(outdir, "qs.png"),
                   [r for _, r, _ in report.samples], [h for _, _, h in report.samples],
                   "radius r", "H(x,r)", "quasisymmetry distortion", logx=True)
    files.append("qs.png")
    return {"h_max": report.h_max, "excluded": report.excluded}


def _loewner_pairs(tri, base, seed, scales=(4, 8)):
    centers = [base] + sample_trusted_vertices(tri, base, within=16, count=4, seed=seed + 1)
    pairs = []
    for c in centers:
        ecc = int(bfs_distances(tri, c).max())
        for s in scales:
            for ratio in (1.25, 2.0, 5.0):
                R = int(math.ceil(ratio * s))
                if R + 2 > ecc:
                    continue
                try:
                    E = geodesic_segment(tri, c, s)
                    F = sphere_arc(tri, c, R, max_diameter=2 * s)
                except ValueError:
                    continue
                if len(F) < 2:
                    continue
                pairs.append((E, F))
    return pairs


def _suite_loewner(tri, packing, base, seed, outdir, run_id, files):
    lm = length_metric(packing)
    pairs = _loewner_pairs(tri, base, seed)
    scan = loewner_scan(tri, lm, pairs)
    rows = [(run_id, d, m) for d, m in scan.rows]
    write_csv(os.path.join(outdir, "loewner.csv"),
              ["run_id", "relative_distance", "modulus"], rows)
    files.append("loewner.csv")
    knots = scan.envelope_knots()
    write_csv(os.path.join(outdir, "loewner_envelope.csv"),
              ["run_id", "delta", "envelope_modulus"],
              [(run_id, d, m) for d, m in knots])
    files.append("loewner_envelope.csv")
    if scan.rows:
        figure_scatter(os.path.join(outdir, "loewner.png"),
                       [d for d, _ in scan.rows], [m for _, m in scan.rows],
                       "relative distance", "modulus", "Loewner scan",
                       staircase=knots, logx=True, logy=True)
        files.append("loewner.png")
    return {"pairs": len(scan.rows), "skipped": len(scan.skipped)}


def cmd_analyze(args) -> int:
    g = read_graph(args.graph)
    base, kind, level = _load_base_point(args.graph)
    radii = _parse_radii(args.radii, [])
    suites = ["volume", "capacity", "walk", "qs", "loewner"] if args.suite == "all" else [args.suite]
    packing = None
    if any(s in ("qs", "loewner") for s in suites):
        if not args.packing:
            raise GraphError(f"suite {args.suite!r} needs --packing")
        packing = read_packing(args.packing, g)
    os.makedirs(args.out, exist_ok=True)
    manifest = RunManifest("analyze", __version__, {
        "suite": args.suite, "seed": args.seed, "radii": ",".join(map(str, radii)),
        "trials": args.trials, "nmax": args.nmax,
    })
    manifest.add_input(args.graph)
    if args.packing:
        manifest.add_input(args.packing)
    run_id = manifest.run_id()
    files = []
    summary = {}
    for suite in suites:
        if suite == "volume":
            summary.update(_suite_volume(g, base, radii, args.out, run_id, files))
        elif suite == "capacity":
            summary.update(_suite_capacity(g, base, radii, args.out, run_id, files, kind))
        elif suite == "walk":
            summary.update(_suite_walk(g, base, radii, args.seed, args.trials,
                                       args.nmax, args.out, run_id, files, kind,
                                       dump_checkpoints=args.dump_checkpoints))
        elif suite == "qs":
            summary.update(_suite_qs(g, packing, base, radii, args.seed, args.out,
                                     run_id, files))
        elif suite == "loewner":
            summary.update(_suite_loewner(g, packing, base, args.seed, args.out,
                                          run_id, files))
        else:
            raise GraphError(f"unknown suite {suite!r}")
    for name in files:
        manifest.add_output(os.path.join(args.out, name))
    manifest.write(os.path.join(args.out, "manifest.txt"))
    print(f"run {run_id}: wrote {len(files)} files to {args.out}")
    for k, v in summary.items():
        print(f"  {k}: {v}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="packlab",
                                 description="circle packings and random walks "
                                             "on subdivision graphs")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="build a subdivision level graph")
    gen.add_argument("--kind", choices=["cube", "dodecahedron"], required=True)
    gen.add_argument("--level", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--unsafe-level", type=int, default=None,
                     help="override the resource guard on the level")
    gen.set_defaults(func=cmd_generate)

    pk = sub.add_parser("pack", help="circle-pack a graph (triangulating if needed)")
    pk.add_argument("--graph", required=True)
    pk.add_argument("--tol", type=float, default=1e-9)
    pk.add_argument("--layout-tol", type=float, default=None)
    pk.add_argument("--out", required=True)
    pk.add_argument("--svg", action="store_true")
    pk.add_argument("--good-d", type=float, default=8.0)
    pk.add_argument("--good-eta", type=float, default=0.15)
    pk.set_defaults(func=cmd_pack)

    an = sub.add_parser("analyze", help="run measurement suites, write CSV + figures")
    an.add_argument("--graph", required=True)
    an.add_argument("--packing", default=None)
    an.add_argument("--suite", default="all",
                    choices=["volume", "capacity", "walk", "qs", "loewner", "all"])
    an.add_argument("--seed", type=int, default=0)
    an.add_argument("--radii", default="", help="comma-separated radius list")
    an.add_argument("--trials", type=int, default=2000)
    an.add_argument("--nmax", type=int, default=2000)
    an.add_argument("--dump-checkpoints", action="store_true",
                    help="write heat-kernel checkpoint distributions as binary files")
    an.add_argument("--out", required=True)
    an.set_defaults(func=cmd_analyze)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (NonConvergenceError, LayoutError, SolveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (GraphError, PackingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
