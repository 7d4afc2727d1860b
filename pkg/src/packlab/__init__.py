"""packlab: circle packings and random walks on subdivision graphs.

A numerical laboratory for planar graphs built from finite subdivision
rules (the 13-3 snowball quadrangulations and the 6-2 pentagonal tilings),
their circle-packing embeddings, and the potential-theoretic and
random-walk statistics that probe quasisymmetry, capacity decay, Poincare
constants, and sub-Gaussian heat-kernel exponents.
"""

__version__ = "0.1.0"

from .fitting import ExponentFit, fit_power_law
from .packing import (
    GoodEmbeddingReport,
    LayoutError,
    LengthMetric,
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
from .planar_graph import (
    FaceList,
    GraphError,
    PlanarGraph,
    bfs_distances,
    face_barycenter_triangulation,
    faces_from_rotation,
    graph_ball,
    planar_dual,
    read_graph,
    volume_growth_fit,
    write_graph,
)
from .potential import (
    AnnulusCapacityScan,
    DirichletProblem,
    PotentialSolution,
    SolveError,
    annulus_capacity_scan,
    capacity,
    edge_modulus,
    poincare_constant,
    solve_dirichlet,
)
from .qs import (
    AnnularCheck,
    DistortionReport,
    LoewnerScan,
    MetricPair,
    annular_qc_check,
    distortion,
    loewner_scan,
    qs_profile,
    relative_distance,
)
from .subdivision import (
    ResourceGuardError,
    SubdivisionComplex,
    base_complex,
    level_graph,
    read_complex,
    subdivide,
    write_complex,
)
from .walks import (
    EnvelopeReport,
    HeatKernelCurve,
    WalkConfig,
    WalkStatistics,
    exact_exit_times,
    heat_kernel_exact,
    subgaussian_envelope,
    walk_monte_carlo,
)

__all__ = [
    "AnnularCheck",
    "AnnulusCapacityScan",
    "DirichletProblem",
    "DistortionReport",
    "EnvelopeReport",
    "ExponentFit",
    "FaceList",
    "GoodEmbeddingReport",
    "GraphError",
    "HeatKernelCurve",
    "LayoutError",
    "LengthMetric",
    "LoewnerScan",
    "MetricPair",
    "NonConvergenceError",
    "Packing",
    "PackingError",
    "PlanarGraph",
    "PotentialSolution",
    "ResourceGuardError",
    "SolveError",
    "SubdivisionComplex",
    "WalkConfig",
    "WalkStatistics",
    "annular_qc_check",
    "annulus_capacity_scan",
    "base_complex",
    "bfs_distances",
    "capacity",
    "check_good_embedding",
    "distortion",
    "edge_modulus",
    "embedding_volume_profile",
    "exact_exit_times",
    "face_barycenter_triangulation",
    "faces_from_rotation",
    "fit_power_law",
    "graph_ball",
    "heat_kernel_exact",
    "layout_centers",
    "length_metric",
    "level_graph",
    "loewner_scan",
    "pack",
    "pack_radii",
    "pack_radii_newton",
    "planar_dual",
    "poincare_constant",
    "prepare_disk",
    "qs_profile",
    "read_complex",
    "read_graph",
    "read_packing",
    "relative_distance",
    "solve_dirichlet",
    "subdivide",
    "subgaussian_envelope",
    "volume_growth_fit",
    "walk_monte_carlo",
    "write_complex",
    "write_graph",
    "write_packing",
    "write_packing_svg",
]
