"""Self-loops and multiple edges in half-edge pairing models.

The package samples, enumerates, and rewires uniform pairings of degree
sequences (plain, directed, and bipartite), computes the exact means and
Poisson/normal limit diagnostics of their self-loop and multi-edge counts,
and ships a seeded, thread-deterministic Monte Carlo harness behind the
`cmloops` command.
"""

from ._kernels import current_backend
from .degseq import (
    BIPARTITE,
    DIRECTED,
    UNDIRECTED,
    DegreeSequence,
    MomentSummary,
    PowerLawSpec,
    compute_moments,
    empirical_tail,
    powerlaw_degrees,
    read_directed_degrees,
    read_undirected_degrees,
    regular_degrees,
    side_moment,
)
from .dist import (
    CouplingReport,
    DoubleEdgeEvent,
    EmpiricalDist,
    EnumeratedLaw,
    JointEmpiricalDist,
    SelfLoopEvent,
    all_events,
    coupling_discrepancy,
    cramer_wold_check,
    double_edge_events,
    ks_normal,
    poisson_pmf,
    selfloop_events,
    thin,
    tv_joint,
    tv_poisson,
)
from .errors import (
    CapExceededError,
    CmloopsError,
    InvalidCouplingError,
    InvalidDegreeSequenceError,
    UndefinedValueError,
)
from .limits import (
    GraphCountResult,
    LimitReport,
    SteinBounds,
    graph_count_estimate,
    lambda_bipartite,
    lambda_directed,
    lambda_pair,
    lambda_truncated,
    limit_report,
    simplicity_estimate,
    standardized_score,
    stein_bounds,
)
from .montecarlo import MonteCarloResult, run_montecarlo
from .pairing import (
    EdgeCounts,
    ExactLaw,
    HalfEdge,
    Matching,
    double_factorial,
    edge_counts,
    enumerate_matchings,
    erase,
    exact_joint_law,
    halfedge_from_index,
    halfedge_index,
    rewire_force_double,
    rewire_force_selfloop,
    sample_bcm,
    sample_cm,
    sample_dcm,
    write_matching,
)
from .rng import RngStream
from .stats import (
    DirectedStats,
    LoopMultiStats,
    bipartite_multi,
    degree_identity_holds,
    directed_stats,
    loop_multi_stats,
    truncated_multi,
)

__version__ = "0.1.0"

__all__ = [
    "BIPARTITE",
    "CapExceededError",
    "CmloopsError",
    "CouplingReport",
    "DIRECTED",
    "DegreeSequence",
    "DirectedStats",
    "DoubleEdgeEvent",
    "EdgeCounts",
    "EmpiricalDist",
    "EnumeratedLaw",
    "ExactLaw",
    "GraphCountResult",
    "HalfEdge",
    "InvalidCouplingError",
    "InvalidDegreeSequenceError",
    "JointEmpiricalDist",
    "LimitReport",
    "LoopMultiStats",
    "Matching",
    "MomentSummary",
    "MonteCarloResult",
    "PowerLawSpec",
    "RngStream",
    "SelfLoopEvent",
    "SteinBounds",
    "UNDIRECTED",
    "UndefinedValueError",
    "all_events",
    "bipartite_multi",
    "compute_moments",
    "coupling_discrepancy",
    "cramer_wold_check",
    "current_backend",
    "degree_identity_holds",
    "directed_stats",
    "double_edge_events",
    "double_factorial",
    "edge_counts",
    "empirical_tail",
    "enumerate_matchings",
    "erase",
    "exact_joint_law",
    "graph_count_estimate",
    "halfedge_from_index",
    "halfedge_index",
    "ks_normal",
    "lambda_bipartite",
    "lambda_directed",
    "lambda_pair",
    "lambda_truncated",
    "limit_report",
    "loop_multi_stats",
    "poisson_pmf",
    "powerlaw_degrees",
    "read_directed_degrees",
    "read_undirected_degrees",
    "regular_degrees",
    "rewire_force_double",
    "rewire_force_selfloop",
    "run_montecarlo",
    "sample_bcm",
    "sample_cm",
    "sample_dcm",
    "selfloop_events",
    "side_moment",
    "simplicity_estimate",
    "standardized_score",
    "stein_bounds",
    "thin",
    "truncated_multi",
    "tv_joint",
    "tv_poisson",
    "write_matching",
]
