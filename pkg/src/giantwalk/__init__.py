"""Random walks, conductance and structural decompositions on sparse random graphs."""

from .graph import Graph, GraphError, VertexSubset, build_graph, is_bipartite, subset_stats
from .generators import DegreeSequence, RngSeed, pairing_isolation_probability, sample_configuration, sample_gnp
from .decompose import components, decompose, degree2_paths, dangling_trees, decorations, two_core
from .walk import (
    BudgetExceeded,
    Distribution,
    WalkConfig,
    cesaro_mixing_time,
    mixing_time,
    stationary,
    step,
    tv_distance,
)
from .conductance import (
    bound_dyadic_sum,
    bound_jerrum_sinclair,
    bound_lower,
    conductance_profile,
    exact_min_conductance,
    heuristic_min_conductance,
    phi_of,
    q_of,
    talagrand_tail,
)

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "GraphError",
    "VertexSubset",
    "build_graph",
    "is_bipartite",
    "subset_stats",
    "DegreeSequence",
    "RngSeed",
    "pairing_isolation_probability",
    "sample_configuration",
    "sample_gnp",
    "components",
    "decompose",
    "degree2_paths",
    "dangling_trees",
    "decorations",
    "two_core",
    "BudgetExceeded",
    "Distribution",
    "WalkConfig",
    "cesaro_mixing_time",
    "mixing_time",
    "stationary",
    "step",
    "tv_distance",
    "bound_dyadic_sum",
    "bound_jerrum_sinclair",
    "bound_lower",
    "conductance_profile",
    "exact_min_conductance",
    "heuristic_min_conductance",
    "phi_of",
    "q_of",
    "talagrand_tail",
]
