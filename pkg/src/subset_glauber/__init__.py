"""Glauber dynamics for subset-expansion graph polynomials, with exhaustive bound checks."""

from .graph import (
    Graph,
    Kind,
    Separation,
    Subset,
    adjacency_rank_edges,
    adjacency_rank_induced,
    component_size_profile,
    components_count,
    incidence_rank,
    induced_subgraph,
    parse_graph,
    read_graph,
)
from .models import (
    AdjacencyRank,
    Interlace,
    MultiTutte,
    RandomCluster,
    Tutte,
    UPolynomial,
    WeightModel,
    exact_partition_log,
    lambda_hat,
    lambda_of,
    log_weight,
    log_weight_ratio,
    model_from_config,
)
from .dynamics import ChainConfig, ChainRNG, Trace, empirical_distribution, run, step, transition_probability
from .widths import (
    Ordering,
    greedy_ordering,
    linear_width_of_ordering,
    optimal_edge_ordering,
    optimal_vertex_ordering,
    vertex_separation_of_ordering,
)
from .verification import (
    canonical_path,
    check_edge_multiplicativity,
    check_vertex_multiplicativity,
    congestion,
    exact_mixing_time,
    lemma_ratio_max,
    stationary_distribution,
    tv_distance,
)

__version__ = "0.1.0"
