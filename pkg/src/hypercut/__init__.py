"""Guarantee-checked r-cuts of mixed multihypergraphs beating the uniform-random baseline."""

from .core import (
    DegreeProfile,
    Hypergraph,
    Multigraph,
    WeightedGraph,
    build,
    clique_expand,
    degree_profile,
    induce,
)
from .cutspace import (
    Cut,
    CutMetrics,
    PartialCut,
    cut_metrics,
    equitable_complete_value,
    expected_fraction,
    multicolour_probability,
    partial_average_excess,
    theorem_bound,
)
from .derand import (
    combine_partial_cuts,
    erdos_selfridge_2cut,
    flip_local_search,
    greedy_order_cut,
    order_for_W,
)
from .instances import GenSpec, exact_maxcut, generate, moment_audit, monotonicity_check
from .pipeline import GuaranteeLedger, PipelineParams, chromatic_cut, solve
from .reductions import (
    dense_subset_cut,
    expand_3graph,
    hpart_double,
    hpart_expose,
    lift_2cut_to_3cut,
    rgraph_expand,
    weighted_reduce,
)

__all__ = [
    "Cut",
    "CutMetrics",
    "DegreeProfile",
    "GenSpec",
    "GuaranteeLedger",
    "Hypergraph",
    "Multigraph",
    "PartialCut",
    "PipelineParams",
    "WeightedGraph",
    "build",
    "chromatic_cut",
    "clique_expand",
    "combine_partial_cuts",
    "cut_metrics",
    "degree_profile",
    "dense_subset_cut",
    "equitable_complete_value",
    "erdos_selfridge_2cut",
    "exact_maxcut",
    "expand_3graph",
    "expected_fraction",
    "flip_local_search",
    "generate",
    "greedy_order_cut",
    "hpart_double",
    "hpart_expose",
    "induce",
    "lift_2cut_to_3cut",
    "moment_audit",
    "monotonicity_check",
    "multicolour_probability",
    "order_for_W",
    "partial_average_excess",
    "rgraph_expand",
    "solve",
    "theorem_bound",
    "weighted_reduce",
]
