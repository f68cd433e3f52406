"""Exact computations in the rings of painted stable genus-zero curves."""

from .algebra import (
    CohomologyRing,
    RingElement,
    StandardRelation,
    enumerate_standard_relations,
    graded_dimension_good,
    graded_dimension_oracle,
    hilbert_series,
    ideal_degree_piece,
    keel_linear_relation,
    keel_quadratic_pairs,
    multiply,
    normal_form,
    reduce_to_good_basis,
    relation_identity_check,
    ring,
    standard_relation,
)
from .core import (
    BLACK,
    WHITE,
    Color,
    PaintedSet,
    TwoPartition,
    VertexData,
    WeightData,
    enumerate_stable_partitions,
    epsilon,
    is_allowed_quadruple,
    is_stable_painted_set,
    is_stable_partition,
    star_weights,
    vertex_painted_stable,
    vertex_weighted_stable,
)
from .morphisms import (
    RepaintContext,
    boundary_pushforward,
    rho_divisor_pushforward,
    rho_pullback,
    rho_pushforward,
)
from .trees import (
    ModularGraph,
    PaintedTree,
    collapse_edge,
    critical_branch,
    enumerate_stable_trees,
    forget_and_stabilize,
    graft,
    insert_edge,
    partitions_of_tree,
    repaint_and_stabilize,
    tree_from_partitions,
)

__version__ = "0.1.0"

__all__ = [
    "BLACK",
    "CohomologyRing",
    "Color",
    "ModularGraph",
    "PaintedSet",
    "PaintedTree",
    "RepaintContext",
    "RingElement",
    "StandardRelation",
    "TwoPartition",
    "VertexData",
    "WHITE",
    "WeightData",
    "boundary_pushforward",
    "collapse_edge",
    "critical_branch",
    "enumerate_stable_partitions",
    "enumerate_stable_trees",
    "enumerate_standard_relations",
    "epsilon",
    "forget_and_stabilize",
    "graded_dimension_good",
    "graded_dimension_oracle",
    "graft",
    "hilbert_series",
    "ideal_degree_piece",
    "insert_edge",
    "is_allowed_quadruple",
    "is_stable_painted_set",
    "is_stable_partition",
    "keel_linear_relation",
    "keel_quadratic_pairs",
    "multiply",
    "normal_form",
    "partitions_of_tree",
    "reduce_to_good_basis",
    "relation_identity_check",
    "repaint_and_stabilize",
    "rho_divisor_pushforward",
    "rho_pullback",
    "rho_pushforward",
    "ring",
    "standard_relation",
    "star_weights",
    "tree_from_partitions",
    "vertex_painted_stable",
    "vertex_weighted_stable",
]
