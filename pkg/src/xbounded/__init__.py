"""Decide whether a level-labeled planar graph embeds in horizontal strips.

The package answers, for a graph whose vertices carry integer levels, whether
it has a crossing-free drawing in which every vertex lies strictly inside its
level's horizontal strip and every edge is x-monotone.  It provides the
polynomial decision procedures for subdivided stars, trees, and theta graphs,
an exhaustive oracle for small instances, reductions to and from 3-level
clustered trees, an SVG renderer, and a command line front end.
"""

from .errors import (
    BudgetExceeded,
    Disconnected,
    Infeasible,
    InvalidCertificate,
    LoopEdge,
    MissingLabel,
    NotATheta,
    NotATree,
    PreconditionViolated,
    StaircaseViolation,
    TooLarge,
    TooManyLeaves,
    UnknownLeaf,
    WalkNotInGraph,
    XBoundedError,
)
from .characterize import (
    CapCup,
    ClassVerdict,
    InterleavingPair,
    TrappedWitness,
    check_isotopy_class,
    classify_path,
    enumerate_caps_cups,
    interior_faces,
    is_feasible,
    is_interleaving,
    reduce_to_interleaving,
    simple_cycles,
    sink_source_prefilter,
    trapped_vertices,
    verdict_to_dict,
)
from .oracle import (
    OracleResult,
    Refusal,
    count_rotations,
    enumerate_embeddings,
    oracle_decide,
)
from .stars import (
    LegProfile,
    StarVerdict,
    SubdividedStar,
    build_star_embedding,
    cap_cup_edge_sets,
    decide_star,
    interval_set,
    leg_profiles,
    star_matrix,
    star_to_graph,
)
from .trees import (
    TreeInstance,
    TreeVerdict,
    VertexInterval,
    assemble_tree_matrix,
    bridge_matrix,
    build_instance,
    core_pc_tree,
    decide_tree,
    star_projection,
    tree_leaves,
)
from .ambmatrix import (
    AmbMatrix,
    brute_orders,
    brute_solve,
    satisfying_orders,
    solve,
    star_close,
    validate_staircase,
)
from .theta import (
    OUTER_COLUMN,
    ThetaGraph,
    ThetaInstance,
    ThetaVerdict,
    assemble_theta_matrix,
    build_theta_instance,
    decide_theta,
    select_alpha,
    solve_consistent,
    theta_from_graph,
    theta_pc_tree,
    theta_row_blocks,
    theta_to_graph,
    trapped_matrix,
)
from .pctree import (
    NULL_TREE,
    NullTree,
    PCTree,
    any_order,
    count_orders,
    delete_leaf,
    enumerate_orders,
    from_shape,
    new_star,
    restrict_consecutive,
)
from .graphs import (
    CombEmbedding,
    LabeledGraph,
    RotationSystem,
    Walk,
    algebraic_intersection,
    canonical_rotation,
    instance_to_dict,
    is_planar_rotation,
    is_unit_normalized,
    orient_by_gamma,
    parse_instance,
    split_components,
    subdivide_to_unit,
    trace_faces,
    twin,
    validate,
    walk_from_vertices,
)

__all__ = [
    "BudgetExceeded",
    "CombEmbedding",
    "Disconnected",
    "Infeasible",
    "InvalidCertificate",
    "LabeledGraph",
    "LoopEdge",
    "MissingLabel",
    "NotATheta",
    "NotATree",
    "NULL_TREE",
    "NullTree",
    "PCTree",
    "PreconditionViolated",
    "RotationSystem",
    "StaircaseViolation",
    "TooLarge",
    "TooManyLeaves",
    "UnknownLeaf",
    "Walk",
    "WalkNotInGraph",
    "XBoundedError",
    "AmbMatrix",
    "CapCup",
    "ClassVerdict",
    "InterleavingPair",
    "TrappedWitness",
    "algebraic_intersection",
    "any_order",
    "brute_orders",
    "brute_solve",
    "satisfying_orders",
    "solve",
    "star_close",
    "validate_staircase",
    "OUTER_COLUMN",
    "ThetaGraph",
    "ThetaInstance",
    "ThetaVerdict",
    "assemble_theta_matrix",
    "build_theta_instance",
    "decide_theta",
    "select_alpha",
    "solve_consistent",
    "theta_from_graph",
    "theta_pc_tree",
    "theta_row_blocks",
    "theta_to_graph",
    "trapped_matrix",
    "count_orders",
    "delete_leaf",
    "enumerate_orders",
    "from_shape",
    "new_star",
    "restrict_consecutive",
    "canonical_rotation",
    "check_isotopy_class",
    "classify_path",
    "enumerate_caps_cups",
    "interior_faces",
    "is_feasible",
    "is_interleaving",
    "reduce_to_interleaving",
    "simple_cycles",
    "sink_source_prefilter",
    "trapped_vertices",
    "verdict_to_dict",
    "OracleResult",
    "Refusal",
    "count_rotations",
    "enumerate_embeddings",
    "oracle_decide",
    "LegProfile",
    "StarVerdict",
    "SubdividedStar",
    "build_star_embedding",
    "cap_cup_edge_sets",
    "decide_star",
    "interval_set",
    "leg_profiles",
    "star_matrix",
    "star_to_graph",
    "TreeInstance",
    "TreeVerdict",
    "VertexInterval",
    "assemble_tree_matrix",
    "bridge_matrix",
    "build_instance",
    "core_pc_tree",
    "decide_tree",
    "star_projection",
    "tree_leaves",
    "instance_to_dict",
    "is_planar_rotation",
    "is_unit_normalized",
    "orient_by_gamma",
    "parse_instance",
    "split_components",
    "subdivide_to_unit",
    "trace_faces",
    "twin",
    "validate",
    "walk_from_vertices",
]

__version__ = "0.1.0"
