"""Exact solvers, structural analysis, and hardness-reduction generators for
directed Steiner problems (SCSS / DSN)."""

from .graph import (
    DsnInstance,
    EdgeSolution,
    GraphBuilder,
    GraphError,
    ScssInstance,
    WeightedDigraph,
    planarity_check,
    reachable,
    validate_dsn,
    validate_scss,
)
from .bnb import SolveResult, exact_dsn, exact_scss
from .dst import dreyfus_wagner_dst, scss_two_approx
from .gadgets import (
    ConnectorGadget,
    MainGadget,
    build_connector,
    build_main,
    connector_canonical,
    connector_connectedness,
    connector_represents,
    connector_target,
    main_canonical,
    main_connectedness,
    main_represents,
    main_target,
)
from .problems import (
    GridTilingAssignment,
    GridTilingInstance,
    PsiAssignment,
    PsiInstance,
    normalize_gridtiling,
    plant_gridtiling,
    solve_gridtiling,
    solve_psi,
)
from .reductions import (
    ReductionArtifact,
    check_gadget_interface,
    compose_scss,
    dsn_witness,
    reduce_gt_to_dsn,
    reduce_psi_to_scss,
    psi_witness,
    scss_witness,
)
from .structure import (
    ArborescencePair,
    build_w_set,
    decompose,
    essential_paths,
    minimalize,
    shared_paths,
    treewidth_le_2,
    verify_structure,
    w_components,
)
from .transforms import split_vertex_weights, vertexize
from .treewidth import TreeDecomposition, treewidth_exact_small, treewidth_upper
from .twdp import scss_treewidth_dp

__version__ = "0.1.0"
