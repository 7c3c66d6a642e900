"""Minimum-cost soft repairs of weighted relations under weighted FDs.

Given a single-relation database where every fact carries a deletion
weight and every functional dependency carries a violation weight, find
the subset minimizing total deletion weight plus total violation weight.
The classifier routes each FD set to an exact solver (dynamic programming
over agreement blocks, or min-cost max-flow for matching constraints)
when one applies, and otherwise to a certified 3-approximation.  A
brute-force oracle grounds every solver on small instances.
"""

from .approx import CoverElement, CoverInstance, approx_solve, build_cover_instance
from .bench import TEMPLATES, BenchTemplate, random_instance, run_benchmark
from .classify import (
    EliminationStep,
    EliminationTrace,
    Hardness,
    RouteKind,
    SolverRoute,
    can_empty_simplify,
    classify,
    closure,
    is_matching_constraint,
    lc_elimination_order,
    remove_attribute,
    remove_trivial,
)
from .cost import (
    CostBreakdown,
    RepairResult,
    ViolationSet,
    conflict_elements,
    cost,
    shifted_cost,
    violations,
)
from .dp import BlockPartition, partition, solve_lc, solve_single_fd, top
from .flow import (
    FlowEdge,
    FlowNetwork,
    IntegralFlow,
    build_network,
    dump_network,
    embed_subset,
    extract_repair,
    matching_pair_database,
    min_cost_max_flow,
    solve_matching,
    solve_two_key,
)
from .model import (
    FD,
    Database,
    Fact,
    FDSet,
    FDSpecError,
    IngestionError,
    InstanceTooLargeError,
    Rational,
    ReductionError,
    RoutingError,
    Schema,
    SchemaMismatchError,
    SoftRepairError,
    as_weight,
    fd,
    fdset,
    format_weight,
    is_violation,
    project,
)
from .oracle import OracleResult, brute_force_optimal
from .router import route_and_solve

__version__ = "0.1.0"
