"""Glue between the classifier and the solvers.

``route_and_solve`` picks the solver the classifier certifies (or applies
an explicit override, rejecting overrides the input cannot support) and
returns both the route and the repair.
"""

from __future__ import annotations

from .approx import approx_solve
from .classify import RouteKind, SolverRoute, classify, remove_trivial
from .cost import RepairResult, cost
from .dp import solve_lc, solve_single_fd
from .flow import solve_matching
from .model import Database, FDSet, RoutingError
from .oracle import brute_force_optimal

SOLVER_CHOICES = ("auto", "dp", "flow", "approx", "oracle")


def _solve_lc_route(db: Database, delta: FDSet, route: SolverRoute) -> RepairResult:
    nontrivial = remove_trivial(delta)
    if len(nontrivial) == 1:
        single = solve_single_fd(db, nontrivial.fds[0])
        # reattach trivial FDs for a complete per-FD breakdown
        return RepairResult(
            single.kept, cost(single.kept, db, delta), single.solver
        )
    assert route.trace is not None
    return solve_lc(db, delta, route.trace)


def route_and_solve(
    db: Database, delta: FDSet, solver: str = "auto"
) -> tuple[SolverRoute, RepairResult]:
    """Classify, then solve with the routed or requested solver.

    Raises :class:`RoutingError` when an explicit override does not apply
    to this FD set (e.g. ``dp`` on a set no elimination order empties).
    """
    if solver not in SOLVER_CHOICES:
        raise RoutingError(
            f"unknown solver {solver!r}; choose one of {SOLVER_CHOICES}"
        )
    delta.validate_schema(db.schema)
    route = classify(delta, db.schema)

    if solver == "auto":
        if route.kind is RouteKind.LC_SEQUENCE:
            return route, _solve_lc_route(db, delta, route)
        if route.kind is RouteKind.MATCHING:
            return route, solve_matching(db, delta)
        return route, approx_solve(db, delta)
    if solver == "dp":
        if route.kind is not RouteKind.LC_SEQUENCE:
            raise RoutingError(
                "dp solver is inapplicable: the FD set is not L/C-emptiable"
            )
        return route, _solve_lc_route(db, delta, route)
    if solver == "flow":
        if route.kind is RouteKind.MATCHING:
            return route, solve_matching(db, delta)
        raise RoutingError(
            "flow solver is inapplicable: the FD set is not a matching "
            "constraint"
        )
    if solver == "approx":
        return route, approx_solve(db, delta)
    # oracle
    result = brute_force_optimal(db, delta)
    kept = result.all_optima[0]
    return route, RepairResult(kept, cost(kept, db, delta), "oracle")
