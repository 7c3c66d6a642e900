"""FD-set analysis and solver routing.

Three structural tests drive the routing:

* attribute-pair simplification ("can the set be emptied by repeatedly
  removing a pair of attribute sets with equal closures that appear on
  every left-hand side?") -- decides hardness flags;
* lhs/consensus elimination ("is there an attribute order where each
  attribute is on the lhs of every FD, or is forced to a single value by a
  consensus FD?") -- certifies the dynamic-programming solver;
* matching detection (two FDs whose lhs/rhs unions and lhs union each
  cover the whole schema) -- certifies the flow solver.

The searches are exponential only in schema arity, which is fixed for any
given relation, never in the number of facts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import chain, combinations
from typing import Iterable

from .model import FD, FDSet, Schema

__all__ = [
    "RouteKind",
    "Hardness",
    "EliminationStep",
    "EliminationTrace",
    "SolverRoute",
    "closure",
    "remove_trivial",
    "remove_attribute",
    "can_empty_simplify",
    "lc_elimination_order",
    "is_matching_constraint",
    "classify",
]


class RouteKind(Enum):
    LC_SEQUENCE = "LC_SEQUENCE"
    MATCHING = "MATCHING"
    APPROX_ONLY = "APPROX_ONLY"


class Hardness(Enum):
    TRACTABLE = "TRACTABLE"
    APX_HARD_SUBSET = "APX_HARD_SUBSET"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class EliminationStep:
    """One elimination: the attribute, the FD set it was chosen from (after
    trivial-FD removal), and the total weight of consensus FDs forcing it."""

    attribute: str
    remaining: FDSet
    consensus_weight: Fraction


@dataclass(frozen=True)
class EliminationTrace:
    steps: tuple[EliminationStep, ...]

    @property
    def order(self) -> tuple[str, ...]:
        return tuple(s.attribute for s in self.steps)


@dataclass(frozen=True)
class SolverRoute:
    kind: RouteKind
    hardness: Hardness
    trace: EliminationTrace | None = None

    @property
    def elimination_order(self) -> tuple[str, ...] | None:
        return self.trace.order if self.trace is not None else None


def closure(attributes: Iterable[str], delta: FDSet) -> frozenset[str]:
    """Least superset of ``attributes`` closed under every FD in ``delta``."""
    closed = set(attributes)
    changed = True
    while changed:
        changed = False
        for phi in delta:
            if phi.lhs <= closed and not phi.rhs <= closed:
                closed |= phi.rhs
                changed = True
    return frozenset(closed)


def remove_trivial(delta: FDSet) -> FDSet:
    """Drop every FD with ``rhs <= lhs``; keep the rest unchanged."""
    return delta.nontrivial()


def remove_attribute(delta: FDSet, attribute: str) -> FDSet:
    """Delete ``attribute`` from both sides of every FD.

    Distinct FDs can collapse onto the same (lhs, rhs) pair afterwards;
    their weights are summed, which is equivalent for violation counting
    (two identical FDs of weights w1, w2 charge exactly like one FD of
    weight w1 + w2).
    """
    merged: dict[tuple[frozenset[str], frozenset[str]], Fraction] = {}
    order: list[tuple[frozenset[str], frozenset[str]]] = []
    for phi in delta:
        key = (phi.lhs - {attribute}, phi.rhs - {attribute})
        if key not in merged:
            merged[key] = Fraction(0)
            order.append(key)
        merged[key] += phi.weight
    return FDSet(tuple(FD(lhs, rhs, merged[(lhs, rhs)]) for lhs, rhs in order))


def _remove_attrs_shape(
    shape: frozenset[tuple[frozenset[str], frozenset[str]]],
    removed: frozenset[str],
) -> frozenset[tuple[frozenset[str], frozenset[str]]]:
    out = set()
    for lhs, rhs in shape:
        lhs2, rhs2 = lhs - removed, rhs - removed
        if not rhs2 <= lhs2:  # drop trivial
            out.add((lhs2, rhs2))
    return frozenset(out)


def _subsets(items: frozenset[str]):
    seq = sorted(items)
    return chain.from_iterable(
        combinations(seq, r) for r in range(len(seq) + 1)
    )


_simplify_memo: dict[frozenset, bool] = {}


def _can_empty_shape(shape: frozenset[tuple[frozenset[str], frozenset[str]]]) -> bool:
    if not shape:
        return True
    cached = _simplify_memo.get(shape)
    if cached is not None:
        return cached
    _simplify_memo[shape] = False  # guards against re-entering the same state
    attrs = frozenset().union(*(lhs | rhs for lhs, rhs in shape))
    delta = FDSet(tuple(FD(lhs, rhs, Fraction(1)) for lhs, rhs in shape))
    result = False
    for x in _subsets(attrs):
        xs = frozenset(x)
        cx = closure(xs, delta)
        for y in _subsets(attrs):
            ys = frozenset(y)
            if not xs | ys:
                continue
            if not all(xs <= lhs or ys <= lhs for lhs, _ in shape):
                continue
            if closure(ys, delta) != cx:
                continue
            if _can_empty_shape(_remove_attrs_shape(shape, xs | ys)):
                result = True
                break
        if result:
            break
    _simplify_memo[shape] = result
    return result


def can_empty_simplify(delta: FDSet) -> bool:
    """Whether repeated removable-pair steps can empty the FD set.

    A pair (X, Y) of attribute sets is removable when X and Y have equal
    closures, X union Y is nonempty, and every FD carries X or Y inside its
    lhs; a step deletes all those attributes from every FD.  The search is
    exhaustive over candidate pairs with memoization on the remaining FD
    shapes (weights are irrelevant here).
    """
    shape = frozenset(
        (phi.lhs, phi.rhs) for phi in remove_trivial(delta)
    )
    return _can_empty_shape(shape)


def _lc_candidates(delta: FDSet, schema: Schema) -> list[str]:
    """Attributes that are lhs-or-consensus in every FD, in schema order."""
    out = []
    for a in schema.attributes:
        ok = True
        for phi in delta:
            if a in phi.lhs:
                continue
            if not phi.lhs and a in phi.rhs:
                continue
            ok = False
            break
        if ok:
            out.append(a)
    return out


def lc_elimination_order(delta: FDSet, schema: Schema) -> EliminationTrace | None:
    """A full lhs/consensus elimination trace, or None when none exists.

    Candidates are tried in schema order and the first valid one is taken;
    eliminability of any attribute is preserved by eliminating another, so
    the greedy choice never dead-ends when some order would succeed.
    """
    delta.validate_schema(schema)
    current = remove_trivial(delta)
    steps: list[EliminationStep] = []
    while len(current):
        candidates = _lc_candidates(current, schema)
        if not candidates:
            return None
        attr = candidates[0]
        consensus_weight = sum(
            (phi.weight for phi in current if not phi.lhs and attr in phi.rhs),
            Fraction(0),
        )
        steps.append(EliminationStep(attr, current, consensus_weight))
        current = remove_trivial(remove_attribute(current, attr))
    return EliminationTrace(tuple(steps))


def is_matching_constraint(delta: FDSet, schema: Schema) -> bool:
    """Exactly two FDs whose rhs each complete their lhs to the full
    attribute set, and whose lhs together cover the full attribute set."""
    delta.validate_schema(schema)
    if len(delta) != 2:
        return False
    phi1, phi2 = delta.fds
    full = frozenset(schema.attributes)
    return (
        phi1.lhs | phi1.rhs == full
        and phi2.lhs | phi2.rhs == full
        and phi1.lhs | phi2.lhs == full
    )


def classify(delta: FDSet, schema: Schema) -> SolverRoute:
    """Route an FD set to a solver, with a hardness verdict.

    Preference order: lhs/consensus DP, then matching flow, then the
    3-approximation.  The hardness flag is APX_HARD_SUBSET when some subset
    of the FDs cannot be emptied by removable-pair simplification (making
    even constant-factor-optimal solving NP-hard), TRACTABLE when an exact
    route exists, and UNKNOWN otherwise.
    """
    delta.validate_schema(schema)
    trace = lc_elimination_order(delta, schema)
    if trace is not None:
        return SolverRoute(RouteKind.LC_SEQUENCE, Hardness.TRACTABLE, trace)
    if is_matching_constraint(delta, schema):
        return SolverRoute(RouteKind.MATCHING, Hardness.TRACTABLE)
    fds = delta.fds
    for r in range(len(fds) + 1):
        for combo in combinations(fds, r):
            if not can_empty_simplify(FDSet(combo)):
                return SolverRoute(RouteKind.APPROX_ONLY, Hardness.APX_HARD_SUBSET)
    return SolverRoute(RouteKind.APPROX_ONLY, Hardness.UNKNOWN)
