"""Exact solvers by dynamic programming over agreement blocks.

Single-FD case: facts are grouped into blocks (equal lhs values) and
subblocks (additionally equal rhs values).  Conflicts exist only across
subblocks of the same block, so each block is solved by a knapsack-style
table over (subblocks seen, facts kept), charging t*(k-t)*w for the
violating pairs a subblock's t kept facts form with the k-t facts kept
from earlier subblocks.

General case: an elimination trace (each attribute lhs-or-consensus in
every remaining FD) nests the same recurrence.  At each level the facts
are split into blocks by the eliminated attribute; cross-block pairs
violate exactly the consensus FDs of that level, whose total weight the
level charges, and each block recurses on the reduced FD set.  When the
trace is exhausted the surviving facts are mutually consistent and the
best size-k choice is simply the k heaviest.

Infeasible table entries are an explicit None, never a large sentinel;
all arithmetic stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .classify import EliminationTrace, remove_attribute, remove_trivial
from .cost import RepairResult, cost
from .model import FD, Database, FDSet, RoutingError


@dataclass(frozen=True)
class BlockPartition:
    """Fact ids grouped by equal projection on ``key_attrs``.

    Blocks are ordered by their smallest fact id; within a block facts are
    ordered weight-descending, then fact id ascending (the deterministic
    order every top-t selection uses).  ``keys`` holds each block's shared
    projection.
    """

    key_attrs: tuple[str, ...]
    blocks: tuple[tuple[int, ...], ...]
    keys: tuple[tuple[str, ...], ...]


def partition(
    db: Database, fact_ids: Iterable[int], attrs: Sequence[str]
) -> BlockPartition:
    """Group ``fact_ids`` by their values on ``attrs``."""
    cols = db.schema.indices(attrs)
    groups: dict[tuple[str, ...], list[int]] = {}
    for i in sorted(fact_ids):
        key = tuple(db.fact(i).values[c] for c in cols)
        groups.setdefault(key, []).append(i)
    ordered = sorted(groups.items(), key=lambda kv: kv[1][0])
    blocks = tuple(
        tuple(sorted(ids, key=lambda i: (-db.weight(i), i)))
        for _, ids in ordered
    )
    keys = tuple(key for key, _ in ordered)
    assert len(set(keys)) == len(keys)  # distinct blocks carry distinct keys
    return BlockPartition(tuple(attrs), blocks, keys)


def top(db: Database, count: int, fact_ids: Sequence[int]) -> tuple[int, ...]:
    """The ``count`` heaviest facts of ``fact_ids`` (ties by smaller id)."""
    if not 0 <= count <= len(fact_ids):
        raise ValueError(
            f"top count {count} out of range for {len(fact_ids)} facts"
        )
    ranked = sorted(fact_ids, key=lambda i: (-db.weight(i), i))
    return tuple(ranked[:count])


def _solve_block(
    db: Database,
    subblocks: Sequence[Sequence[int]],
    pair_weight: Fraction,
    child_costs: Sequence[Sequence[Fraction | None]] | None = None,
) -> tuple[list[Fraction | None], list[list[int | None]]]:
    """Knapsack over subblocks: best cost per total kept count k.

    Keeping t facts of subblock j costs t*(k-t)*pair_weight against the
    k-t facts kept so far, plus either the deletion weight of the t-prefix
    complement (``child_costs`` None) or the child table's cost for a
    t-fact sub-solution.  Returns the final cost row per k and the chosen
    t per (j, k) for witness reconstruction; ties prefer the smallest t.
    """
    sizes = [len(s) for s in subblocks]
    total = sum(sizes)
    costs: list[Fraction | None] = [Fraction(0)] + [None] * total
    choices: list[list[int | None]] = []
    prefix = 0
    for j, sub in enumerate(subblocks):
        if child_costs is None:
            # deletion weight of everything after the t heaviest
            weights = [db.weight(i) for i in sub]
            suffix = [Fraction(0)] * (len(sub) + 1)
            for t in range(len(sub) - 1, -1, -1):
                suffix[t] = suffix[t + 1] + weights[t]
            local = suffix
        else:
            local = child_costs[j]
        prefix += sizes[j]
        row: list[Fraction | None] = [None] * (total + 1)
        chose: list[int | None] = [None] * (total + 1)
        for k in range(prefix + 1):
            best: Fraction | None = None
            best_t: int | None = None
            for t in range(min(k, sizes[j]) + 1):
                prev = costs[k - t]
                sub_cost = local[t]
                if prev is None or sub_cost is None:
                    continue
                cand = prev + t * (k - t) * pair_weight + sub_cost
                if best is None or cand < best:
                    best, best_t = cand, t
            row[k] = best
            chose[k] = best_t
        costs = row
        choices.append(chose)
    return costs, choices


def _argmin_k(costs: Sequence[Fraction | None]) -> int:
    best_k = None
    for k, c in enumerate(costs):
        if c is None:
            continue
        if best_k is None or c < costs[best_k]:
            best_k = k
    assert best_k is not None
    return best_k


def _walk_choices(
    subblocks: Sequence[Sequence[int]],
    choices: Sequence[Sequence[int | None]],
    k: int,
) -> list[tuple[int, int]]:
    """Recover (subblock index, t) picks from the choice tables."""
    picks = []
    for j in range(len(subblocks) - 1, -1, -1):
        t = choices[j][k]
        assert t is not None
        picks.append((j, t))
        k -= t
    assert k == 0
    return picks


def solve_single_fd(db: Database, phi: FD) -> RepairResult:
    """Optimal subset of ``db`` under the single FD ``phi``.

    Blocks never conflict with each other, so each is solved independently
    and the union of per-block optima is optimal overall.
    """
    if phi.is_trivial:
        raise RoutingError(
            f"trivial FD {phi.describe()}: every subset is violation-free, "
            "keep the whole database"
        )
    schema = db.schema
    key_attrs = schema.ordered(phi.lhs)
    sub_attrs = schema.ordered(phi.lhs | phi.rhs)
    kept: list[int] = []
    for block in partition(db, db.ids, key_attrs).blocks:
        subblocks = partition(db, block, sub_attrs).blocks
        costs, choices = _solve_block(db, subblocks, phi.weight)
        k = _argmin_k(costs)
        for j, t in _walk_choices(subblocks, choices, k):
            kept.extend(subblocks[j][:t])
    breakdown = cost(kept, db, FDSet((phi,)))
    return RepairResult(frozenset(kept), breakdown, "dp-single-fd")


class _LcSolver:
    """Nested-block DP following an elimination trace.

    Memoized on (level, fact ids): distinct sub-databases, i.e. nested
    blocks, are the only states, keeping the table polynomial in the
    number of facts for a fixed schema.
    """

    def __init__(self, db: Database, trace: EliminationTrace):
        self.db = db
        self.trace = trace
        self.memo: dict[tuple[int, tuple[int, ...]], dict] = {}

    def costs(self, level: int, ids: tuple[int, ...]) -> list[Fraction | None]:
        return self._solve(level, ids)["costs"]

    def _solve(self, level: int, ids: tuple[int, ...]) -> dict:
        key = (level, ids)
        entry = self.memo.get(key)
        if entry is not None:
            return entry
        db = self.db
        if level == len(self.trace.steps):
            # no constraints left: the best k facts are the k heaviest
            ranked = sorted(ids, key=lambda i: (-db.weight(i), i))
            suffix = [Fraction(0)] * (len(ranked) + 1)
            for t in range(len(ranked) - 1, -1, -1):
                suffix[t] = suffix[t + 1] + db.weight(ranked[t])
            entry = {"leaf": ranked, "costs": suffix}
        else:
            step = self.trace.steps[level]
            blocks = partition(db, ids, (step.attribute,)).blocks
            child = [self.costs(level + 1, blk) for blk in blocks]
            costs, choices = _solve_block(
                db, blocks, step.consensus_weight, child
            )
            entry = {"blocks": blocks, "choices": choices, "costs": costs}
        self.memo[key] = entry
        return entry

    def witness(self, level: int, ids: tuple[int, ...], k: int) -> list[int]:
        entry = self._solve(level, ids)
        if "leaf" in entry:
            return entry["leaf"][:k]
        out: list[int] = []
        for j, t in _walk_choices(entry["blocks"], entry["choices"], k):
            out.extend(self.witness(level + 1, entry["blocks"][j], t))
        return out


def _same_fds(a: FDSet, b: FDSet) -> bool:
    return frozenset((p.lhs, p.rhs, p.weight) for p in a) == frozenset(
        (p.lhs, p.rhs, p.weight) for p in b
    )


def solve_lc(db: Database, delta: FDSet, trace: EliminationTrace) -> RepairResult:
    """Optimal subset of ``db`` under ``delta`` along an elimination trace.

    The trace is replayed first; a snapshot or consensus-weight mismatch
    means it was produced for a different FD set and is rejected.
    """
    current = remove_trivial(delta)
    for step in trace.steps:
        if not _same_fds(step.remaining, current):
            raise RoutingError(
                f"trace snapshot at {step.attribute!r} does not match the FD set"
            )
        expected_w = sum(
            (p.weight for p in current if not p.lhs and step.attribute in p.rhs),
            Fraction(0),
        )
        if expected_w != step.consensus_weight:
            raise RoutingError(
                f"trace consensus weight at {step.attribute!r} is "
                f"{step.consensus_weight}, expected {expected_w}"
            )
        current = remove_trivial(remove_attribute(current, step.attribute))
    if len(current):
        raise RoutingError("trace does not empty the FD set")

    solver = _LcSolver(db, trace)
    all_ids = tuple(db.ids)
    costs = solver.costs(0, all_ids)
    k = _argmin_k(costs)
    kept = solver.witness(0, all_ids, k)
    breakdown = cost(kept, db, delta)
    if breakdown.total != costs[k]:
        raise AssertionError(
            f"DP cost {costs[k]} disagrees with recomputed {breakdown.total}"
        )
    return RepairResult(frozenset(kept), breakdown, "dp-lc")
