"""Violation accounting and the deletion-plus-violation objective.

The cost of keeping a subset E of a database D under an FD set is

    cost(E | D) = sum of w_f over deleted facts (D minus E)
                + sum over FDs of w_phi * (number of violating pairs in E)

Violations are counted as unordered fact pairs.  The shifted objective
``shifted_cost`` replaces the deletion term with the negated weight of the
kept facts; it differs from ``cost`` by the constant total weight of D and
is the quantity the flow solver minimizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .model import FD, Database, FDSet, is_violation


@dataclass(frozen=True)
class ViolationSet:
    """All unordered violating pairs of one FD within a fact subset."""

    fd: FD
    pairs: frozenset[frozenset[int]]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class CostBreakdown:
    """Deletion cost plus per-FD violation cost, and their exact total."""

    deletion_cost: Fraction
    violation_cost_per_fd: Mapping[FD, Fraction]
    total: Fraction


@dataclass(frozen=True)
class RepairResult:
    """A chosen subset (by fact id) with its cost breakdown.

    ``ratio_bound`` is 1 for exact solvers and 3 for the approximation.
    """

    kept: frozenset[int]
    breakdown: CostBreakdown
    solver: str
    ratio_bound: int = 1

    @property
    def total_cost(self) -> Fraction:
        return self.breakdown.total


def _kept_ids(subset: Iterable[int]) -> frozenset[int]:
    return subset if isinstance(subset, frozenset) else frozenset(subset)


def violations(subset: Iterable[int], db: Database, phi: FD) -> ViolationSet:
    """Exactly the unordered pairs {f, g} within ``subset`` violating ``phi``."""
    ids = sorted(_kept_ids(subset))
    schema = db.schema
    lhs_cols = schema.indices(phi.lhs)
    rhs_cols = schema.indices(phi.rhs)
    pairs = []
    for pos, i in enumerate(ids):
        vi = db.fact(i).values
        for j in ids[pos + 1 :]:
            vj = db.fact(j).values
            if all(vi[c] == vj[c] for c in lhs_cols) and any(
                vi[c] != vj[c] for c in rhs_cols
            ):
                pairs.append(frozenset((i, j)))
    return ViolationSet(phi, frozenset(pairs))


def cost(subset: Iterable[int], db: Database, delta: FDSet) -> CostBreakdown:
    """The exact cost of keeping ``subset`` of ``db`` under ``delta``."""
    kept = _kept_ids(subset)
    deletion = sum(
        (f.weight for f in db.facts if f.fact_id not in kept), Fraction(0)
    )
    per_fd: dict[FD, Fraction] = {}
    total = deletion
    for phi in delta:
        vio_cost = phi.weight * len(violations(kept, db, phi))
        per_fd[phi] = vio_cost
        total += vio_cost
    return CostBreakdown(deletion, per_fd, total)


def shifted_cost(subset: Iterable[int], db: Database, delta: FDSet) -> Fraction:
    """Negated kept weight plus violation cost.

    Computed directly from its own definition (not as ``cost - total``),
    so the shift identity cost(E|D) = shifted(E) + total_weight(D) is a
    genuine cross-check rather than a tautology.
    """
    kept = _kept_ids(subset)
    out = -sum((db.weight(i) for i in kept), Fraction(0))
    for phi in delta:
        out += phi.weight * len(violations(kept, db, phi))
    return out


def conflict_elements(db: Database, delta: FDSet) -> tuple[tuple[int, int, int], ...]:
    """All violating (low_id, high_id, fd_index) triples over the full database.

    Ordered by (low id, high id, fd index); the deterministic element order
    used by the set-cover approximation.
    """
    schema = db.schema
    out = []
    n = len(db)
    for i in range(n):
        fi = db.fact(i)
        for j in range(i + 1, n):
            fj = db.fact(j)
            for idx, phi in enumerate(delta):
                if is_violation(schema, fi, fj, phi):
                    out.append((i, j, idx))
    return tuple(out)
