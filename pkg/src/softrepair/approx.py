"""Polynomial 3-approximation for arbitrary FD sets via weighted set cover.

Every conflict -- a violating pair under one FD -- must be paid for by
deleting one of its two facts or by keeping the violation.  That is a set
cover instance where each conflict element belongs to exactly three sets:
the two facts' deletion sets (weight w_f) and its own violation set
(weight w_fd).  A one-pass local-ratio scheme (lower each uncovered
element's three residuals by their minimum, select what hits zero) is a
frequency-3 cover, hence within factor 3 of the optimal cover, which never
exceeds the optimal repair cost.  A minimality sweep then drops redundant
selections before translating deletions back into a kept subset.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .cost import RepairResult, conflict_elements, cost
from .model import Database, FDSet


@dataclass(frozen=True)
class CoverElement:
    """One conflict: a violating fact pair plus the FD it violates."""

    pair: tuple[int, int]  # (low id, high id)
    fd_index: int


@dataclass(frozen=True)
class CoverInstance:
    """The cover view of a database's conflicts.

    ``fact_elements`` lists, for every fact, the indices of the elements
    its deletion set covers (possibly none).
    """

    elements: tuple[CoverElement, ...]
    fact_elements: Mapping[int, tuple[int, ...]]

    def covering_sets(self, element_index: int) -> tuple[tuple[str, int], ...]:
        """The exactly-three sets containing an element."""
        elem = self.elements[element_index]
        i, j = elem.pair
        return (("fact", i), ("fact", j), ("violation", element_index))


def build_cover_instance(db: Database, delta: FDSet) -> CoverInstance:
    """Enumerate all conflicts in deterministic (low, high, fd) order."""
    elements = tuple(
        CoverElement((i, j), idx) for i, j, idx in conflict_elements(db, delta)
    )
    fact_elements: dict[int, list[int]] = {i: [] for i in db.ids}
    for e_idx, elem in enumerate(elements):
        fact_elements[elem.pair[0]].append(e_idx)
        fact_elements[elem.pair[1]].append(e_idx)
    return CoverInstance(
        elements, {i: tuple(v) for i, v in fact_elements.items()}
    )


def approx_solve(db: Database, delta: FDSet) -> RepairResult:
    """A subset whose cost is at most three times the optimum.

    Deterministic: elements are processed in their fixed order, and the
    minimality sweep drops violation sets first, then deletion sets by
    descending weight (keeping facts whenever that is free).
    """
    instance = build_cover_instance(db, delta)
    fact_residual: dict[int, Fraction] = {
        i: db.weight(i) for i in db.ids
    }
    vio_residual: list[Fraction] = [
        delta.fds[e.fd_index].weight for e in instance.elements
    ]
    deleted: set[int] = set()
    paid: set[int] = set()  # selected violation sets, by element index

    for e_idx, elem in enumerate(instance.elements):
        i, j = elem.pair
        if i in deleted or j in deleted or e_idx in paid:
            continue
        m = min(fact_residual[i], fact_residual[j], vio_residual[e_idx])
        fact_residual[i] -= m
        fact_residual[j] -= m
        vio_residual[e_idx] -= m
        if fact_residual[i] == 0:
            deleted.add(i)
        if fact_residual[j] == 0:
            deleted.add(j)
        if vio_residual[e_idx] == 0:
            paid.add(e_idx)

    # minimality sweep: violation sets first
    for e_idx in sorted(paid):
        i, j = instance.elements[e_idx].pair
        if i in deleted or j in deleted:
            paid.discard(e_idx)
    # then deletion sets, heaviest first (prefer keeping heavy facts)
    for i in sorted(deleted, key=lambda f: (-db.weight(f), f)):
        redundant = True
        for e_idx in instance.fact_elements[i]:
            if e_idx in paid:
                continue
            other = sum(instance.elements[e_idx].pair) - i
            if other in deleted:
                continue
            redundant = False
            break
        if redundant:
            deleted.discard(i)

    kept = frozenset(db.ids) - frozenset(deleted)
    breakdown = cost(kept, db, delta)
    cover_weight = sum((db.weight(i) for i in deleted), Fraction(0)) + sum(
        (delta.fds[instance.elements[e].fd_index].weight for e in paid),
        Fraction(0),
    )
    if breakdown.total > cover_weight:
        raise AssertionError(
            f"repair cost {breakdown.total} exceeds its cover certificate "
            f"{cover_weight}"
        )
    return RepairResult(kept, breakdown, "approx-cover", ratio_bound=3)
