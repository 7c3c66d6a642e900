"""Exhaustive optimal-subset search for desk-scale instances.

Ground truth for everything else: enumerates all 2^n subsets and keeps the
exact minimum plus every minimizer.  Pair conflict weights are precomputed
from the elementary violation predicate, and the optima are re-verified
against the cost engine before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cost import cost
from .model import Database, FDSet, InstanceTooLargeError, is_violation


@dataclass(frozen=True)
class OracleResult:
    best_cost: Fraction
    all_optima: tuple[frozenset[int], ...]


def brute_force_optimal(
    db: Database, delta: FDSet, limit: int = 16
) -> OracleResult:
    """Exact minimum cost and all optimal subsets, by full enumeration.

    Raises :class:`InstanceTooLargeError` when ``len(db) > limit``.
    """
    n = len(db)
    if n > limit:
        raise InstanceTooLargeError(
            f"{n} facts exceed the oracle limit of {limit}"
        )
    schema = db.schema
    weights = [f.weight for f in db.facts]
    total = db.total_weight

    # Summed violation weight per unordered pair, over all FDs at once.
    # Zero-weight pairs are dropped: they cannot affect any cost.
    pair_cost: list[tuple[int, int, Fraction]] = []
    for i in range(n):
        for j in range(i + 1, n):
            w = Fraction(0)
            for phi in delta:
                if is_violation(schema, db.fact(i), db.fact(j), phi):
                    w += phi.weight
            if w:
                pair_cost.append((i, j, w))

    best: Fraction | None = None
    optima: list[frozenset[int]] = []
    for mask in range(1 << n):
        kept_weight = Fraction(0)
        for i in range(n):
            if mask >> i & 1:
                kept_weight += weights[i]
        c = total - kept_weight
        if best is not None and c > best:
            continue  # deletions alone already beat by the incumbent
        for i, j, w in pair_cost:
            if mask >> i & 1 and mask >> j & 1:
                c += w
        if best is None or c < best:
            best = c
            optima = [frozenset(i for i in range(n) if mask >> i & 1)]
        elif c == best:
            optima.append(frozenset(i for i in range(n) if mask >> i & 1))

    assert best is not None and optima
    for subset in optima:
        recomputed = cost(subset, db, delta).total
        if recomputed != best:
            raise AssertionError(
                f"oracle disagrees with cost engine: {recomputed} != {best}"
            )
    return OracleResult(best, tuple(optima))
