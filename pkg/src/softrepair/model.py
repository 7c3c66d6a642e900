"""Relational model: schemas, weighted facts, databases, and weighted FDs.

Every weight is an exact rational (``fractions.Fraction``).  Nothing in this
package compares costs through floating point: optima and ties must be
decided exactly, so floats are rejected at the boundary.

All types are immutable after construction and safe to share across
threads or processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction

WeightLike = Union[int, str, Fraction]


class SoftRepairError(Exception):
    """Base class for every error raised by this package."""


class SchemaMismatchError(SoftRepairError):
    """An attribute or tuple does not fit the schema it is used with."""


class IngestionError(SoftRepairError):
    """A table row or weight could not be ingested."""


class FDSpecError(SoftRepairError):
    """A functional-dependency specification could not be parsed."""


class RoutingError(SoftRepairError):
    """A solver was requested for an input it cannot handle exactly."""


class ReductionError(SoftRepairError):
    """An input does not have the shape a reduction requires."""


class InstanceTooLargeError(SoftRepairError):
    """The brute-force oracle was given more facts than its limit."""


def as_weight(value: WeightLike) -> Fraction:
    """Convert ``value`` to an exact nonnegative rational.

    Accepts ints, Fractions and strings like ``"3"``, ``"1/3"`` or ``"0.5"``
    (decimal strings convert exactly, e.g. ``0.5 -> 1/2``).  Binary floats
    are rejected: they would smuggle rounding into cost comparisons.
    """
    if isinstance(value, float):
        raise TypeError(
            "float weights are not exact; pass an int, a Fraction, or a "
            "string such as '1/3' or '0.5'"
        )
    try:
        w = Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse weight {value!r}: {exc}") from None
    if w < 0:
        raise ValueError(f"weights must be nonnegative, got {w}")
    return w


def format_weight(w: Fraction) -> str:
    """Render a rational as ``'num'`` or ``'num/den'`` (exact round-trip)."""
    return str(w)


@dataclass(frozen=True)
class Schema:
    """A single-relation schema: a relation name and ordered attributes."""

    relation_name: str
    attributes: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if not self.attributes:
            raise SchemaMismatchError("a schema needs at least one attribute")
        if len(set(self.attributes)) != len(self.attributes):
            raise SchemaMismatchError(
                f"duplicate attribute names in {self.attributes}"
            )

    @property
    def arity(self) -> int:
        return len(self.attributes)

    def index(self, attribute: str) -> int:
        try:
            return self.attributes.index(attribute)
        except ValueError:
            raise SchemaMismatchError(
                f"unknown attribute {attribute!r}; schema has {self.attributes}"
            ) from None

    def indices(self, attributes: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.index(a) for a in attributes)

    def ordered(self, attributes: Iterable[str]) -> tuple[str, ...]:
        """The given attributes, reordered to schema order."""
        wanted = set(attributes)
        unknown = wanted - set(self.attributes)
        if unknown:
            raise SchemaMismatchError(f"unknown attributes {sorted(unknown)}")
        return tuple(a for a in self.attributes if a in wanted)


@dataclass(frozen=True)
class Fact:
    """One weighted tuple.  ``fact_id`` is its dense index in the database."""

    fact_id: int
    values: tuple[str, ...]
    weight: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "weight", as_weight(self.weight))


@dataclass(frozen=True)
class FD:
    """A weighted functional dependency ``lhs -> rhs``.

    An empty ``lhs`` is a consensus constraint: all facts must agree on the
    ``rhs`` attributes.  The FD is trivial when ``rhs <= lhs``.
    """

    lhs: frozenset[str]
    rhs: frozenset[str]
    weight: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lhs", frozenset(self.lhs))
        object.__setattr__(self, "rhs", frozenset(self.rhs))
        object.__setattr__(self, "weight", as_weight(self.weight))

    @property
    def is_trivial(self) -> bool:
        return self.rhs <= self.lhs

    @property
    def attributes(self) -> frozenset[str]:
        return self.lhs | self.rhs

    def describe(self, schema: Schema | None = None) -> str:
        """Render as ``'A,B -> C @ w'``, attributes in schema order if given."""
        if schema is not None:
            lhs = schema.ordered(self.lhs)
            rhs = schema.ordered(self.rhs)
        else:
            lhs = tuple(sorted(self.lhs))
            rhs = tuple(sorted(self.rhs))
        return f"{','.join(lhs)} -> {','.join(rhs)} @ {format_weight(self.weight)}"


def fd(lhs: Iterable[str], rhs: Iterable[str], weight: WeightLike = 1) -> FD:
    """Convenience constructor: ``fd(['A'], ['B'], '1/2')``."""
    return FD(frozenset(lhs), frozenset(rhs), as_weight(weight))


@dataclass(frozen=True)
class FDSet:
    """A set of weighted FDs.  Duplicate (lhs, rhs) pairs are rejected."""

    fds: tuple[FD, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "fds", tuple(self.fds))
        seen = set()
        for phi in self.fds:
            key = (phi.lhs, phi.rhs)
            if key in seen:
                raise FDSpecError(f"duplicate FD {phi.describe()}")
            seen.add(key)

    def __iter__(self):
        return iter(self.fds)

    def __len__(self) -> int:
        return len(self.fds)

    @property
    def attributes(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for phi in self.fds:
            out |= phi.attributes
        return out

    def nontrivial(self) -> "FDSet":
        return FDSet(tuple(phi for phi in self.fds if not phi.is_trivial))

    def validate_schema(self, schema: Schema) -> None:
        extra = self.attributes - set(schema.attributes)
        if extra:
            raise SchemaMismatchError(
                f"FDs mention attributes {sorted(extra)} not in schema "
                f"{schema.attributes}"
            )


def fdset(*fds_: FD) -> FDSet:
    return FDSet(tuple(fds_))


class Database:
    """An ordered collection of distinct weighted facts over one schema.

    Fact ids are 0..n-1 in list order; the order is also the deterministic
    tie-breaking order used by the solvers.  Duplicate value tuples are
    rejected (set semantics over the tuples themselves).
    """

    __slots__ = ("schema", "facts", "_total_weight", "_by_values")

    def __init__(self, schema: Schema, facts: Sequence[Fact]):
        self.schema = schema
        self.facts: tuple[Fact, ...] = tuple(facts)
        by_values: dict[tuple[str, ...], int] = {}
        for pos, f in enumerate(self.facts):
            if f.fact_id != pos:
                raise IngestionError(
                    f"fact ids must be dense list indices; fact at position "
                    f"{pos} has id {f.fact_id}"
                )
            if len(f.values) != schema.arity:
                raise IngestionError(
                    f"fact {pos} has {len(f.values)} values, schema arity is "
                    f"{schema.arity}"
                )
            if f.values in by_values:
                raise IngestionError(
                    f"duplicate tuple {f.values} (facts {by_values[f.values]} "
                    f"and {pos})"
                )
            by_values[f.values] = pos
        self._by_values = by_values
        self._total_weight = sum((f.weight for f in self.facts), Fraction(0))

    @classmethod
    def from_rows(
        cls,
        schema: Schema,
        rows: Iterable[tuple[Sequence[str], WeightLike]],
    ) -> "Database":
        """Build from ``(values, weight)`` pairs, assigning dense fact ids."""
        facts = [
            Fact(i, tuple(values), as_weight(weight))
            for i, (values, weight) in enumerate(rows)
        ]
        return cls(schema, facts)

    def __len__(self) -> int:
        return len(self.facts)

    def __iter__(self):
        return iter(self.facts)

    def fact(self, fact_id: int) -> Fact:
        return self.facts[fact_id]

    def weight(self, fact_id: int) -> Fraction:
        return self.facts[fact_id].weight

    @property
    def total_weight(self) -> Fraction:
        return self._total_weight

    @property
    def ids(self) -> range:
        return range(len(self.facts))


def project(schema: Schema, fact: Fact, attributes: Sequence[str]) -> tuple[str, ...]:
    """The fact's values on ``attributes``, in the given order.

    An empty attribute list yields the empty tuple.  Unknown attributes
    raise :class:`SchemaMismatchError`.
    """
    cols = schema.indices(attributes)
    return tuple(fact.values[c] for c in cols)


def is_violation(schema: Schema, f: Fact, g: Fact, phi: FD) -> bool:
    """True iff the pair agrees on ``phi.lhs`` but disagrees on ``phi.rhs``.

    Symmetric in ``f`` and ``g``; a fact never conflicts with itself, and a
    trivial FD is never violated.
    """
    if f.fact_id == g.fact_id:
        return False
    for c in schema.indices(phi.lhs):
        if f.values[c] != g.values[c]:
            return False
    for c in schema.indices(phi.rhs):
        if f.values[c] != g.values[c]:
            return True
    return False
