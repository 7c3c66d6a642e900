from fractions import Fraction
from random import Random

import pytest
from hypothesis import HealthCheck, settings

from softrepair import Database, FDSet, Schema, fd, fdset

settings.register_profile(
    "suite",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


FLIGHTS_SCHEMA = Schema(
    "Flights",
    ("Flight", "Airline", "Date", "Origin", "Destination", "Airplane"),
)

FLIGHTS_ROWS = [
    (("UA123", "United Airlines", "01/01/2021", "LA", "NY", "N652NW"), 3),
    (("UA123", "United Airlines", "01/01/2021", "NY", "UT", "N652NW"), 2),
    (("UA123", "Delta", "01/01/2021", "LA", "NY", "N652NW"), 1),
    (("DL456", "Southwest", "02/01/2021", "NC", "MA", "N713DX"), 2),
    (("DL456", "Southwest", "03/01/2021", "NJ", "FL", "N245DX"), 1),
    (("DL456", "Delta", "03/01/2021", "CA", "IL", "N819US"), 4),
]

# the three candidate subsets discussed alongside the flights data
KEPT_CARDINALITY = frozenset({1, 3, 4})  # cost 8
KEPT_WEIGHTED = frozenset({0, 5})  # cost 6
KEPT_OPTIMAL = frozenset({0, 1, 5})  # cost 5


@pytest.fixture
def flights_db() -> Database:
    return Database.from_rows(FLIGHTS_SCHEMA, FLIGHTS_ROWS)


@pytest.fixture
def flights_fds() -> FDSet:
    return fdset(
        fd(["Flight"], ["Airline"], 5),
        fd(["Flight", "Airline", "Date"], ["Destination"], 1),
    )


@pytest.fixture
def flights_fds_merged_lhs() -> FDSet:
    """Logically equivalent to the main pair, but the second lhs drops
    Airline; not emptiable by lhs/consensus elimination."""
    return fdset(
        fd(["Flight"], ["Airline"], 5),
        fd(["Flight", "Date"], ["Destination"], 1),
    )


BIPARTITE_SCHEMA = Schema("R", ("A", "B"))
BIPARTITE_VALUES = [
    ("a1", "b1"),
    ("a1", "b2"),
    ("a1", "b3"),
    ("a2", "b1"),
    ("a2", "b2"),
    ("a3", "b3"),
]


def bipartite_db(weights) -> Database:
    """The six-fact two-column example; three A-values, three B-values."""
    return Database.from_rows(
        BIPARTITE_SCHEMA, list(zip(BIPARTITE_VALUES, weights))
    )


@pytest.fixture
def sixpack() -> Database:
    return bipartite_db([1] * 6)


def two_key_fds(w1, w2) -> FDSet:
    return fdset(fd(["A"], ["B"], w1), fd(["B"], ["A"], w2))


def random_small_db(
    rng: Random,
    n: int,
    attrs: tuple[str, ...] = ("A", "B"),
    values_per_column: int = 3,
    max_weight: int = 4,
) -> Database:
    """Small random database with exact rational weights; duplicate tuples
    are redrawn."""
    seen = set()
    rows = []
    while len(rows) < n:
        values = tuple(
            f"v{rng.randrange(values_per_column)}" for _ in attrs
        )
        if values in seen:
            continue
        seen.add(values)
        q = rng.randint(1, 4)
        rows.append((values, Fraction(rng.randint(0, max_weight * q), q)))
    return Database.from_rows(Schema("Rnd", attrs), rows)
