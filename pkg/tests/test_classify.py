from random import Random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from softrepair import (
    FD,
    FDSet,
    Hardness,
    RouteKind,
    Schema,
    can_empty_simplify,
    classify,
    closure,
    fd,
    fdset,
    is_matching_constraint,
    lc_elimination_order,
    remove_attribute,
    remove_trivial,
)

from conftest import BIPARTITE_SCHEMA, FLIGHTS_SCHEMA

ABC = Schema("R", ("A", "B", "C"))


def small_fdsets(max_attrs=5, max_fds=3):
    """Random FD sets over up to five attributes (weights all 1)."""
    attrs = st.sampled_from(["A", "B", "C", "D", "E"][:max_attrs])
    one_fd = st.tuples(
        st.frozensets(attrs, max_size=3), st.frozensets(attrs, min_size=1, max_size=3)
    )
    return st.lists(one_fd, max_size=max_fds).map(
        lambda pairs: FDSet(
            tuple(
                FD(lhs, rhs, 1)
                for lhs, rhs in dict.fromkeys(pairs)  # drop duplicates
            )
        )
    )


class TestClosure:
    def test_transitive(self):
        assert closure({"A"}, fdset(fd(["A"], ["B"], 1), fd(["B"], ["C"], 1))) == {
            "A",
            "B",
            "C",
        }

    def test_empty(self):
        assert closure(set(), fdset()) == frozenset()

    def test_both_directions(self):
        delta = fdset(fd(["A"], ["B"], 1), fd(["B"], ["A"], 1), fd(["B"], ["C"], 1))
        assert closure({"B"}, delta) == {"A", "B", "C"}

    @given(small_fdsets(), st.frozensets(st.sampled_from("ABCDE")),
           st.frozensets(st.sampled_from("ABCDE")))
    def test_monotone_extensive_idempotent(self, delta, x, z):
        cx = closure(x, delta)
        assert x <= cx  # extensive
        assert closure(cx, delta) == cx  # idempotent
        if x <= z:
            assert cx <= closure(z, delta)  # monotone


class TestRemoveTrivial:
    def test_examples(self):
        assert remove_trivial(fdset(fd(["A", "B"], ["A"], 1))).fds == ()
        kept = remove_trivial(fdset(fd(["A"], ["B"], 1)))
        assert len(kept) == 1
        mixed = remove_trivial(fdset(fd(["A"], ["A"], 1), fd(["A"], ["B"], 1)))
        assert [p.describe() for p in mixed] == ["A -> B @ 1"]

    @given(small_fdsets())
    def test_idempotent(self, delta):
        once = remove_trivial(delta)
        assert remove_trivial(once) == once


class TestSimplify:
    def test_tractable_triple(self):
        delta = fdset(fd(["A"], ["B"], 1), fd(["B"], ["A"], 1), fd(["B"], ["C"], 1))
        assert can_empty_simplify(delta)

    def test_hard_chain(self):
        assert not can_empty_simplify(fdset(fd(["A"], ["B"], 1), fd(["B"], ["C"], 1)))

    def test_empty_set(self):
        assert can_empty_simplify(fdset())

    def test_single_fd_always_emptiable(self):
        assert can_empty_simplify(fdset(fd(["A", "B"], ["C"], 1)))
        assert can_empty_simplify(fdset(fd([], ["C"], 1)))


class TestLcElimination:
    def test_flights_pair_order(self, flights_fds):
        trace = lc_elimination_order(flights_fds, FLIGHTS_SCHEMA)
        assert trace is not None
        assert trace.order == ("Flight", "Airline", "Date", "Destination")
        # consensus weights along the way: nothing, then the first FD
        # collapsed to a consensus on Airline, then nothing, then the
        # second FD collapsed to a consensus on Destination
        assert [s.consensus_weight for s in trace.steps] == [0, 5, 0, 1]

    def test_merged_lhs_pair_has_no_order(self, flights_fds_merged_lhs):
        assert lc_elimination_order(flights_fds_merged_lhs, FLIGHTS_SCHEMA) is None

    def test_single_fd_always_has_order(self):
        trace = lc_elimination_order(fdset(fd(["B"], ["C"], 1)), ABC)
        assert trace is not None
        assert trace.order == ("B", "C")

    def test_snapshot_recurrence(self, flights_fds):
        trace = lc_elimination_order(flights_fds, FLIGHTS_SCHEMA)
        current = remove_trivial(flights_fds)
        for step in trace.steps:
            assert step.remaining == current
            current = remove_trivial(remove_attribute(current, step.attribute))
        assert len(current) == 0

    def test_colliding_reductions_merge_weights(self):
        # A -> B,C and B -> C collapse onto the same consensus after
        # eliminating B; weights must add up
        delta = fdset(fd([], ["B", "C"], 2), fd(["B"], ["C"], 3))
        trace = lc_elimination_order(delta, ABC)
        assert trace is not None
        assert trace.order == ("B", "C")
        assert trace.steps[1].consensus_weight == 5

    @given(small_fdsets())
    def test_lc_emptiable_implies_simplify_emptiable(self, delta):
        schema = Schema("R", ("A", "B", "C", "D", "E"))
        if lc_elimination_order(delta, schema) is not None:
            assert can_empty_simplify(delta)


class TestMatching:
    def test_flights_matching_pair(self):
        delta = fdset(
            fd(["Flight", "Airline", "Date"], ["Origin", "Destination", "Airplane"], 1),
            fd(["Origin", "Destination", "Airplane", "Date"], ["Flight", "Airline"], 1),
        )
        assert is_matching_constraint(delta, FLIGHTS_SCHEMA)

    def test_flights_near_miss(self):
        # lhs union misses Airline
        delta = fdset(
            fd(["Flight", "Date"], ["Airline", "Origin", "Destination", "Airplane"], 1),
            fd(["Origin", "Destination", "Airplane", "Date"], ["Flight", "Airline"], 1),
        )
        assert not is_matching_constraint(delta, FLIGHTS_SCHEMA)

    def test_two_key_binary(self):
        delta = fdset(fd(["A"], ["B"], 1), fd(["B"], ["A"], 1))
        assert is_matching_constraint(delta, BIPARTITE_SCHEMA)

    def test_wrong_cardinality(self):
        assert not is_matching_constraint(fdset(fd(["A"], ["B"], 1)), BIPARTITE_SCHEMA)


class TestClassify:
    def test_flights_pair_routes_to_dp(self, flights_fds):
        route = classify(flights_fds, FLIGHTS_SCHEMA)
        assert route.kind is RouteKind.LC_SEQUENCE
        assert route.hardness is Hardness.TRACTABLE

    def test_hard_triple(self):
        delta = fdset(fd(["A"], ["B"], 1), fd(["B"], ["A"], 1), fd(["B"], ["C"], 1))
        route = classify(delta, ABC)
        assert route.kind is RouteKind.APPROX_ONLY
        assert route.hardness is Hardness.APX_HARD_SUBSET

    def test_merged_lhs_pair_is_open(self, flights_fds_merged_lhs):
        route = classify(flights_fds_merged_lhs, FLIGHTS_SCHEMA)
        assert route.kind is RouteKind.APPROX_ONLY
        assert route.hardness is Hardness.UNKNOWN

    def test_two_key_routes_to_flow(self):
        route = classify(fdset(fd(["A"], ["B"], 1), fd(["B"], ["A"], 1)), BIPARTITE_SCHEMA)
        assert route.kind is RouteKind.MATCHING
        assert route.hardness is Hardness.TRACTABLE

    def test_lc_preferred_over_matching(self):
        # a single FD covering the schema is emptiable; dp wins the route
        delta = fdset(fd(["A"], ["B"], 1))
        route = classify(delta, BIPARTITE_SCHEMA)
        assert route.kind is RouteKind.LC_SEQUENCE

    def test_empty_fdset_is_trivially_tractable(self):
        route = classify(fdset(), ABC)
        assert route.kind is RouteKind.LC_SEQUENCE
        assert route.elimination_order == ()
