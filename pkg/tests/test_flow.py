from fractions import Fraction
from random import Random

import pytest

from softrepair import (
    Database,
    ReductionError,
    RoutingError,
    Schema,
    brute_force_optimal,
    build_network,
    dump_network,
    embed_subset,
    extract_repair,
    fd,
    fdset,
    matching_pair_database,
    min_cost_max_flow,
    shifted_cost,
    solve_matching,
    solve_two_key,
)

from conftest import (
    FLIGHTS_ROWS,
    FLIGHTS_SCHEMA,
    bipartite_db,
    random_small_db,
    two_key_fds,
)

W = Fraction


class TestBuildNetwork:
    def test_fan_counts_match_value_multiplicities(self, sixpack):
        net = build_network(sixpack, 3, W(2), W(2))
        assert [len(g) for g in net.fan_in_groups] == [3, 2, 1]
        assert [len(g) for g in net.fan_out_groups] == [2, 2, 2]
        assert len(net.fact_edges) == 6
        assert net.edges[0].capacity == 3  # the k-limited source edge
        assert all(
            e.capacity == 1 for e in net.edges[1:]
        )

    def test_single_fact_path(self):
        db = Database.from_rows(Schema("R", ("A", "B")), [(("a", "b"), 5)])
        net = build_network(db, 1, W(1), W(1))
        tails = [e.tail for e in net.edges]
        heads = [e.head for e in net.edges]
        assert tails == ["s", "s'", "a[a]#1", "a[a]", "b[b]", "b[b]#1"]
        assert heads == ["s'", "a[a]#1", "a[a]", "b[b]", "b[b]#1", "t"]
        fact_edge = net.edges[net.fact_edges[0]]
        assert fact_edge.cost == -5

    def test_fan_in_costs_scale_with_slot(self, sixpack):
        net = build_network(sixpack, 3, W(2), W(2))
        slot_costs = [
            net.edges[slot].cost for _, slot in net.fan_in_groups[0]
        ]
        assert slot_costs == [0, 2, 4]

    def test_wrong_arity_rejected(self, flights_db):
        with pytest.raises(ReductionError):
            build_network(flights_db, 1, W(1), W(1))

    def test_k_out_of_range(self, sixpack):
        with pytest.raises(ReductionError):
            build_network(sixpack, 7, W(1), W(1))


class TestMinCostMaxFlow:
    def test_hard_constraint_case(self, sixpack):
        # violations too dear: the best 3-fact subsets are perfect matchings
        net = build_network(sixpack, 3, W(2), W(2))
        flow = min_cost_max_flow(net)
        assert flow.value == 3
        assert flow.cost == -3
        kept = extract_repair(flow, sixpack)
        assert kept in (frozenset({1, 3, 5}), frozenset({0, 4, 5}))

    def test_zero_k_gives_zero_flow(self, sixpack):
        net = build_network(sixpack, 0, W(2), W(2))
        flow = min_cost_max_flow(net)
        assert flow.value == 0 and flow.cost == 0 and flow.flow == {}

    def test_cheap_constraints_full_flow(self):
        db = bipartite_db([3] * 6)
        flow = min_cost_max_flow(build_network(db, 6, W(1), W(1)))
        assert flow.value == 6
        assert flow.cost == -18 + 4 + 3  # facts, fan-in charges, fan-out charges

    def test_prefix_fan_usage(self):
        rng = Random(5150)
        for _ in range(15):
            db = random_small_db(rng, rng.randint(1, 8))
            k = rng.randint(0, len(db))
            net = build_network(
                db, k, W(rng.randint(0, 3)), W(rng.randint(0, 3))
            )
            flow = min_cost_max_flow(net)
            flow.validate()
            for groups in (net.fan_in_groups, net.fan_out_groups):
                for group in groups:
                    usage = [flow.flow.get(slot, 0) for _, slot in group]
                    assert usage == sorted(usage, reverse=True)  # prefix form


class TestExtractAndEmbed:
    def test_extract_unique_optimum(self):
        db = bipartite_db([2, 2, 1, 1, 2, 3])
        flow = min_cost_max_flow(build_network(db, 3, W(1), W(4)))
        assert extract_repair(flow, db) == frozenset({0, 4, 5})

    def test_embed_matches_flow_cost(self, sixpack):
        emb = embed_subset({1, 3, 5}, sixpack, W(2), W(2))
        assert emb.value == 3
        assert emb.cost == -3

    def test_embed_empty(self, sixpack):
        emb = embed_subset((), sixpack, W(2), W(2))
        assert emb.value == 0 and emb.cost == 0

    def test_embed_whole_database(self):
        db = bipartite_db([3] * 6)
        emb = embed_subset(range(6), db, W(1), W(1))
        assert emb.cost == -11

    def test_embed_cost_equals_shifted_objective(self):
        # feasibility + cost agreement on many random subset/database pairs
        rng = Random(424242)
        for _ in range(120):
            db = random_small_db(rng, rng.randint(0, 8))
            w1, w2 = W(rng.randint(0, 4), rng.randint(1, 2)), W(rng.randint(0, 4))
            kept = [i for i in db.ids if rng.random() < 0.5]
            emb = embed_subset(kept, db, w1, w2)
            emb.validate()
            assert emb.value == len(kept)
            assert emb.cost == shifted_cost(kept, db, two_key_fds(w1, w2))


class TestSolveTwoKey:
    def test_matching_when_violations_dear(self, sixpack):
        result = solve_two_key(sixpack, W(2), W(2))
        oracle = brute_force_optimal(sixpack, two_key_fds(2, 2))
        assert result.total_cost == oracle.best_cost == 3
        assert result.kept in oracle.all_optima
        assert frozenset({1, 3, 5}) in oracle.all_optima

    def test_keeps_everything_when_deletion_dear(self):
        db = bipartite_db([3] * 6)
        result = solve_two_key(db, W(1), W(1))
        assert result.kept == frozenset(range(6))
        assert result.total_cost == 7

    def test_mixed_weights(self):
        db = bipartite_db([2, 2, 1, 1, 2, 3])
        result = solve_two_key(db, W(1), W(1))
        assert result.kept == frozenset({0, 1, 4, 5})
        assert result.total_cost == 4

    def test_mixed_weights_with_dear_b_side(self):
        db = bipartite_db([2, 2, 1, 1, 2, 3])
        result = solve_two_key(db, W(1), W(4))
        assert result.kept == frozenset({0, 4, 5})
        assert result.total_cost == 4

    def test_empty_database(self):
        db = Database.from_rows(Schema("R", ("A", "B")), [])
        result = solve_two_key(db, W(1), W(1))
        assert result.kept == frozenset() and result.total_cost == 0

    def test_warm_start_equals_independent_solves(self):
        rng = Random(777)
        for _ in range(25):
            db = random_small_db(rng, rng.randint(0, 8))
            w1 = W(rng.randint(0, 4), rng.randint(1, 2))
            w2 = W(rng.randint(0, 4), rng.randint(1, 2))
            warm = solve_two_key(db, w1, w2)
            independent = solve_two_key(db, w1, w2, independent_solves=True)
            assert warm.total_cost == independent.total_cost

    def test_oracle_agreement(self):
        rng = Random(31337)
        for _ in range(40):
            db = random_small_db(rng, rng.randint(0, 8))
            w1 = W(rng.randint(0, 8), rng.randint(1, 2))
            w2 = W(rng.randint(0, 8), rng.randint(1, 2))
            result = solve_two_key(db, w1, w2)
            oracle = brute_force_optimal(db, two_key_fds(w1, w2))
            assert result.total_cost == oracle.best_cost
            assert result.kept in oracle.all_optima


class TestSolveMatching:
    def flights_matching(self):
        return fdset(
            fd(
                ["Flight", "Airline", "Date"],
                ["Origin", "Destination", "Airplane"],
                2,
            ),
            fd(
                ["Origin", "Destination", "Airplane", "Date"],
                ["Flight", "Airline"],
                3,
            ),
        )

    def test_flights_pair_against_oracle(self, flights_db):
        delta = self.flights_matching()
        result = solve_matching(flights_db, delta)
        oracle = brute_force_optimal(flights_db, delta)
        assert result.total_cost == oracle.best_cost
        assert result.kept in oracle.all_optima

    def test_single_fact(self):
        db = Database.from_rows(FLIGHTS_SCHEMA, FLIGHTS_ROWS[:1])
        result = solve_matching(db, self.flights_matching())
        assert result.kept == frozenset({0}) and result.total_cost == 0

    def test_two_key_reduction_is_identity_up_to_renaming(self, sixpack):
        delta = two_key_fds(2, 2)
        direct = solve_two_key(sixpack, W(2), W(2))
        reduced = solve_matching(sixpack, delta)
        assert direct.total_cost == reduced.total_cost
        pair_db = matching_pair_database(sixpack, delta)
        assert len(pair_db) == 6
        assert [f.values for f in pair_db] == [
            ("0", "0"), ("0", "1"), ("0", "2"), ("1", "0"), ("1", "1"), ("2", "2")
        ]

    def test_non_matching_rejected(self, flights_db, flights_fds):
        with pytest.raises(RoutingError):
            solve_matching(flights_db, flights_fds)


class TestDump:
    def test_line_format(self, sixpack):
        net = build_network(sixpack, 2, W(1, 2), W(3))
        text = dump_network(net)
        lines = text.strip().split("\n")
        assert len(lines) == len(net.edges)
        assert lines[0] == "s s' 2 0/1"
        for line in lines:
            tail, head, cap, cost_ = line.split(" ")
            assert cap.isdigit()
            num, den = cost_.split("/")
            int(num), int(den)

    def test_whitespace_sanitized(self):
        db = Database.from_rows(
            Schema("R", ("A", "B")), [(("a value", "b"), 1)]
        )
        text = dump_network(build_network(db, 1, W(1), W(1)))
        for line in text.strip().split("\n"):
            assert len(line.split(" ")) == 4
