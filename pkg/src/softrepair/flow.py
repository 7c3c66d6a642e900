"""Exact solver for two mutually-keying FDs via min-cost max-flow.

For a two-column database under {A -> B, B -> A}, a layered network is
built per kept-size k: a source feeds k units through per-value fan-in
slots (the i-th slot for value a costs (i-1)*w1, so keeping m facts with
the same A value pays m*(m-1)/2 * w1, exactly the violation charge), each
unit crosses one fact edge rewarding -w_f, and exits through symmetric
fan-out slots costing (i-1)*w2.  The min-cost flow of value k therefore
equals the shifted objective of the best k-fact subset, and the overall
optimum is the cheapest answer over k = 0..n.

General matching constraints (two FDs whose lhs/rhs unions and lhs union
cover the whole schema) reduce to the two-column case by coding each
fact's two lhs projections as opaque values; the coding is reversible
because the two lhs sides together cover every attribute.

The flow engine is successive shortest paths with node potentials,
initialized by one topological-order relaxation (the network is a DAG, so
negative fact-edge costs need no Bellman-Ford).  Rational costs are scaled
to exact integers per network; every augmenting path carries exactly one
unit because all interior edges have capacity 1, so the running cost after
j augmentations is the exact optimum for k = j, and a single warm-started
pass prices all k at once.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

from .classify import is_matching_constraint
from .cost import RepairResult, cost, shifted_cost
from .model import (
    FD,
    Database,
    FDSet,
    Fact,
    ReductionError,
    RoutingError,
    Schema,
    project,
)


@dataclass(frozen=True)
class FlowEdge:
    tail: str
    head: str
    capacity: int
    cost: Fraction


@dataclass(frozen=True)
class FlowNetwork:
    """The layered network for one kept-size bound k.

    ``fact_edges`` maps fact id to its edge index; ``fan_in_groups`` and
    ``fan_out_groups`` list, per value, the (feeder, slot) edge-index pairs
    of its fan slots in increasing slot order.
    """

    nodes: tuple[str, ...]
    edges: tuple[FlowEdge, ...]
    k: int
    fact_edges: Mapping[int, int]
    fan_in_groups: tuple[tuple[tuple[int, int], ...], ...]
    fan_out_groups: tuple[tuple[tuple[int, int], ...], ...]
    source: str = "s"
    sink: str = "t"


@dataclass
class IntegralFlow:
    """An integral flow on a :class:`FlowNetwork` with its exact cost."""

    network: FlowNetwork
    flow: dict[int, int]  # edge index -> units
    value: int
    cost: Fraction

    def validate(self) -> None:
        """Check capacities, conservation, value and cost recomputation."""
        net = self.network
        balance: dict[str, int] = {v: 0 for v in net.nodes}
        total = Fraction(0)
        for idx, edge in enumerate(net.edges):
            units = self.flow.get(idx, 0)
            if not 0 <= units <= edge.capacity:
                raise AssertionError(
                    f"edge {edge.tail}->{edge.head} carries {units} of "
                    f"capacity {edge.capacity}"
                )
            balance[edge.tail] -= units
            balance[edge.head] += units
            total += units * edge.cost
        for node, b in balance.items():
            if node == net.source:
                if -b != self.value:
                    raise AssertionError(
                        f"source emits {-b}, value says {self.value}"
                    )
            elif node == net.sink:
                if b != self.value:
                    raise AssertionError(
                        f"sink absorbs {b}, value says {self.value}"
                    )
            elif b != 0:
                raise AssertionError(f"conservation fails at {node}: {b}")
        if total != self.cost:
            raise AssertionError(f"cost {self.cost} recomputes to {total}")


def _two_columns(schema: Schema) -> tuple[str, str]:
    if schema.arity != 2:
        raise ReductionError(
            f"flow reduction needs a two-attribute schema, got arity "
            f"{schema.arity}"
        )
    return schema.attributes[0], schema.attributes[1]


def build_network(
    db: Database, k: int, w1: Fraction, w2: Fraction
) -> FlowNetwork:
    """The network whose min-cost flow of value k prices the best k-subset.

    All capacities are 1 except k on the source's single outgoing edge.
    ``k`` may be 0 (prices the empty subset) up to the number of facts.
    """
    _two_columns(db.schema)
    n = len(db)
    if not 0 <= k <= n:
        raise ReductionError(f"k={k} out of range 0..{n}")

    a_of = [f.values[0] for f in db.facts]
    b_of = [f.values[1] for f in db.facts]
    a_values = list(dict.fromkeys(a_of))  # first-appearance order
    b_values = list(dict.fromkeys(b_of))
    a_count = {a: a_of.count(a) for a in a_values}
    b_count = {b: b_of.count(b) for b in b_values}

    nodes: list[str] = ["s", "s'"]
    for a in a_values:
        nodes += [f"a[{a}]#{i}" for i in range(1, a_count[a] + 1)]
    nodes += [f"a[{a}]" for a in a_values]
    nodes += [f"b[{b}]" for b in b_values]
    for b in b_values:
        nodes += [f"b[{b}]#{i}" for i in range(1, b_count[b] + 1)]
    nodes.append("t")

    edges: list[FlowEdge] = [FlowEdge("s", "s'", k, Fraction(0))]
    fan_in_groups = []
    for a in a_values:
        group = []
        for i in range(1, a_count[a] + 1):
            feeder = len(edges)
            edges.append(FlowEdge("s'", f"a[{a}]#{i}", 1, Fraction(0)))
            slot = len(edges)
            edges.append(
                FlowEdge(f"a[{a}]#{i}", f"a[{a}]", 1, (i - 1) * w1)
            )
            group.append((feeder, slot))
        fan_in_groups.append(tuple(group))
    fact_edges = {}
    for f in db.facts:
        fact_edges[f.fact_id] = len(edges)
        edges.append(
            FlowEdge(f"a[{f.values[0]}]", f"b[{f.values[1]}]", 1, -f.weight)
        )
    fan_out_groups = []
    for b in b_values:
        group = []
        for i in range(1, b_count[b] + 1):
            slot = len(edges)
            edges.append(FlowEdge(f"b[{b}]", f"b[{b}]#{i}", 1, (i - 1) * w2))
            feeder = len(edges)
            edges.append(FlowEdge(f"b[{b}]#{i}", "t", 1, Fraction(0)))
            group.append((slot, feeder))
        fan_out_groups.append(tuple(group))

    return FlowNetwork(
        nodes=tuple(nodes),
        edges=tuple(edges),
        k=k,
        fact_edges=fact_edges,
        fan_in_groups=tuple(fan_in_groups),
        fan_out_groups=tuple(fan_out_groups),
    )


class _SspEngine:
    """Successive shortest paths with potentials on scaled integer costs."""

    def __init__(self, net: FlowNetwork):
        self.net = net
        self.scale = lcm(*(e.cost.denominator for e in net.edges), 1)
        self.index = {v: i for i, v in enumerate(net.nodes)}
        self.n = len(net.nodes)
        # arc arrays; arc 2*i is edge i, arc 2*i+1 its reverse
        self.head: list[int] = []
        self.residual: list[int] = []
        self.cost: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(self.n)]
        for e in net.edges:
            u, v = self.index[e.tail], self.index[e.head]
            c = int(e.cost * self.scale)
            self.adj[u].append(len(self.head))
            self.head.append(v)
            self.residual.append(e.capacity)
            self.cost.append(c)
            self.adj[v].append(len(self.head))
            self.head.append(u)
            self.residual.append(0)
            self.cost.append(-c)
        self.source = self.index[net.source]
        self.sink = self.index[net.sink]
        self.potential = self._initial_potentials()

    def _initial_potentials(self) -> list[int]:
        # One relaxation pass in topological order handles the negative
        # fact-edge costs; capacities are ignored on purpose, which only
        # strengthens the potential inequality.
        indeg = [0] * self.n
        for u in range(self.n):
            for a in self.adj[u]:
                if a % 2 == 0:
                    indeg[self.head[a]] += 1
        order = [u for u in range(self.n) if indeg[u] == 0]
        for u in order:
            for a in self.adj[u]:
                if a % 2 == 0:
                    indeg[self.head[a]] -= 1
                    if indeg[self.head[a]] == 0:
                        order.append(self.head[a])
        if len(order) != self.n:
            raise AssertionError("flow network is not acyclic")
        dist: list[int | None] = [None] * self.n
        dist[self.source] = 0
        for u in order:
            if dist[u] is None:
                continue
            for a in self.adj[u]:
                if a % 2 == 0:
                    v = self.head[a]
                    d = dist[u] + self.cost[a]
                    if dist[v] is None or d < dist[v]:
                        dist[v] = d
        if any(d is None for d in dist):
            raise AssertionError("some network node is unreachable")
        return [d for d in dist if d is not None]

    def flow_on(self, edge_index: int) -> int:
        return self.residual[2 * edge_index + 1]

    def augment_one(self) -> int | None:
        """Push one unit along a shortest residual path.

        Returns the path's exact scaled cost, or None when the sink is no
        longer reachable (max flow reached).  Every interior edge has unit
        capacity, so a single unit is always the bottleneck.
        """
        dist: list[int | None] = [None] * self.n
        parent_arc: list[int] = [-1] * self.n
        dist[self.source] = 0
        heap: list[tuple[int, int]] = [(0, self.source)]
        while heap:
            d, u = heapq.heappop(heap)
            if dist[u] is not None and d > dist[u]:
                continue
            for a in self.adj[u]:
                if self.residual[a] <= 0:
                    continue
                v = self.head[a]
                nd = d + self.cost[a] + self.potential[u] - self.potential[v]
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    parent_arc[v] = a
                    heapq.heappush(heap, (nd, v))
        if dist[self.sink] is None:
            return None
        sink_dist = dist[self.sink]
        for v in range(self.n):
            self.potential[v] += dist[v] if dist[v] is not None else sink_dist
        path_cost = 0
        v = self.sink
        while v != self.source:
            a = parent_arc[v]
            self.residual[a] -= 1
            self.residual[a ^ 1] += 1
            path_cost += self.cost[a]
            v = self.head[a ^ 1]
        return path_cost

    def current_flow(self) -> dict[int, int]:
        return {
            i: self.flow_on(i)
            for i in range(len(self.net.edges))
            if self.flow_on(i)
        }


def _canonicalize(net: FlowNetwork, flow: dict[int, int]) -> Fraction:
    """Rewrite fan-slot usage into prefix form and return the exact cost.

    Slot costs grow with the slot index, so moving used slots down never
    increases cost; for a min-cost flow it must leave the cost unchanged,
    which the caller asserts.
    """
    for groups in (net.fan_in_groups, net.fan_out_groups):
        for group in groups:
            used = sum(flow.get(s, 0) for _, s in group) + sum(
                flow.get(f, 0) for f, _ in group
            )
            assert used % 2 == 0
            used //= 2
            for slot_pos, (first, second) in enumerate(group):
                units = 1 if slot_pos < used else 0
                for idx in (first, second):
                    if units:
                        flow[idx] = 1
                    else:
                        flow.pop(idx, None)
    return sum(
        (units * net.edges[idx].cost for idx, units in flow.items()),
        Fraction(0),
    )


def min_cost_max_flow(net: FlowNetwork) -> IntegralFlow:
    """An integral minimum-cost maximum flow, in canonical prefix form."""
    engine = _SspEngine(net)
    total_scaled = 0
    value = 0
    while True:
        pushed = engine.augment_one()
        if pushed is None:
            break
        total_scaled += pushed
        value += 1
    if value != min(net.k, len(net.fact_edges)):
        raise AssertionError(
            f"max flow {value} differs from min(k, n) = "
            f"{min(net.k, len(net.fact_edges))}"
        )
    flow = engine.current_flow()
    exact = Fraction(total_scaled, engine.scale)
    canonical_cost = _canonicalize(net, flow)
    if canonical_cost != exact:
        raise AssertionError(
            f"canonicalization changed the cost: {exact} -> {canonical_cost}"
        )
    result = IntegralFlow(net, flow, value, exact)
    result.validate()
    return result


def extract_repair(flow: IntegralFlow, db: Database) -> frozenset[int]:
    """The facts whose fact edge carries one unit."""
    return frozenset(
        fid
        for fid, idx in flow.network.fact_edges.items()
        if flow.flow.get(idx, 0) == 1
    )


def embed_subset(
    kept: Iterable[int], db: Database, w1: Fraction, w2: Fraction
) -> IntegralFlow:
    """The canonical flow that keeps exactly ``kept``, in the k=|kept| network.

    Fan slots fill bottom-up per value; the flow's cost equals the shifted
    objective of the subset, which is what the tests assert.
    """
    kept_ids = sorted(set(kept))
    net = build_network(db, len(kept_ids), w1, w2)
    flow: dict[int, int] = {}
    if kept_ids:
        flow[0] = len(kept_ids)  # the source edge
    a_values = list(dict.fromkeys(f.values[0] for f in db.facts))
    b_values = list(dict.fromkeys(f.values[1] for f in db.facts))
    a_kept = {a: 0 for a in a_values}
    b_kept = {b: 0 for b in b_values}
    for i in kept_ids:
        f = db.fact(i)
        a_kept[f.values[0]] += 1
        b_kept[f.values[1]] += 1
        flow[net.fact_edges[i]] = 1
    for a, group in zip(a_values, net.fan_in_groups):
        for feeder, slot in group[: a_kept[a]]:
            flow[feeder] = 1
            flow[slot] = 1
    for b, group in zip(b_values, net.fan_out_groups):
        for slot, feeder in group[: b_kept[b]]:
            flow[slot] = 1
            flow[feeder] = 1
    total = sum(
        (units * net.edges[idx].cost for idx, units in flow.items()),
        Fraction(0),
    )
    result = IntegralFlow(net, flow, len(kept_ids), total)
    result.validate()
    return result


def _two_key_fdset(schema: Schema, w1: Fraction, w2: Fraction) -> FDSet:
    a, b = _two_columns(schema)
    return FDSet((FD(frozenset({a}), frozenset({b}), w1),
                  FD(frozenset({b}), frozenset({a}), w2)))


def solve_two_key(
    db: Database,
    w1: Fraction,
    w2: Fraction,
    independent_solves: bool = False,
) -> RepairResult:
    """Optimal subset of a two-column database under both key directions.

    The default warm-started pass prices every k in one run: after j
    augmentations the flow is the min-cost flow of value j, which is the
    k=j optimum.  ``independent_solves=True`` instead solves each k's
    network from scratch (differential-testing aid); both modes compare
    the empty subset (k=0, shifted cost 0) alongside k = 1..n.
    """
    delta = _two_key_fdset(db.schema, w1, w2)
    n = len(db)
    if n == 0:
        return RepairResult(frozenset(), cost((), db, delta), "flow-two-key")

    # ties across k are broken toward the largest k: at equal cost, keep
    # more facts rather than delete more
    if independent_solves:
        best_cost: Fraction = Fraction(0)
        best_kept: frozenset[int] = frozenset()
        for k in range(1, n + 1):
            flow = min_cost_max_flow(build_network(db, k, w1, w2))
            if flow.cost <= best_cost:
                best_cost = flow.cost
                best_kept = extract_repair(flow, db)
        kept = best_kept
        shifted_opt = best_cost
    else:
        net = build_network(db, n, w1, w2)
        engine = _SspEngine(net)
        cum = 0
        per_k_cost: list[int] = [0]
        per_k_kept: list[frozenset[int]] = [frozenset()]
        while True:
            pushed = engine.augment_one()
            if pushed is None:
                break
            cum += pushed
            per_k_cost.append(cum)
            per_k_kept.append(
                frozenset(
                    fid
                    for fid, idx in net.fact_edges.items()
                    if engine.flow_on(idx) == 1
                )
            )
        if len(per_k_cost) != n + 1:
            raise AssertionError("expected one augmentation per fact")
        best_k = min(range(n + 1), key=lambda k: (per_k_cost[k], -k))
        kept = per_k_kept[best_k]
        shifted_opt = Fraction(per_k_cost[best_k], engine.scale)

    # the flow's cost must equal the shifted objective of its repair
    recomputed = shifted_cost(kept, db, delta)
    if recomputed != shifted_opt:
        raise AssertionError(
            f"flow cost {shifted_opt} disagrees with shifted objective "
            f"{recomputed}"
        )
    canonical = embed_subset(kept, db, w1, w2)
    if canonical.cost != shifted_opt:
        raise AssertionError("canonical embedding changed the cost")

    breakdown = cost(kept, db, delta)
    if breakdown.total != shifted_opt + db.total_weight:
        raise AssertionError("shift identity failed after solving")
    return RepairResult(frozenset(kept), breakdown, "flow-two-key")


def matching_pair_database(db: Database, delta: FDSet) -> Database:
    """Code each fact's two lhs projections as a two-column database.

    Codes are dense integers by first appearance.  Distinct facts cannot
    share both codes (the two lhs sides together cover every attribute),
    so fact ids carry over unchanged.
    """
    if not is_matching_constraint(delta, db.schema):
        raise RoutingError("the FD set is not a matching constraint")
    phi1, phi2 = delta.fds
    left_attrs = db.schema.ordered(phi1.lhs)
    right_attrs = db.schema.ordered(phi2.lhs)
    left_codes: dict[tuple[str, ...], str] = {}
    right_codes: dict[tuple[str, ...], str] = {}
    rows = []
    for f in db.facts:
        lv = project(db.schema, f, left_attrs)
        rv = project(db.schema, f, right_attrs)
        lc = left_codes.setdefault(lv, str(len(left_codes)))
        rc = right_codes.setdefault(rv, str(len(right_codes)))
        rows.append(((lc, rc), f.weight))
    pair_schema = Schema(
        f"{db.schema.relation_name}__keys", ("left_key", "right_key")
    )
    return Database.from_rows(pair_schema, rows)


def solve_matching(db: Database, delta: FDSet) -> RepairResult:
    """Optimal subset under a matching constraint, via the two-column coding."""
    pair_db = matching_pair_database(db, delta)
    phi1, phi2 = delta.fds
    inner = solve_two_key(pair_db, phi1.weight, phi2.weight)
    breakdown = cost(inner.kept, db, delta)
    if breakdown.total != inner.breakdown.total:
        raise AssertionError(
            "matching reduction changed the cost: "
            f"{inner.breakdown.total} vs {breakdown.total}"
        )
    return RepairResult(inner.kept, breakdown, "flow-matching")


def dump_network(net: FlowNetwork) -> str:
    """One edge per line: ``tail head capacity cost_num/cost_den``.

    Whitespace inside node names is replaced by underscores so each line
    splits into exactly four tokens.
    """
    def name(v: str) -> str:
        return "_".join(v.split())

    lines = [
        f"{name(e.tail)} {name(e.head)} {e.capacity} "
        f"{e.cost.numerator}/{e.cost.denominator}"
        for e in net.edges
    ]
    return "\n".join(lines) + "\n"
