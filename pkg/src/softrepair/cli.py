"""Command-line surface: ingest, classify, solve, benchmark.

Usage:
    softrepair repair table.csv --fds fds.txt [--solver auto|dp|flow|approx|oracle]
                                [--report out.json] [--dump-network net.txt]
    softrepair classify fds.txt --schema Flight,Airline,Date
    softrepair bench config.json [--out results.csv]

The machine-readable JSON report goes to stdout, a short human summary to
stderr.  Exit codes are a stable contract: 0 success, 1 input error
(ingestion or parsing), 2 routing error (an explicit solver override that
does not apply to the input).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .bench import result_fields, run_benchmark
from .classify import RouteKind, SolverRoute, classify
from .cost import CostBreakdown, RepairResult
from .flow import build_network, dump_network, matching_pair_database
from .model import (
    Database,
    FD,
    FDSet,
    FDSpecError,
    Fact,
    IngestionError,
    InstanceTooLargeError,
    ReductionError,
    RoutingError,
    Schema,
    SchemaMismatchError,
    SoftRepairError,
    as_weight,
    format_weight,
)
from .router import SOLVER_CHOICES, route_and_solve

WEIGHT_COLUMN = "__weight"


@dataclass(frozen=True)
class RepairReport:
    """Everything a repair run produced, ready for JSON serialization."""

    route: SolverRoute
    kept: tuple[Fact, ...]
    deleted: tuple[Fact, ...]
    cost: CostBreakdown
    solver: str
    wall_time_ms: float
    ratio_bound: int
    schema: Schema
    delta: FDSet

    def to_dict(self) -> dict:
        return {
            "route": {
                "kind": self.route.kind.value,
                "hardness": self.route.hardness.value,
                "elimination_order": (
                    list(self.route.elimination_order)
                    if self.route.elimination_order is not None
                    else None
                ),
            },
            "solver": self.solver,
            "ratio_bound": self.ratio_bound,
            "kept": [_fact_dict(f) for f in self.kept],
            "deleted": [_fact_dict(f) for f in self.deleted],
            "cost": {
                "deletion": format_weight(self.cost.deletion_cost),
                "violations": [
                    {
                        "fd": phi.describe(self.schema),
                        "cost": format_weight(self.cost.violation_cost_per_fd[phi]),
                    }
                    for phi in self.delta
                ],
                "total": format_weight(self.cost.total),
            },
            "wall_time_ms": round(self.wall_time_ms, 3),
        }


def _fact_dict(f: Fact) -> dict:
    return {
        "id": f.fact_id,
        "values": list(f.values),
        "weight": format_weight(f.weight),
    }


def load_database(
    table_path: str | Path, default_weight: Fraction = Fraction(1)
) -> Database:
    """Read a CSV table: header row = attributes, optional __weight column.

    Weights parse exactly from "num/den" or decimal strings; missing
    weight column means ``default_weight`` per fact.  Ragged rows,
    duplicate tuples and negative weights raise :class:`IngestionError`
    with the offending row number (header is row 1).
    """
    path = Path(table_path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise IngestionError(f"{path}: empty file, expected a header row")
    weight_col = header.index(WEIGHT_COLUMN) if WEIGHT_COLUMN in header else None
    attrs = [h for h in header if h != WEIGHT_COLUMN]
    try:
        schema = Schema(path.stem, tuple(attrs))
    except SchemaMismatchError as exc:
        raise IngestionError(f"{path}: bad header: {exc}") from None

    rows = []
    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise IngestionError(
                f"{path}: row {row_no}: expected {len(header)} fields, "
                f"got {len(row)}"
            )
        if weight_col is None:
            values, weight = tuple(row), default_weight
        else:
            values = tuple(v for i, v in enumerate(row) if i != weight_col)
            try:
                weight = as_weight(row[weight_col])
            except (ValueError, TypeError) as exc:
                raise IngestionError(f"{path}: row {row_no}: {exc}") from None
        rows.append((values, weight))
    try:
        return Database.from_rows(schema, rows)
    except IngestionError as exc:
        raise IngestionError(f"{path}: {exc}") from None


def parse_fd_spec(text: str, schema: Schema) -> FDSet:
    """Parse FD lines of the form ``LHS -> RHS @ WEIGHT``.

    LHS and RHS are comma-separated attribute names; an empty LHS states a
    consensus constraint.  ``#`` starts a comment.  Unknown attributes and
    malformed weights raise :class:`FDSpecError` with the line number.
    """
    fds: list[FD] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise FDSpecError(f"line {line_no}: expected 'LHS -> RHS @ WEIGHT'")
        lhs_text, rest = line.split("->", 1)
        if "@" not in rest:
            raise FDSpecError(f"line {line_no}: missing '@ WEIGHT'")
        rhs_text, weight_text = rest.rsplit("@", 1)

        def parse_attrs(chunk: str, side: str) -> frozenset[str]:
            names = [a.strip() for a in chunk.split(",") if a.strip()]
            unknown = [a for a in names if a not in schema.attributes]
            if unknown:
                raise FDSpecError(
                    f"line {line_no}: unknown {side} attribute(s) {unknown}"
                )
            return frozenset(names)

        try:
            weight = as_weight(weight_text.strip())
        except (ValueError, TypeError) as exc:
            raise FDSpecError(f"line {line_no}: bad weight: {exc}") from None
        fds.append(FD(parse_attrs(lhs_text, "lhs"), parse_attrs(rhs_text, "rhs"), weight))
    try:
        return FDSet(tuple(fds))
    except FDSpecError as exc:
        raise FDSpecError(f"duplicate FD in spec: {exc}") from None


def run_repair(db: Database, delta: FDSet, solver: str = "auto") -> RepairReport:
    """Classify and solve; wall time covers routing plus solving."""
    start = time.perf_counter()
    route, result = route_and_solve(db, delta, solver)
    elapsed_ms = (time.perf_counter() - start) * 1000
    kept = tuple(f for f in db.facts if f.fact_id in result.kept)
    deleted = tuple(f for f in db.facts if f.fact_id not in result.kept)
    return RepairReport(
        route=route,
        kept=kept,
        deleted=deleted,
        cost=result.breakdown,
        solver=result.solver,
        wall_time_ms=elapsed_ms,
        ratio_bound=result.ratio_bound,
        schema=db.schema,
        delta=delta,
    )


def _summary(report: RepairReport) -> str:
    return (
        f"route={report.route.kind.value} hardness={report.route.hardness.value} "
        f"solver={report.solver} kept={len(report.kept)} "
        f"deleted={len(report.deleted)} cost={format_weight(report.cost.total)} "
        f"bound={report.ratio_bound}x in {report.wall_time_ms:.2f} ms"
    )


def _cmd_repair(args: argparse.Namespace) -> int:
    db = load_database(args.table, as_weight(args.default_weight))
    delta = parse_fd_spec(Path(args.fds).read_text(), db.schema)
    report = run_repair(db, delta, args.solver)
    payload = json.dumps(report.to_dict(), indent=2)
    print(payload)
    print(_summary(report), file=sys.stderr)
    if args.report:
        Path(args.report).write_text(payload + "\n")
    if args.dump_network:
        if report.route.kind is not RouteKind.MATCHING:
            print(
                "note: --dump-network applies only to matching routes; skipped",
                file=sys.stderr,
            )
        else:
            phi1, phi2 = delta.fds
            net = build_network(
                matching_pair_database(db, delta), len(db), phi1.weight, phi2.weight
            )
            Path(args.dump_network).write_text(dump_network(net))
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    attrs = tuple(a.strip() for a in args.schema.split(",") if a.strip())
    schema = Schema("R", attrs)
    delta = parse_fd_spec(Path(args.fds).read_text(), schema)
    route = classify(delta, schema)
    print(
        json.dumps(
            {
                "kind": route.kind.value,
                "hardness": route.hardness.value,
                "elimination_order": (
                    list(route.elimination_order)
                    if route.elimination_order is not None
                    else None
                ),
            },
            indent=2,
        )
    )
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestionError(f"cannot load config {args.config}: {exc}") from None
    try:
        rows = run_benchmark(config)
    except ValueError as exc:
        raise IngestionError(str(exc)) from None
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=result_fields())
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    print(f"{len(rows)} benchmark rows", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softrepair",
        description=(
            "Minimum-cost soft repairs of a weighted relation under "
            "weighted functional dependencies"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_repair = sub.add_parser("repair", help="solve one table against an FD spec")
    p_repair.add_argument("table", help="CSV table; header row names the attributes")
    p_repair.add_argument("--fds", required=True, help="FD spec file")
    p_repair.add_argument(
        "--solver", choices=SOLVER_CHOICES, default="auto",
        help="override the routed solver (errors if inapplicable)",
    )
    p_repair.add_argument("--report", help="also write the JSON report here")
    p_repair.add_argument(
        "--default-weight", default="1",
        help="fact weight when the table has no __weight column",
    )
    p_repair.add_argument(
        "--dump-network", help="write the flow network (matching routes only)"
    )
    p_repair.set_defaults(func=_cmd_repair)

    p_classify = sub.add_parser("classify", help="route an FD set without data")
    p_classify.add_argument("fds", help="FD spec file")
    p_classify.add_argument(
        "--schema", required=True, help="comma-separated attribute names"
    )
    p_classify.set_defaults(func=_cmd_classify)

    p_bench = sub.add_parser("bench", help="run the random-instance benchmark")
    p_bench.add_argument("config", help="JSON benchmark configuration")
    p_bench.add_argument("--out", help="write CSV here instead of stdout")
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RoutingError, ReductionError, InstanceTooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SoftRepairError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
