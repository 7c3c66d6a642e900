"""Random-instance generation and the benchmark harness.

Instances are reproducible from a seed: attribute values are drawn
uniformly from a small alphabet (3 values per column by default, which
forces conflicts at modest sizes), weights are random small-denominator
rationals in a configured range, and duplicate tuples are redrawn.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Iterable, Sequence

from .model import Database, FDSet, Schema, as_weight, fd
from .oracle import brute_force_optimal
from .router import route_and_solve

SEED_ENV_VAR = "SOFTREPAIR_SEED"


@dataclass(frozen=True)
class BenchTemplate:
    """A fixed FD-set shape; weights are drawn per instance."""

    name: str
    attributes: tuple[str, ...]
    fds: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]


TEMPLATES: dict[str, BenchTemplate] = {
    t.name: t
    for t in [
        BenchTemplate("single_fd", ("A", "B", "C"), ((("A",), ("B",)),)),
        BenchTemplate("single_fd_wide", ("A", "B", "C"), ((("A",), ("B", "C")),)),
        BenchTemplate("single_key", ("A", "B", "C"), ((("A", "B"), ("C",)),)),
        BenchTemplate("consensus", ("A", "B"), (((), ("B",)),)),
        BenchTemplate(
            "lc_pair", ("A", "B", "C"), ((("A",), ("B",)), (("A", "B"), ("C",)))
        ),
        BenchTemplate("two_key", ("A", "B"), ((("A",), ("B",)), (("B",), ("A",)))),
        BenchTemplate(
            "matching_trio",
            ("A", "B", "C"),
            ((("A", "B"), ("C",)), (("C", "B"), ("A",))),
        ),
        BenchTemplate("chain", ("A", "B", "C"), ((("A",), ("B",)), (("B",), ("C",)))),
        BenchTemplate(
            "hard_triple",
            ("A", "B", "C"),
            ((("A",), ("B",)), (("B",), ("A",)), (("B",), ("C",))),
        ),
    ]
}


def random_weight(rng: Random, low: Fraction, high: Fraction) -> Fraction:
    """A rational in [low, high] with denominator at most 4."""
    q = rng.randint(1, 4)
    lo = -(-low.numerator * q // low.denominator)  # ceil(low * q)
    hi = high.numerator * q // high.denominator  # floor(high * q)
    return Fraction(rng.randint(lo, hi), q)


def random_instance(
    template: BenchTemplate,
    n: int,
    seed: int,
    values_per_column: int = 3,
    weight_range: tuple[Fraction, Fraction] = (Fraction(0), Fraction(4)),
) -> tuple[Database, FDSet]:
    """A seeded random database and weighted FD set for one template."""
    rng = Random(seed)
    arity = len(template.attributes)
    if n > values_per_column**arity:
        raise ValueError(
            f"cannot draw {n} distinct tuples from "
            f"{values_per_column}^{arity} combinations"
        )
    alphabet = [f"v{i}" for i in range(values_per_column)]
    schema = Schema(f"bench_{template.name}", template.attributes)
    seen: set[tuple[str, ...]] = set()
    rows = []
    while len(rows) < n:
        values = tuple(rng.choice(alphabet) for _ in range(arity))
        if values in seen:
            continue  # duplicates would be rejected at ingestion
        seen.add(values)
        rows.append((values, random_weight(rng, *weight_range)))
    db = Database.from_rows(schema, rows)
    delta = FDSet(
        tuple(
            fd(lhs, rhs, random_weight(rng, *weight_range))
            for lhs, rhs in template.fds
        )
    )
    return db, delta


DEFAULT_CONFIG = {
    "templates": "all",
    "sizes": [6],
    "seeds": 10,
    "base_seed": 0,
    "values_per_column": 3,
    "weight_range": ["0", "4"],
    "solvers": ["auto"],
    "oracle_limit": 12,
    "jobs": 1,
}

_RESULT_FIELDS = (
    "template",
    "n",
    "seed",
    "solver",
    "cost",
    "oracle_cost",
    "ratio",
    "time_ms",
)


def _normalize_config(config: dict) -> dict:
    cfg = dict(DEFAULT_CONFIG)
    unknown = set(config) - set(cfg)
    if unknown:
        raise ValueError(f"unknown benchmark config keys: {sorted(unknown)}")
    cfg.update(config)
    if cfg["templates"] == "all":
        cfg["templates"] = sorted(TEMPLATES)
    missing = [t for t in cfg["templates"] if t not in TEMPLATES]
    if missing:
        raise ValueError(
            f"unknown templates {missing}; known: {sorted(TEMPLATES)}"
        )
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        cfg["base_seed"] = int(env_seed)
    if isinstance(cfg["seeds"], int):
        base = int(cfg["base_seed"])
        cfg["seeds"] = list(range(base, base + cfg["seeds"]))
    lo, hi = cfg["weight_range"]
    cfg["weight_range"] = (as_weight(lo), as_weight(hi))
    return cfg


def _run_one(task: tuple) -> dict:
    template_name, n, seed, solver, values_per_column, weight_range, oracle_limit = task
    db, delta = random_instance(
        TEMPLATES[template_name], n, seed, values_per_column, weight_range
    )
    start = time.perf_counter()
    _, result = route_and_solve(db, delta, solver)
    elapsed_ms = (time.perf_counter() - start) * 1000
    row = {
        "template": template_name,
        "n": n,
        "seed": seed,
        "solver": result.solver,
        "cost": str(result.total_cost),
        "oracle_cost": "",
        "ratio": "",
        "time_ms": f"{elapsed_ms:.3f}",
    }
    if n <= oracle_limit:
        best = brute_force_optimal(db, delta, limit=oracle_limit).best_cost
        row["oracle_cost"] = str(best)
        if best > 0:
            row["ratio"] = str(result.total_cost / best)
        else:
            row["ratio"] = "1" if result.total_cost == 0 else "inf"
    return row


def run_benchmark(config: dict) -> list[dict]:
    """Run every (template, size, seed, solver) combination; return rows.

    Rows come back in enumeration order regardless of the worker count.
    """
    cfg = _normalize_config(config)
    tasks = [
        (
            name,
            n,
            seed,
            solver,
            cfg["values_per_column"],
            cfg["weight_range"],
            cfg["oracle_limit"],
        )
        for name in cfg["templates"]
        for n in cfg["sizes"]
        for seed in cfg["seeds"]
        for solver in cfg["solvers"]
    ]
    jobs = int(cfg["jobs"])
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, tasks))
    return [_run_one(t) for t in tasks]


def result_fields() -> tuple[str, ...]:
    return _RESULT_FIELDS
