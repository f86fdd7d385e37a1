"""Scaling experiments on pigeonhole formulas.

Each suite produces one `Row` per ``n`` and a list of `Check` verdicts.
"""
from __future__ import annotations

import csv
import io
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bdd import FALSE, Manager, NodeLimitExceeded
from .bucket import LIMIT, SAT, UNSAT, Schedule, probe_named_step, run, run_single_order
from .cnf import brute_force_sat
from .generators import and_or_chain, col_order, gphp, php, random_cnf, random_order, row_order, theorem2_graph

BASE_COLUMNS = ["suite", "n", "decision", "max_intermediate_size", "peak_nodes", "wall_ms"]
EXTRA_COLUMNS = {
    "theorem2": ["probe_size"],
    "lemma1": ["blockwise_size", "interleaved_size"],
    "oracle-fuzz": ["oracle", "schedules", "agree"],
}

DEFAULT_SEED = 20231
SEED_ENV = "BUCKETBDD_SEED"
FUZZ_SCHEDULES = 5
THEOREM1_MAX_SLOPE = 3.5
THEOREM2_MIN_RATIO = 1.8


@dataclass(frozen=True)
class SuiteConfig:
    default_min: int
    default_max: int
    max_n: int | None
    node_limit: int


SUITES = {
    "theorem1": SuiteConfig(2, 40, 40, 2_000_000),
    "theorem2": SuiteConfig(4, 13, 13, 2_000_000),
    "lemma-col": SuiteConfig(4, 14, 14, 500_000),
    "lemma-row": SuiteConfig(4, 12, 14, 500_000),
    "lemma1": SuiteConfig(2, 16, 16, 2_000_000),
    # n counts random instances here
    "oracle-fuzz": SuiteConfig(1, 500, None, 200_000),
}


@dataclass(frozen=True)
class ExperimentSuite:
    name: str
    n_min: int
    n_max: int
    node_limit: int
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.name not in SUITES:
            raise ValueError(f"unknown suite {self.name!r}; choose from {sorted(SUITES)}")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError(f"need 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}")
        cap = SUITES[self.name].max_n
        if cap is not None and self.n_max > cap:
            raise ValueError(f"suite {self.name} is capped at n={cap}")
        if self.node_limit < 3:
            raise ValueError("node limit must be at least 3")

    @classmethod
    def default(cls, name: str, n_min: int | None = None, n_max: int | None = None,
                node_limit: int | None = None, seed: int | None = None) -> "ExperimentSuite":
        cfg = SUITES.get(name)
        if cfg is None:
            raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
        if seed is None:
            seed = int(os.environ.get(SEED_ENV, DEFAULT_SEED))
        return cls(name,
                   cfg.default_min if n_min is None else n_min,
                   cfg.default_max if n_max is None else n_max,
                   cfg.node_limit if node_limit is None else node_limit,
                   seed)


@dataclass
class Row:
    suite: str
    n: int
    decision: str
    max_intermediate_size: int
    peak_nodes: int
    wall_ms: float
    extra: dict = field(default_factory=dict)

    def values(self) -> list:
        cols = EXTRA_COLUMNS.get(self.suite, [])
        return [self.suite, self.n, self.decision, self.max_intermediate_size,
                self.peak_nodes, f"{self.wall_ms:.1f}"] + [self.extra.get(c, "") for c in cols]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class SuiteReport:
    suite: ExperimentSuite
    rows: list[Row]
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(BASE_COLUMNS + EXTRA_COLUMNS.get(self.suite.name, []))
        for r in self.rows:
            w.writerow(r.values())
        return buf.getvalue()


# ----------------------------------------------------------------------
# one row per n


def _row(suite: str, n: int, result, **extra) -> Row:
    return Row(suite, n, result.decision, result.max_intermediate_size,
               result.peak_allocated_nodes, result.wall_time * 1000, extra)


def theorem1_row(n: int, node_limit: int, seed: int = 0) -> Row:
    f = php(n)
    return _row("theorem1", n, run(f, Schedule(row_order(f), col_order(f)), node_limit))


def theorem2_row(n: int, node_limit: int, seed: int = 0) -> Row:
    f = gphp(theorem2_graph(n))
    r = run(f, Schedule(row_order(f), col_order(f)), node_limit)
    probe = probe_named_step(f, r, (2 * n, n + 1))
    return _row("theorem2", n, r, probe_size="" if probe is None else probe)


def lemma_col_row(n: int, node_limit: int, seed: int = 0) -> Row:
    f = php(n)
    return _row("lemma-col", n, run_single_order(f, col_order(f), node_limit))


def lemma_row_row(n: int, node_limit: int, seed: int = 0) -> Row:
    f = php(n)
    return _row("lemma-row", n, run_single_order(f, row_order(f), node_limit))


def lemma1_row(n: int, node_limit: int, seed: int = 0) -> Row:
    """Conjoin the chain's clauses under both orders and compare sizes.

    ``max_intermediate_size`` is the largest partial conjunction along the
    blockwise fold.
    """
    t0 = time.perf_counter()
    f, blockwise, interleaved = and_or_chain(n)
    m = Manager(blockwise, node_limit)
    d, largest, decision = m.true, 1, SAT
    try:
        for c in f.clauses:
            d = m.apply_and(d, m.clause(c.literals))
            largest = max(largest, m.node_count(d))
        blockwise_size = m.node_count(d)
        decision = SAT if d != FALSE else UNSAT
    except NodeLimitExceeded:
        blockwise_size, decision = "", LIMIT
    mi = Manager(interleaved, node_limit)
    di = mi.conjoin(mi.clause(c.literals) for c in f.clauses)
    wall = (time.perf_counter() - t0) * 1000
    return Row("lemma1", n, decision, largest, m.peak_live, wall,
               {"blockwise_size": blockwise_size, "interleaved_size": mi.node_count(di)})


def fuzz_instance(k: int, seed: int):
    """Random formula number ``k`` of the fuzz suite and its schedules."""
    rng = random.Random(f"{seed}:{k}")
    num_vars = rng.randint(1, 12)
    num_clauses = rng.randint(0, 40)
    max_len = rng.randint(1, 4)
    f = random_cnf(num_vars, num_clauses, max_len, rng.randrange(2**32))
    schedules = [Schedule(random_order(num_vars, rng), random_order(num_vars, rng))
                 for _ in range(FUZZ_SCHEDULES - 1)]
    order = random_order(num_vars, rng)
    schedules.append(Schedule.single(order))
    return f, schedules


def fuzz_row(k: int, node_limit: int, seed: int = DEFAULT_SEED) -> Row:
    t0 = time.perf_counter()
    f, schedules = fuzz_instance(k, seed)
    oracle = SAT if brute_force_sat(f) else UNSAT
    results = [run(f, s, node_limit) for s in schedules]
    agree = all(r.decision == oracle for r in results)
    wall = (time.perf_counter() - t0) * 1000
    return Row("oracle-fuzz", k, results[0].decision,
               max(r.max_intermediate_size for r in results),
               max(r.peak_allocated_nodes for r in results), wall,
               {"oracle": oracle, "schedules": len(results), "agree": int(agree)})


ROW_FUNCTIONS = {
    "theorem1": theorem1_row,
    "theorem2": theorem2_row,
    "lemma-col": lemma_col_row,
    "lemma-row": lemma_row_row,
    "lemma1": lemma1_row,
    "oracle-fuzz": fuzz_row,
}


# ----------------------------------------------------------------------
# verdicts


def loglog_slope(ns, sizes) -> float:
    slope, _ = np.polyfit(np.log(ns), np.log(sizes), 1)
    return float(slope)


def theorem1_checks(rows: list[Row]) -> list[Check]:
    bad = [r.n for r in rows if r.decision != UNSAT]
    checks = [Check("theorem1 all UNSAT", not bad, f"non-UNSAT at n={bad}" if bad else f"{len(rows)} rows")]
    drops = [r.n for prev, r in zip(rows, rows[1:]) if r.max_intermediate_size < prev.max_intermediate_size]
    checks.append(Check("theorem1 sizes monotone", not drops, f"drops at n={drops}" if drops else ""))
    fit = [r for r in rows if 10 <= r.n <= 40 and r.decision == UNSAT]
    if len(fit) >= 2:
        slope = loglog_slope([r.n for r in fit], [r.max_intermediate_size for r in fit])
        checks.append(Check("theorem1 log-log slope", slope <= THEOREM1_MAX_SLOPE,
                            f"slope {slope:.3f} over n={fit[0].n}..{fit[-1].n} (max {THEOREM1_MAX_SLOPE})"))
    else:
        checks.append(Check("theorem1 log-log slope", True, "skipped: fewer than 2 rows in [10,40]"))
    return checks


def theorem2_checks(rows: list[Row]) -> list[Check]:
    last = rows[-1].n
    bad = [r.n for r in rows if not (r.decision == UNSAT or (r.decision == LIMIT and r.n == last))]
    checks = [Check("theorem2 decisions", not bad, f"unexpected decision at n={bad}" if bad else "")]
    probes = {r.n: r.extra.get("probe_size") for r in rows}
    small = [n for n, p in probes.items() if p == "" or p is None or p < 2 ** (n - 1)]
    checks.append(Check("theorem2 probe >= 2^(n-1)", not small,
                        f"below bound at n={small}" if small else
                        ", ".join(f"n={n}:{p}" for n, p in probes.items())))
    ratios = []
    for n, p in probes.items():
        q = probes.get(n - 1)
        if n >= 8 and isinstance(p, int) and isinstance(q, int) and q > 0:
            ratios.append((n, p / q))
    weak = [n for n, ratio in ratios if ratio < THEOREM2_MIN_RATIO]
    checks.append(Check("theorem2 growth ratio >= 1.8 for n >= 8", not weak,
                        ", ".join(f"n={n}:{ratio:.3f}" for n, ratio in ratios) or "no consecutive pairs"))
    return checks


def lemma_checks(name: str, rows: list[Row]) -> list[Check]:
    small = [r.n for r in rows if r.max_intermediate_size < 2 ** r.n]
    return [Check(f"{name} some intermediate >= 2^n", not small,
                  f"below 2^n at n={small}" if small else
                  ", ".join(f"n={r.n}:{r.max_intermediate_size}" for r in rows))]


def lemma1_checks(rows: list[Row]) -> list[Check]:
    small = [r.n for r in rows if r.extra["blockwise_size"] == "" or r.extra["blockwise_size"] < 2 ** r.n]
    wide = [r.n for r in rows if r.extra["interleaved_size"] > 3 * r.n + 2]
    return [Check("lemma1 blockwise >= 2^n", not small, f"below 2^n at n={small}" if small else
                  ", ".join(f"n={r.n}:{r.extra['blockwise_size']}" for r in rows)),
            Check("lemma1 interleaved <= 3n+2", not wide, f"above 3n+2 at n={wide}" if wide else
                  ", ".join(f"n={r.n}:{r.extra['interleaved_size']}" for r in rows))]


def fuzz_checks(rows: list[Row]) -> list[Check]:
    agree = sum(r.extra["agree"] for r in rows)
    sat = sum(r.extra["oracle"] == SAT for r in rows)
    return [Check("oracle-fuzz agreement", agree == len(rows),
                  f"{agree}/{len(rows)} instances x {FUZZ_SCHEDULES} schedules agree ({sat} SAT)")]


def suite_checks(name: str, rows: list[Row]) -> list[Check]:
    if name == "theorem1":
        return theorem1_checks(rows)
    if name == "theorem2":
        return theorem2_checks(rows)
    if name in ("lemma-col", "lemma-row"):
        return lemma_checks(name, rows)
    if name == "lemma1":
        return lemma1_checks(rows)
    return fuzz_checks(rows)


def run_suite(suite: ExperimentSuite, jobs: int = 1, progress=None) -> SuiteReport:
    """Run every row of ``suite``; rows come back in ascending ``n``.

    With ``jobs > 1`` rows run in worker processes, one manager each.
    """
    fn = ROW_FUNCTIONS[suite.name]
    ns = range(suite.n_min, suite.n_max + 1)
    rows: list[Row] = []
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            futures = [pool.submit(fn, n, suite.node_limit, suite.seed) for n in ns]
            for fut in futures:
                rows.append(fut.result())
                if progress:
                    progress(rows[-1])
    else:
        for n in ns:
            rows.append(fn(n, suite.node_limit, suite.seed))
            if progress:
                progress(rows[-1])
    return SuiteReport(suite, rows, suite_checks(suite.name, rows))

