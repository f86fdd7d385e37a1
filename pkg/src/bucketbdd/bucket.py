"""BDD-based bucket elimination with separate BDD and elimination orders.

Every BDD is built under ``Schedule.bdd_order``. Buckets are keyed by the
first variable of each BDD in ``Schedule.elim_order``; buckets are then
processed along the elimination order by conjoining their contents and
existentially quantifying the owner.
"""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

from .bdd import FALSE, TRUE, Manager, NodeLimitExceeded, VarOrder
from .cnf import CnfFormula

SAT = "SAT"
UNSAT = "UNSAT"
LIMIT = "LIMIT"

CONJOIN = "conjoin"
QUANTIFY = "quantify"

TRACE_HEADER = ["step", "phase", "var_i", "var_j", "var_id", "operand_sizes",
                "result_size", "live_nodes", "apply_calls"]


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class Schedule:
    bdd_order: VarOrder
    elim_order: VarOrder

    def __post_init__(self):
        if set(self.bdd_order.sequence) != set(self.elim_order.sequence):
            raise ScheduleError("BDD and elimination orders range over different variables")

    @classmethod
    def single(cls, order: VarOrder) -> "Schedule":
        return cls(order, order)


@dataclass(frozen=True)
class TraceEvent:
    step: int
    phase: str
    var: int
    operand_sizes: tuple[int, ...]
    result_size: int
    live_nodes: int
    apply_calls: int


@dataclass
class RunResult:
    decision: str
    trace: list[TraceEvent] = field(default_factory=list)
    wall_time: float = 0.0
    peak_allocated_nodes: int = 0
    total_allocated_nodes: int = 0

    @property
    def max_intermediate_size(self) -> int:
        return max((e.result_size for e in self.trace), default=0)

    @property
    def exit_code(self) -> int:
        return {SAT: 10, UNSAT: 20, LIMIT: 30}[self.decision]


def first_var(m: Manager, f: int, elim_order: VarOrder) -> int | None:
    """Support variable of ``f`` that comes first in ``elim_order``."""
    support = m.support(f)
    if not support:
        return None
    pos = elim_order.position
    return min(support, key=pos.__getitem__)


class BucketEliminator:
    """One run of bucket elimination on one formula.

    ``early_exit`` stops at the first 0-valued conjunction; switching it off
    only lengthens the trace. ``check`` asserts the bucket invariants and
    the engine invariants after every step (slow). ``gc_every`` sweeps dead
    nodes after every quantification; otherwise a sweep happens once the
    arena has at least doubled since the previous one. ``observer`` is
    called as ``observer(event, manager, bdd)`` after every step.
    """

    def __init__(self, formula: CnfFormula, schedule: Schedule, node_limit: int | None = None,
                 *, early_exit: bool = True, check: bool = False, gc_every: bool = False,
                 conjoin_order: str = "insertion", gc_min: int = 50_000, observer=None):
        expected = set(range(1, formula.num_vars + 1))
        if set(schedule.bdd_order.sequence) != expected:
            raise ScheduleError(f"schedule must cover exactly the variables 1..{formula.num_vars}")
        if conjoin_order not in ("insertion", "smallest-first"):
            raise ValueError(f"unknown conjoin order {conjoin_order!r}")
        self.formula = formula
        self.schedule = schedule
        self.node_limit = node_limit
        self.early_exit = early_exit
        self.check = check
        self.gc_every = gc_every
        self.conjoin_order = conjoin_order
        self.gc_min = gc_min
        self.observer = observer
        self.manager: Manager | None = None
        self.trace: list[TraceEvent] = []
        self.buckets: dict[int, list[int]] = {}

    def _event(self, phase, var, operands, result):
        m = self.manager
        event = TraceEvent(len(self.trace), phase, var, tuple(operands),
                           m.node_count(result), m.live_nodes, m.apply_calls)
        self.trace.append(event)
        if self.observer is not None:
            self.observer(event, m, result)

    def _place(self, f: int, after: int | None = None) -> None:
        y = first_var(self.manager, f, self.schedule.elim_order)
        if self.check and after is not None:
            pos = self.schedule.elim_order.position
            assert pos[y] > pos[after], "quantification result landed in an earlier bucket"
        self.buckets[y].append(f)

    def _check_buckets(self, done: set[int]) -> None:
        m = self.manager
        pos = self.schedule.elim_order.position
        for owner, contents in self.buckets.items():
            if owner in done:
                continue
            for f in contents:
                sup = m.support(f)
                assert owner in sup, f"bucket {owner} holds a BDD not depending on it"
                assert all(pos[v] >= pos[owner] for v in sup), f"bucket {owner} holds an earlier variable"
                assert not (sup & done), "a quantified variable survived"
        m.check_invariants(f for c in self.buckets.values() for f in c)

    def run(self) -> RunResult:
        t0 = time.perf_counter()
        if self.formula.has_empty_clause:
            return RunResult(UNSAT, [], time.perf_counter() - t0)
        m = self.manager = Manager(self.schedule.bdd_order, self.node_limit)
        try:
            decision = self._eliminate()
        except NodeLimitExceeded:
            decision = LIMIT
        return RunResult(decision, self.trace, time.perf_counter() - t0,
                         m.peak_live, m.total_allocated)

    def _eliminate(self) -> str:
        m = self.manager
        elim = self.schedule.elim_order
        self.buckets = {v: [] for v in elim.sequence}
        for c in self.formula.clauses:
            f = m.clause(c.literals)
            if f != TRUE:
                self._place(f)
        done: set[int] = set()
        refuted = False
        last_sweep = m.live_nodes
        for x in elim.sequence:
            contents = self.buckets[x]
            if not contents:
                event = TraceEvent(len(self.trace), QUANTIFY, x, (), 1, m.live_nodes, m.apply_calls)
                self.trace.append(event)
                if self.observer is not None:
                    self.observer(event, m, TRUE)
                done.add(x)
                continue
            if self.conjoin_order == "smallest-first":
                contents.sort(key=m.node_count)
            d = contents[0]
            if len(contents) == 1:
                self._event(CONJOIN, x, [m.node_count(d)], d)
            for g in contents[1:]:
                sizes = [m.node_count(d), m.node_count(g)]
                d = m.apply_and(d, g)
                self._event(CONJOIN, x, sizes, d)
                if d == FALSE and self.early_exit:
                    return UNSAT
            if d == FALSE:
                refuted = True
            self.buckets[x] = []
            done.add(x)
            q = m.exists(d, x)
            self._event(QUANTIFY, x, [m.node_count(d)], q)
            if q != TRUE and q != FALSE:
                self._place(q, after=x)
            if self.gc_every or m.live_nodes >= max(self.gc_min, 2 * last_sweep):
                m.clear_dead(f for c in self.buckets.values() for f in c)
                last_sweep = m.live_nodes
            if self.check:
                self._check_buckets(done)
        return UNSAT if refuted else SAT


def run(formula: CnfFormula, schedule: Schedule, node_limit: int | None = None, **kwargs) -> RunResult:
    return BucketEliminator(formula, schedule, node_limit, **kwargs).run()


def run_single_order(formula: CnfFormula, order: VarOrder, node_limit: int | None = None,
                     **kwargs) -> RunResult:
    return run(formula, Schedule.single(order), node_limit, **kwargs)


def probe_named_step(formula: CnfFormula, result: RunResult, target: tuple[int, int]) -> int | None:
    """Size of the last conjunction built in the bucket of ``p_{i,j}``.

    None when the run stopped before reaching that bucket.
    """
    v = formula.var_of(*target)
    size = None
    for e in result.trace:
        if e.var == v and e.phase == CONJOIN:
            size = e.result_size
    return size


def trace_csv(result: RunResult, formula: CnfFormula | None = None) -> str:
    names = (formula.name_map if formula is not None else None) or {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for e in result.trace:
        i, j = names.get(e.var, ("", ""))
        w.writerow([e.step, e.phase, i, j, e.var, ";".join(map(str, e.operand_sizes)),
                    e.result_size, e.live_nodes, e.apply_calls])
    return buf.getvalue()
