"""Command line front end: ``bucketbdd solve|generate|experiment``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bdd import BddError, VarOrder
from .bucket import LIMIT, SAT, UNSAT, Schedule, ScheduleError, run, trace_csv
from .cnf import CnfFormula, DimacsError, read_dimacs, write_dimacs
from .experiments import SUITES, ExperimentSuite, run_suite
from .generators import (OrderSpec, col_order, gphp, php, read_graph, row_order, theorem2_graph,
                         write_order)

EXIT_SAT, EXIT_UNSAT, EXIT_LIMIT, EXIT_ERROR = 10, 20, 30, 1
STATUS = {SAT: "s SATISFIABLE", UNSAT: "s UNSATISFIABLE", LIMIT: "s UNKNOWN"}

log = logging.getLogger("bucketbdd")


class UsageError(Exception):
    pass


def _load_formula(args) -> CnfFormula:
    if args.cnf:
        return read_dimacs(args.cnf)
    if args.php is not None:
        return php(args.php)
    if args.gphp:
        return gphp(read_graph(args.gphp))
    return gphp(theorem2_graph(args.gphp_t2))


def _order(token: str | None, f: CnfFormula) -> VarOrder:
    if token is None:
        return VarOrder(range(1, f.num_vars + 1))
    spec = OrderSpec.parse(token)
    if spec.tag in ("row", "col") and not f.name_map:
        raise UsageError(f"order '{token}' needs a matrix formula; pass an order file instead")
    order = spec.resolve(f)
    if len(order) != f.num_vars:
        raise UsageError(f"order has {len(order)} variables, formula has {f.num_vars}")
    return order


def _schedule(args, f: CnfFormula) -> Schedule:
    bdd_tok, elim_tok = args.bdd_order, args.elim_order
    if f.name_map:
        # matrix formulas default to row-wise BDDs, column-wise elimination
        bdd_tok = bdd_tok or "row"
        elim_tok = elim_tok or "col"
    if args.single_order:
        order = _order(args.bdd_order or args.elim_order or bdd_tok, f)
        return Schedule.single(order)
    return Schedule(_order(bdd_tok, f), _order(elim_tok, f))


def cmd_solve(args) -> int:
    f = _load_formula(args)
    schedule = _schedule(args, f)
    result = run(f, schedule, args.node_limit, conjoin_order=args.conjoin_order,
                 gc_every=args.gc_every)
    print(STATUS[result.decision])
    print(f"c variables {f.num_vars}")
    print(f"c clauses {len(f.clauses)}")
    print(f"c max_intermediate_size {result.max_intermediate_size}")
    print(f"c peak_nodes {result.peak_allocated_nodes}")
    print(f"c total_allocated {result.total_allocated_nodes}")
    print(f"c steps {len(result.trace)}")
    print(f"c wall_time {result.wall_time:.3f}")
    if args.trace:
        Path(args.trace).write_text(trace_csv(result, f))
    return result.exit_code


def cmd_generate(args) -> int:
    if args.php is not None:
        f = php(args.php)
    elif args.gphp_t2 is not None:
        f = gphp(theorem2_graph(args.gphp_t2))
    else:
        f = gphp(read_graph(args.graph))
    Path(args.out).write_text(write_dimacs(f))
    if args.order_out_row:
        write_order(row_order(f), args.order_out_row)
    if args.order_out_col:
        write_order(col_order(f), args.order_out_col)
    print(f"c wrote {args.out}: {f.num_vars} variables, {len(f.clauses)} clauses")
    return 0


def cmd_experiment(args) -> int:
    suite = ExperimentSuite.default(args.suite, args.n_min, args.n_max, args.node_limit, args.seed)

    def progress(row):
        log.info("%s n=%d %s max=%d (%.0f ms)", row.suite, row.n, row.decision,
                 row.max_intermediate_size, row.wall_ms)

    report = run_suite(suite, jobs=args.jobs, progress=progress)
    text = report.csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    for check in report.checks:
        print(check.line())
    print("verdict", "PASS" if report.passed else "FAIL")
    return 0 if report.passed else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bucketbdd", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide a formula by bucket elimination")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--cnf", metavar="FILE")
    src.add_argument("--php", type=int, metavar="N")
    src.add_argument("--gphp", metavar="FILE", help="bipartite graph file")
    src.add_argument("--gphp-t2", type=int, metavar="N", help="the exponential G-PHP family")
    p.add_argument("--bdd-order", metavar="row|col|FILE")
    p.add_argument("--elim-order", metavar="row|col|FILE")
    p.add_argument("--single-order", action="store_true",
                   help="use one order for BDDs and elimination")
    p.add_argument("--node-limit", type=int, metavar="M")
    p.add_argument("--trace", metavar="FILE", help="write the per-step trace as CSV")
    p.add_argument("--conjoin-order", choices=["insertion", "smallest-first"], default="insertion")
    p.add_argument("--gc-every", action="store_true", help="sweep dead nodes after every quantification")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write pigeonhole formulas and orders")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--php", type=int, metavar="N")
    src.add_argument("--gphp-t2", type=int, metavar="N")
    src.add_argument("--graph", metavar="FILE")
    p.add_argument("--out", required=True, metavar="FILE")
    p.add_argument("--order-out-row", metavar="FILE")
    p.add_argument("--order-out-col", metavar="FILE")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("experiment", help="run a scaling suite and print CSV plus a verdict")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--seed", type=int, help="fuzz seed (default: $BUCKETBDD_SEED or built-in)")
    p.add_argument("--out", metavar="FILE", help="CSV destination (default stdout)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, UsageError, BddError, DimacsError, ScheduleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
