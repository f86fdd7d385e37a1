"""BDD-based bucket elimination for CNF satisfiability.

Separate variable orders for the diagrams and for elimination, plus
pigeonhole generators and scaling experiments.
"""
from .bdd import FALSE, TRUE, BddError, Manager, NodeLimitExceeded, OrderError, VarOrder
from .bucket import (LIMIT, SAT, UNSAT, RunResult, Schedule, TraceEvent, first_var,
                     probe_named_step, run, run_single_order)
from .cnf import Clause, CnfFormula, brute_force_sat, parse_dimacs, restrict_cnf, write_dimacs
from .generators import (BipartiteGraph, and_or_chain, col_order, gphp, php, random_cnf, row_order,
                         theorem2_graph)

__version__ = "0.1.0"
