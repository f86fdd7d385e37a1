"""CNF formulas, DIMACS I/O, restriction and a brute-force oracle.

Literals are signed DIMACS integers throughout.
"""
from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from .bdd import Manager

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_VARS = 24


class DimacsError(ValueError):
    pass


@dataclass(frozen=True)
class Clause:
    """Disjunction of literals; duplicates are dropped, order is kept."""

    literals: tuple[int, ...]
    tautological: bool = field(init=False, compare=False)

    def __init__(self, literals: Iterable[int]):
        lits = []
        seen = set()
        for lit in literals:
            lit = int(lit)
            if lit == 0:
                raise ValueError("0 is not a literal")
            if lit not in seen:
                seen.add(lit)
                lits.append(lit)
        object.__setattr__(self, "literals", tuple(lits))
        object.__setattr__(self, "tautological", any(-lit in seen for lit in lits))

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self):
        return iter(self.literals)

    @property
    def variables(self) -> set[int]:
        return {abs(lit) for lit in self.literals}


@dataclass(frozen=True)
class CnfFormula:
    """Clauses over variables ``1..num_vars``.

    ``name_map`` optionally gives each variable its matrix coordinate
    ``(row, column)``.
    """

    num_vars: int
    clauses: tuple[Clause, ...]
    name_map: Mapping[int, tuple[int, int]] | None = None
    comments: tuple[str, ...] = ()

    def __post_init__(self):
        clauses = tuple(c if isinstance(c, Clause) else Clause(c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for c in clauses:
            for lit in c:
                if abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} exceeds num_vars={self.num_vars}")
        if self.name_map is not None:
            nm = {int(v): (int(i), int(j)) for v, (i, j) in self.name_map.items()}
            if len(set(nm.values())) != len(nm):
                raise ValueError("name_map is not injective")
            object.__setattr__(self, "name_map", nm)

    def __eq__(self, other) -> bool:
        # comments are not part of the structure
        if not isinstance(other, CnfFormula):
            return NotImplemented
        return (self.num_vars == other.num_vars and self.clauses == other.clauses
                and (self.name_map or None) == (other.name_map or None))

    def __hash__(self):
        return hash((self.num_vars, self.clauses))

    @property
    def has_empty_clause(self) -> bool:
        return any(len(c) == 0 for c in self.clauses)

    def var_of(self, i: int, j: int) -> int:
        """Variable for matrix coordinate ``(i, j)``."""
        if self.name_map is None:
            raise KeyError("formula has no name map")
        for v, ij in self.name_map.items():
            if ij == (i, j):
                return v
        raise KeyError(f"no variable p_{i},{j}")

    def clause_lists(self) -> list[list[int]]:
        return [list(c.literals) for c in self.clauses]


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF text.

    ``c map V I J`` comment lines, as written by `write_dimacs`, restore the
    matrix name map.
    """
    num_vars = num_clauses = None
    clauses: list[Clause] = []
    comments: list[str] = []
    name_map: dict[int, tuple[int, int]] = {}
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 5 and parts[1] == "map":
                try:
                    name_map[int(parts[2])] = (int(parts[3]), int(parts[4]))
                    continue
                except ValueError:
                    pass
            comments.append(line[1:].strip())
            continue
        if line.startswith("%"):
            # SATLIB end marker
            break
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise DimacsError(f"line {lineno}: second header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            if num_vars < 0 or num_clauses < 0:
                raise DimacsError(f"line {lineno}: negative counts in header")
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(Clause(current))
                current = []
            elif abs(lit) > num_vars:
                raise DimacsError(f"line {lineno}: literal {lit} exceeds {num_vars} variables")
            else:
                current.append(lit)
    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != num_clauses:
        logger.warning("header announces %d clauses, found %d", num_clauses, len(clauses))
    for c in clauses:
        if c.tautological:
            logger.info("tautological clause %s", c.literals)
    return CnfFormula(num_vars, tuple(clauses), name_map or None, tuple(comments))


def write_dimacs(f: CnfFormula) -> str:
    out = [f"c {line}" if line else "c" for line in f.comments]
    if f.name_map:
        for v in sorted(f.name_map):
            i, j = f.name_map[v]
            out.append(f"c map {v} {i} {j}")
    out.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    for c in f.clauses:
        out.append(" ".join(map(str, c.literals + (0,))))
    return "\n".join(out) + "\n"


def read_dimacs(path) -> CnfFormula:
    with open(path) as fh:
        return parse_dimacs(fh.read())


def restrict_cnf(f: CnfFormula, assignment: Mapping[int, object]) -> CnfFormula:
    """Drop satisfied clauses and falsified literals.

    Variable numbering, ``num_vars`` and the name map are kept.
    """
    for v in assignment:
        if not 1 <= v <= f.num_vars:
            raise ValueError(f"variable {v} outside 1..{f.num_vars}")
    out = []
    for c in f.clauses:
        kept = []
        for lit in c:
            val = assignment.get(abs(lit))
            if val is None:
                kept.append(lit)
            elif bool(val) == (lit > 0):
                break
        else:
            out.append(Clause(kept))
    return CnfFormula(f.num_vars, tuple(out), f.name_map, f.comments)


def clause_to_bdd(m: Manager, c: Clause | Iterable[int]) -> int:
    lits = c.literals if isinstance(c, Clause) else tuple(c)
    return m.clause(lits)


def brute_force_sat(f: CnfFormula) -> int:
    """1 iff some total assignment satisfies every clause.

    Enumerates all ``2**num_vars`` assignments in blocks; bit ``v-1`` of the
    assignment index is the value of variable ``v``.
    """
    n = f.num_vars
    if n > BRUTE_FORCE_MAX_VARS:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_VARS} variables, got {n}")
    if f.has_empty_clause:
        return 0
    total = 1 << n
    block = min(total, 1 << 20)
    for start in range(0, total, block):
        idx = np.arange(start, start + block, dtype=np.int64)
        sat = np.ones(block, dtype=bool)
        for c in f.clauses:
            csat = np.zeros(block, dtype=bool)
            for lit in c:
                bit = ((idx >> (abs(lit) - 1)) & 1).astype(bool)
                csat |= bit if lit > 0 else ~bit
            sat &= csat
            if not sat.any():
                break
        if sat.any():
            return 1
    return 0
