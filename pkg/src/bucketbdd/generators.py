"""Pigeonhole formula families, their bipartite graphs and variable orders."""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .bdd import VarOrder
from .cnf import BRUTE_FORCE_MAX_VARS, Clause, CnfFormula


@dataclass(frozen=True)
class BipartiteGraph:
    a_size: int
    b_size: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not (1 <= i <= self.a_size and 1 <= j <= self.b_size):
                raise ValueError(f"edge ({i},{j}) outside [{self.a_size}]x[{self.b_size}]")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def complete(cls, a_size: int, b_size: int) -> "BipartiteGraph":
        return cls(a_size, b_size, frozenset((i, j) for i in range(1, a_size + 1)
                                             for j in range(1, b_size + 1)))

    def a_neighbors(self, i: int) -> list[int]:
        return sorted(j for a, j in self.edges if a == i)

    def b_neighbors(self, j: int) -> list[int]:
        return sorted(i for i, b in self.edges if b == j)


def php(n: int) -> CnfFormula:
    """Pigeonhole formula over ``K_{n,n+1}``; ``p_{i,j}`` is ``(i-1)(n+1)+j``."""
    if n < 1:
        raise ValueError("php needs n >= 1")
    m = n + 1

    def p(i, j):
        return (i - 1) * m + j

    clauses = [Clause([p(i, j) for i in range(1, n + 1)]) for j in range(1, m + 1)]
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            for k in range(j + 1, m + 1):
                clauses.append(Clause([-p(i, j), -p(i, k)]))
    name_map = {p(i, j): (i, j) for i in range(1, n + 1) for j in range(1, m + 1)}
    return CnfFormula(n * m, tuple(clauses), name_map, (f"php n={n}",))


def edge_numbering(g: BipartiteGraph) -> dict[tuple[int, int], int]:
    """Edges numbered 1.. in row-major ``(i, j)`` order."""
    return {e: k for k, e in enumerate(sorted(g.edges), 1)}


def gphp(g: BipartiteGraph) -> CnfFormula:
    """Pigeonhole formula restricted to the edges of ``g``.

    One ALO clause per ``j`` in B (ascending), then one AMO clause per
    unordered pair of neighbours of each ``i`` in A. A B-vertex without
    neighbours yields an empty clause.
    """
    var = edge_numbering(g)
    clauses = [Clause([var[i, j] for i in g.b_neighbors(j)]) for j in range(1, g.b_size + 1)]
    for i in range(1, g.a_size + 1):
        for j, k in combinations(g.a_neighbors(i), 2):
            clauses.append(Clause([-var[i, j], -var[i, k]]))
    name_map = {v: e for e, v in var.items()}
    return CnfFormula(len(var), tuple(clauses), name_map,
                      (f"gphp A={g.a_size} B={g.b_size} E={len(var)}",))


def theorem2_graph(n: int) -> BipartiteGraph:
    """``G = ([2n], [2n+1], E)`` on which row/column bucket elimination blows up."""
    if n < 1:
        raise ValueError("theorem2_graph needs n >= 1")
    edges = set()
    for j in range(1, n + 1):
        edges |= {(j, j), (n + j, j), (j, n + 1 + j), (n + j, n + 1 + j),
                  (j, n + 1), (n + j, n + 1)}
    return BipartiteGraph(2 * n, 2 * n + 1, frozenset(edges))


def read_graph(path) -> BipartiteGraph:
    """Read ``A B`` followed by one ``i j`` edge per line; ``#`` starts a comment."""
    rows = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise ValueError(f"{path}: empty graph file")
    try:
        (a, b), edges = rows[0], [(int(i), int(j)) for i, j in rows[1:]]
        return BipartiteGraph(int(a), int(b), frozenset(edges))
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def _matrix_order(f: CnfFormula, key) -> VarOrder:
    if f.name_map is None:
        raise ValueError("row/column orders need a formula with a name map")
    return VarOrder(sorted(f.name_map, key=lambda v: key(*f.name_map[v])))


def row_order(f: CnfFormula) -> VarOrder:
    return _matrix_order(f, lambda i, j: (i, j))


def col_order(f: CnfFormula) -> VarOrder:
    return _matrix_order(f, lambda i, j: (j, i))


@dataclass(frozen=True)
class OrderSpec:
    """``row``, ``col`` or ``file`` (with ``path``)."""

    tag: str
    path: str | None = None

    @classmethod
    def parse(cls, token: str) -> "OrderSpec":
        if token in ("row", "col"):
            return cls(token)
        return cls("file", token)

    def resolve(self, f: CnfFormula) -> VarOrder:
        if self.tag == "row":
            return row_order(f)
        if self.tag == "col":
            return col_order(f)
        if self.tag == "file":
            return read_order(self.path)
        raise ValueError(f"unknown order tag {self.tag!r}")


def read_order(path) -> VarOrder:
    return VarOrder(int(tok) for tok in Path(path).read_text().split())


def write_order(order: VarOrder, path) -> None:
    Path(path).write_text(" ".join(map(str, order.sequence)) + "\n")


def and_or_chain(n: int) -> tuple[CnfFormula, VarOrder, VarOrder]:
    """``(x_1 or y_1) and ... and (x_n or y_n)`` with x_i = i, y_i = n+i.

    Returns the formula, the blockwise order ``x.., y..`` and the interleaved
    order ``x_1, y_1, x_2, ...``.
    """
    if n < 1:
        raise ValueError("and_or_chain needs n >= 1")
    f = CnfFormula(2 * n, tuple(Clause([i, n + i]) for i in range(1, n + 1)),
                   comments=(f"and-or chain n={n}",))
    blockwise = VarOrder(range(1, 2 * n + 1))
    interleaved = VarOrder(v for i in range(1, n + 1) for v in (i, n + i))
    return f, blockwise, interleaved


def random_cnf(num_vars: int, num_clauses: int, max_clause_len: int, seed) -> CnfFormula:
    """Uniform random clauses of length 1..max_clause_len over distinct variables."""
    if not 0 <= num_vars <= BRUTE_FORCE_MAX_VARS:
        raise ValueError(f"num_vars must be in [0, {BRUTE_FORCE_MAX_VARS}]")
    if num_clauses < 0 or max_clause_len < 1:
        raise ValueError("need num_clauses >= 0 and max_clause_len >= 1")
    if num_clauses and num_vars == 0:
        raise ValueError("clauses need at least one variable")
    rng = random.Random(seed)
    clauses = []
    for _ in range(num_clauses):
        k = rng.randint(1, min(max_clause_len, num_vars))
        vs = rng.sample(range(1, num_vars + 1), k)
        clauses.append(Clause([v if rng.random() < 0.5 else -v for v in vs]))
    return CnfFormula(num_vars, tuple(clauses), comments=(f"random seed={seed}",))


def random_order(num_vars: int, rng: random.Random) -> VarOrder:
    seq = list(range(1, num_vars + 1))
    rng.shuffle(seq)
    return VarOrder(seq)
