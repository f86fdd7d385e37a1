"""Brute-force oracles shared by the test modules.

Nothing here touches the BDD engine.
"""
from itertools import product


def assignments(variables):
    variables = list(variables)
    for bits in product((0, 1), repeat=len(variables)):
        yield dict(zip(variables, bits))


def eval_expr(e, a):
    """Evaluate a nested-tuple expression: int var, ('const', b), ('not', x), ('and'|'or', x, y)."""
    if isinstance(e, int):
        return a[e]
    op = e[0]
    if op == "const":
        return e[1]
    if op == "not":
        return 1 - eval_expr(e[1], a)
    if op == "and":
        return eval_expr(e[1], a) & eval_expr(e[2], a)
    if op == "or":
        return eval_expr(e[1], a) | eval_expr(e[2], a)
    raise ValueError(op)


def build_expr(m, e):
    if isinstance(e, int):
        return m.literal(e)
    op = e[0]
    if op == "const":
        return m.const(e[1])
    if op == "not":
        return m.apply_not(build_expr(m, e[1]))
    f, g = build_expr(m, e[1]), build_expr(m, e[2])
    return m.apply_and(f, g) if op == "and" else m.apply_or(f, g)


def truth_table(fn, order):
    """Values of ``fn`` with ``order[0]`` as the most significant bit."""
    n = len(order)
    table = []
    for idx in range(1 << n):
        a = {v: (idx >> (n - 1 - k)) & 1 for k, v in enumerate(order)}
        table.append(int(fn(a)))
    return table


def min_obdd_size(fn, order):
    """Node count of the reduced OBDD of ``fn`` under ``order``, terminals included.

    Counts, for every prefix length k, the distinct subfunctions obtained by
    fixing the first k variables that still depend on variable k+1, plus the
    constants that occur.
    """
    table = truth_table(fn, order)
    n = len(order)
    count = len(set(table))
    for k in range(n):
        width = 1 << (n - k)
        half = width >> 1
        seen = set()
        for start in range(0, len(table), width):
            chunk = tuple(table[start:start + width])
            if chunk[:half] != chunk[half:]:
                seen.add(chunk)
        count += len(seen)
    return count


def cnf_value(clauses, a):
    return int(all(any((a[abs(l)] == 1) == (l > 0) for l in c) for c in clauses))


def cnf_sat(clauses, num_vars):
    return int(any(cnf_value(clauses, a) for a in assignments(range(1, num_vars + 1))))
