import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bucketbdd.bdd import FALSE, TRUE, Manager, NodeLimitExceeded, OrderError, UnknownVariable, VarOrder
from bucketbdd.cnf import Clause
from bucketbdd.generators import and_or_chain, php, row_order

from helpers import assignments, build_expr, eval_expr, min_obdd_size


def exprs(num_vars):
    leaves = st.one_of(st.integers(1, num_vars), st.sampled_from([("const", 0), ("const", 1)]))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(st.tuples(st.just("not"), sub),
                              st.tuples(st.sampled_from(["and", "or"]), sub, sub)),
        max_leaves=14)


def random_expr(rng, num_vars, depth=4):
    if depth == 0 or rng.random() < 0.2:
        return rng.randint(1, num_vars)
    op = rng.choice(["and", "or", "or", "not"])
    if op == "not":
        return ("not", random_expr(rng, num_vars, depth - 1))
    return (op, random_expr(rng, num_vars, depth - 1), random_expr(rng, num_vars, depth - 1))


def php_conjunction(m, n):
    return m.conjoin(m.clause(c.literals) for c in php(n).clauses)


# ----------------------------------------------------------------------
# orders and managers


class TestVarOrder:
    def test_positions(self):
        o = VarOrder([3, 1, 2])
        assert [o.position[v] for v in (3, 1, 2)] == [0, 1, 2]

    def test_empty(self):
        m = Manager(VarOrder([]))
        assert m.node_count(m.const(1)) == 1
        with pytest.raises(UnknownVariable):
            m.literal(1)

    @pytest.mark.parametrize("seq", [[1, 1, 2], [1, 3], [0, 1], [2, 3]])
    def test_rejects_non_permutations(self, seq):
        with pytest.raises(OrderError):
            VarOrder(seq)

    def test_manager_accepts_plain_list(self):
        assert Manager([2, 1]).order == VarOrder([2, 1])


def test_terminal_only_manager():
    m = Manager(VarOrder([1, 2, 3]))
    assert m.node_count(m.true) == 1
    assert m.const(1) == m.const(1) == TRUE
    assert m.const(0) == FALSE
    assert m.live_nodes == 2


@pytest.mark.parametrize("b", [0, 1])
def test_constants_evaluate(b):
    m = Manager([1, 2])
    for a in assignments([1, 2]):
        assert m.evaluate(m.const(b), a) == b


def test_literals():
    m = Manager([1, 2])
    x = m.literal(1, True)
    nx = m.literal(1, False)
    assert (m.var(x), m.low(x), m.high(x)) == (1, FALSE, TRUE)
    assert (m.var(nx), m.low(nx), m.high(nx)) == (1, TRUE, FALSE)
    assert m.node_count(x) == 3
    assert m.literal(1, True) == x
    with pytest.raises(UnknownVariable):
        m.literal(7)


# ----------------------------------------------------------------------
# operations


def test_and_examples():
    m = Manager([1, 2])
    g = m.apply_or(m.literal(1), m.literal(2))
    assert m.apply_and(m.true, g) == g
    assert m.apply_and(m.literal(1), m.literal(1, False)) == FALSE


def test_and_php1_is_zero():
    # brute force: no assignment of p11, p12 satisfies all three clauses
    clauses = [c.literals for c in php(1).clauses]
    assert not any(all(any((a[abs(l)] == 1) == (l > 0) for l in c) for c in clauses)
                   for a in assignments([1, 2]))
    m = Manager([1, 2])
    assert php_conjunction(m, 1) == FALSE


def test_or_examples():
    m = Manager([1, 2])
    x1, x2 = m.literal(1), m.literal(2)
    assert m.apply_or(m.false, x2) == x2
    assert m.apply_or(x1, m.literal(1, False)) == TRUE
    f = m.apply_or(x1, x2)
    assert m.node_count(f) == min_obdd_size(lambda a: a[1] | a[2], [1, 2]) == 4
    assert m.node_count(f) - 2 == 2


def test_not_examples():
    m = Manager([1, 2, 3])
    assert m.apply_not(m.true) == FALSE
    assert m.apply_not(m.literal(2, True)) == m.literal(2, False)


def test_not_php2_size():
    f = php(2)
    m = Manager(row_order(f))
    g = php_conjunction(m, 2)
    assert g == FALSE
    assert m.node_count(m.apply_not(g)) == m.node_count(g) == 1
    partial = m.conjoin(m.clause(c.literals) for c in f.clauses[:-1])
    lits = [c.literals for c in f.clauses[:-1]]
    expected = min_obdd_size(lambda a: all(any((a[abs(l)] == 1) == (l > 0) for l in c) for c in lits),
                             list(row_order(f)))
    assert m.node_count(partial) == expected
    assert m.node_count(m.apply_not(partial)) == expected


def test_restrict_examples():
    m = Manager([1, 2])
    x, y = m.literal(1), m.literal(2)
    f = m.apply_or(x, y)
    assert m.restrict(f, 1, 1) == TRUE
    assert m.restrict(f, 1, 0) == y
    with pytest.raises(UnknownVariable):
        m.restrict(f, 9, 0)


def _column_one_quantified(n):
    """BDD for the conjunction of all php(n) clauses touching column 1,
    with p_{1,1}..p_{n,1} quantified, under the row order."""
    f = php(n)
    m = Manager(row_order(f))
    col1 = {f.var_of(i, 1) for i in range(1, n + 1)}
    touching = [c for c in f.clauses if set(map(abs, c.literals)) & col1]
    d = m.conjoin(m.clause(c.literals) for c in touching)
    for v in sorted(col1):
        d = m.exists(d, v)
    return f, m, d, touching, col1


def test_restrict_quantified_first_column_n3():
    n = 3
    f, m, d, touching, col1 = _column_one_quantified(n)
    fixed = {f.var_of(i, j): 0 for i in range(1, n + 1) for j in range(4, n + 2)}
    r = d
    for v, b in fixed.items():
        r = m.restrict(r, v, b)
    free = [v for v in range(1, f.num_vars + 1) if v not in col1 and v not in fixed]

    def oracle(a):
        # some extension over column 1 satisfies the touching clauses
        for ext in assignments(sorted(col1)):
            full = {**a, **fixed, **ext}
            if all(any((full[abs(l)] == 1) == (l > 0) for l in c) for c in touching):
                return 1
        return 0

    for a in assignments(free):
        assert m.evaluate(r, {**a, **fixed}) == oracle(a)
    # the restricted function says: some row i has p_{i,2} = p_{i,3} = 0
    for a in assignments(free):
        expected = int(any(a[f.var_of(i, 2)] == 0 and a[f.var_of(i, 3)] == 0 for i in range(1, n + 1)))
        assert m.evaluate(r, {**a, **fixed}) == expected
    assert m.node_count(r) <= m.node_count(d)


def test_exists_examples():
    m = Manager([1, 2, 3])
    x, y = m.literal(1), m.literal(2)
    assert m.exists(m.apply_or(x, y), 1) == TRUE
    g = m.apply_and(y, m.literal(3))
    assert m.exists(g, 1) == g


def test_exists_matches_restrictions_on_random_8var():
    rng = random.Random(8)
    variables = list(range(1, 9))
    for _ in range(200):
        order = variables[:]
        rng.shuffle(order)
        m = Manager(order)
        e = random_expr(rng, 8, depth=5)
        f = build_expr(m, e)
        v = rng.choice(variables)
        q = m.exists(f, v)
        assert q == m.apply_or(m.restrict(f, v, 0), m.restrict(f, v, 1))
        assert v not in m.support(q)
        for a in assignments(variables):
            brute = eval_expr(e, {**a, v: 0}) | eval_expr(e, {**a, v: 1})
            assert m.evaluate(q, a) == brute


def test_evaluate():
    m = Manager([1, 2])
    assert m.evaluate(m.true, {}) == 1
    assert m.evaluate(m.literal(1), {1: 0}) == 0
    for a in assignments([1, 2]):
        assert m.evaluate(php_conjunction(m, 1), a) == 0
    with pytest.raises(KeyError):
        m.evaluate(m.literal(2), {1: 1})


def test_node_count_examples():
    m = Manager([1])
    assert m.node_count(FALSE) == 1
    assert m.node_count(m.literal(1)) == 3
    f, blockwise, _ = and_or_chain(3)
    m = Manager(blockwise)
    g = m.conjoin(m.clause(c.literals) for c in f.clauses)
    assert m.node_count(g) >= 2 ** 3


def test_level_widths():
    m = Manager([1, 2])
    assert m.level_widths(m.literal(1)) == {1: 1}
    assert m.level_widths(TRUE) == {}
    f, blockwise, _ = and_or_chain(3)
    m = Manager(blockwise)
    g = m.conjoin(m.clause(c.literals) for c in f.clauses)
    # after x1..x3 each subset of zero x's leaves a distinct y-residue
    assert m.level_widths(g) == {1: 1, 2: 2, 3: 4, 4: 4, 5: 2, 6: 1}
    assert sum(m.level_widths(g).values()) + 2 == m.node_count(g)


def test_clause_bdd_is_a_path():
    m = Manager(range(1, 7))
    for lits in ([1], [-1, -2], [3, -5, 6], [6, 5, 4, 3, 2, 1]):
        assert m.node_count(m.clause(lits)) == len(lits) + 2
    assert m.clause([2, -2]) == TRUE
    assert m.clause([]) == FALSE


# ----------------------------------------------------------------------
# properties


@settings(max_examples=150, deadline=None)
@given(exprs(4), exprs(4), exprs(4))
def test_canonicity_associativity_and_de_morgan(a, b, c):
    m = Manager([2, 4, 1, 3])
    fa, fb, fc = (build_expr(m, e) for e in (a, b, c))
    assert m.apply_and(m.apply_and(fa, fb), fc) == m.apply_and(fa, m.apply_and(fb, fc))
    assert m.apply_or(m.apply_or(fa, fb), fc) == m.apply_or(fa, m.apply_or(fb, fc))
    assert m.apply_not(m.apply_and(fa, fb)) == m.apply_or(m.apply_not(fa), m.apply_not(fb))
    assert m.apply_not(m.apply_or(fa, fb)) == m.apply_and(m.apply_not(fa), m.apply_not(fb))
    m.check_invariants([fa, fb, fc])


@settings(max_examples=150, deadline=None)
@given(exprs(5), exprs(5))
def test_equal_handles_iff_equal_functions(a, b):
    m = Manager([5, 3, 1, 2, 4])
    fa, fb = build_expr(m, a), build_expr(m, b)
    same = all(eval_expr(a, x) == eval_expr(b, x) for x in assignments(range(1, 6)))
    assert (fa == fb) == same


@settings(max_examples=100, deadline=None)
@given(exprs(5), st.permutations([1, 2, 3, 4, 5]))
def test_node_count_is_minimal_size(e, order):
    m = Manager(order)
    f = build_expr(m, e)
    assert m.node_count(f) == min_obdd_size(lambda a: eval_expr(e, a), order)


def test_exhaustive_semantics_10_vars():
    rng = random.Random(10)
    variables = list(range(1, 11))
    for _ in range(12):
        order = variables[:]
        rng.shuffle(order)
        m = Manager(order)
        e1, e2 = random_expr(rng, 10, 6), random_expr(rng, 10, 6)
        f, g = build_expr(m, e1), build_expr(m, e2)
        v, b = rng.choice(variables), rng.randint(0, 1)
        ops = {
            "and": m.apply_and(f, g),
            "or": m.apply_or(f, g),
            "not": m.apply_not(f),
            "restrict": m.restrict(f, v, b),
            "exists": m.exists(f, v),
        }
        m.check_invariants(ops.values())
        for a in assignments(variables):
            x, y = eval_expr(e1, a), eval_expr(e2, a)
            assert m.evaluate(ops["and"], a) == x & y
            assert m.evaluate(ops["or"], a) == x | y
            assert m.evaluate(ops["not"], a) == 1 - x
            assert m.evaluate(ops["restrict"], a) == eval_expr(e1, {**a, v: b})
            assert m.evaluate(ops["exists"], a) == eval_expr(e1, {**a, v: 0}) | eval_expr(e1, {**a, v: 1})


@settings(max_examples=200, deadline=None)
@given(exprs(6), exprs(6), st.integers(1, 6), st.integers(0, 1))
def test_size_relations(a, b, v, bit):
    m = Manager([1, 2, 3, 4, 5, 6])
    f, g = build_expr(m, a), build_expr(m, b)
    assert m.node_count(m.apply_not(f)) == m.node_count(f)
    assert m.apply_not(m.apply_not(f)) == f
    assert m.node_count(m.restrict(f, v, bit)) <= m.node_count(f)
    assert m.node_count(m.apply_and(f, g)) <= m.node_count(f) * m.node_count(g)
    assert m.node_count(m.apply_or(f, g)) <= m.node_count(f) * m.node_count(g)
    assert v not in m.support(m.exists(f, v))


def test_determinism():
    def build():
        rng = random.Random(3)
        m = Manager(range(1, 9))
        fs = [build_expr(m, random_expr(rng, 8, 5)) for _ in range(30)]
        return [m.node_count(f) for f in fs], fs, m.total_allocated

    assert build() == build()


# ----------------------------------------------------------------------
# memory management


def test_node_limit():
    f, blockwise, _ = and_or_chain(10)
    m = Manager(blockwise, node_limit=200)
    with pytest.raises(NodeLimitExceeded):
        m.conjoin(m.clause(c.literals) for c in f.clauses)
    assert m.live_nodes <= 200


def test_clear_dead_keeps_roots():
    rng = random.Random(5)
    m = Manager(range(1, 9))
    exprs_ = [random_expr(rng, 8, 5) for _ in range(20)]
    fs = [build_expr(m, e) for e in exprs_]
    keep = fs[::3]
    sizes = [m.node_count(f) for f in keep]
    freed = m.clear_dead(keep)
    assert freed > 0
    assert [m.node_count(f) for f in keep] == sizes
    m.check_invariants(keep)
    for e, f in zip(exprs_[::3], keep):
        for a in assignments(range(1, 9)):
            assert m.evaluate(f, a) == eval_expr(e, a)
    # freed slots are reused and the table stays canonical
    again = [build_expr(m, e) for e in exprs_]
    assert again[::3] == keep
    m.check_invariants(again)


def test_to_dot():
    m = Manager([1, 2])
    dot = m.to_dot(m.apply_and(m.literal(1), m.literal(2, False)), names={1: "p11", 2: "p12"})
    assert dot.startswith("digraph")
    assert 'label="p11"' in dot and "style=dashed" in dot


def test_clause_type_feeds_manager():
    m = Manager([1, 2, 3])
    c = Clause([1, -3, 1])
    assert c.literals == (1, -3)
    assert m.node_count(m.clause(c.literals)) == 4
