"""Reduced ordered binary decision diagrams.

Nodes live in a per-manager arena and are referred to by plain integers:
``0`` and ``1`` are the terminals, every other handle indexes an internal
node ``(level, low, high)``. There are no complement edges, so a handle
identifies one Boolean function over the manager's variables and two
handles are equal exactly when their functions are.

Nodes are never freed implicitly. ``clear_dead(roots)`` releases every
node not reachable from ``roots`` and empties the operation caches; this
is the only point at which a handle can become invalid.
"""
from __future__ import annotations

import sys
from collections.abc import Iterable, Mapping, Sequence

FALSE = 0
TRUE = 1

# apply and exists recurse once per level
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


class BddError(Exception):
    """Base class of engine errors."""


class OrderError(BddError, ValueError):
    """A variable order is not a permutation of 1..k."""


class UnknownVariable(BddError, KeyError):
    pass


class NodeLimitExceeded(BddError, MemoryError):
    """The arena would grow beyond the manager's node budget."""

    def __init__(self, limit: int):
        super().__init__(f"node limit of {limit} exceeded")
        self.limit = limit


class VarOrder:
    """A permutation of the variables ``1..k``.

    ``sequence[k]`` is the variable at level ``k``; ``position`` is the
    inverse map.
    """

    __slots__ = ("sequence", "position")

    def __init__(self, sequence: Iterable[int]):
        seq = tuple(int(v) for v in sequence)
        position = {v: k for k, v in enumerate(seq)}
        if len(position) != len(seq):
            dup = sorted({v for v in seq if seq.count(v) > 1})
            raise OrderError(f"duplicate variables in order: {dup}")
        expected = set(range(1, len(seq) + 1))
        if set(seq) != expected:
            missing = sorted(expected - set(seq))
            extra = sorted(set(seq) - expected)
            raise OrderError(f"order is not a permutation of 1..{len(seq)} "
                             f"(missing {missing}, unexpected {extra})")
        self.sequence = seq
        self.position = position

    def __len__(self) -> int:
        return len(self.sequence)

    def __iter__(self):
        return iter(self.sequence)

    def __eq__(self, other) -> bool:
        return isinstance(other, VarOrder) and self.sequence == other.sequence

    def __hash__(self) -> int:
        return hash(self.sequence)

    def __repr__(self) -> str:
        return f"VarOrder({list(self.sequence)})"


class Manager:
    """Shared arena of reduced ordered BDD nodes under a fixed order.

    Parameters
    ----------
    order:
        The variable order all nodes respect.
    node_limit:
        Optional cap on the number of nodes held by the arena (terminals
        included). Allocating beyond it raises `NodeLimitExceeded`.
    """

    def __init__(self, order: VarOrder | Sequence[int], node_limit: int | None = None):
        if not isinstance(order, VarOrder):
            order = VarOrder(order)
        self.order = order
        self.node_limit = node_limit
        nlev = len(order)
        # terminals sit below every variable level
        self._level = [nlev, nlev]
        self._low = [FALSE, TRUE]
        self._high = [FALSE, TRUE]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._free: list[int] = []
        self._and_cache: dict[tuple[int, int], int] = {}
        self._or_cache: dict[tuple[int, int], int] = {}
        self._not_cache: dict[int, int] = {}
        self._exists_cache: dict[tuple[int, int], int] = {}
        self._restrict_cache: dict[tuple[int, int, int], int] = {}
        # handle -> (node count, support levels)
        self._profile_cache: dict[int, tuple[int, frozenset[int]]] = {}
        # statistics
        self.total_allocated = 0
        self.peak_live = 2
        self.apply_calls = 0
        self.cache_hits = 0
        self.cache_misses = 0
        self.sweeps = 0

    # ------------------------------------------------------------------
    # node table

    @property
    def live_nodes(self) -> int:
        """Nodes currently held by the arena, terminals included."""
        return len(self._unique) + 2

    def _mk(self, level: int, low: int, high: int) -> int:
        if low == high:
            return low
        u = self._unique.get((level, low, high))
        if u is None:
            u = self._alloc(level, low, high)
        return u

    def _alloc(self, level: int, low: int, high: int) -> int:
        live = len(self._unique) + 3
        if self.node_limit is not None and live > self.node_limit:
            raise NodeLimitExceeded(self.node_limit)
        if self._free:
            u = self._free.pop()
            self._level[u] = level
            self._low[u] = low
            self._high[u] = high
        else:
            u = len(self._level)
            self._level.append(level)
            self._low.append(low)
            self._high.append(high)
        self._unique[(level, low, high)] = u
        self.total_allocated += 1
        if live > self.peak_live:
            self.peak_live = live
        return u

    def _lvl(self, v: int) -> int:
        try:
            return self.order.position[v]
        except KeyError:
            raise UnknownVariable(v) from None

    def var(self, u: int) -> int | None:
        """Variable labelling node ``u``; None for terminals."""
        if u <= TRUE:
            return None
        return self.order.sequence[self._level[u]]

    def low(self, u: int) -> int:
        return self._low[u]

    def high(self, u: int) -> int:
        return self._high[u]

    def level(self, u: int) -> int:
        return self._level[u]

    # ------------------------------------------------------------------
    # construction

    def const(self, b) -> int:
        return TRUE if b else FALSE

    @property
    def true(self) -> int:
        return TRUE

    @property
    def false(self) -> int:
        return FALSE

    def literal(self, v: int, positive: bool = True) -> int:
        lv = self._lvl(v)
        if positive:
            return self._mk(lv, FALSE, TRUE)
        return self._mk(lv, TRUE, FALSE)

    def clause(self, literals: Iterable[int]) -> int:
        """BDD of a disjunction of signed DIMACS literals.

        Built bottom-up along the order, so it never allocates more than
        the final path.
        """
        by_level: dict[int, bool] = {}
        for lit in literals:
            lv = self._lvl(abs(lit))
            pos = lit > 0
            if by_level.get(lv, pos) != pos:
                return TRUE
            by_level[lv] = pos
        u = FALSE
        for lv in sorted(by_level, reverse=True):
            if by_level[lv]:
                u = self._mk(lv, u, TRUE)
            else:
                u = self._mk(lv, TRUE, u)
        return u

    # ------------------------------------------------------------------
    # Boolean operations

    def apply_and(self, f: int, g: int) -> int:
        return self._apply(f, g, FALSE, TRUE, self._and_cache)

    def apply_or(self, f: int, g: int) -> int:
        return self._apply(f, g, TRUE, FALSE, self._or_cache)

    def _apply(self, f: int, g: int, absorbing: int, neutral: int, cache: dict) -> int:
        # Shared recursion for and (absorbing 0, neutral 1) and or (dual).
        level, low, high = self._level, self._low, self._high
        unique, alloc = self._unique, self._alloc
        hits = 0

        def rec(f, g):
            nonlocal hits
            if f == absorbing or g == absorbing:
                return absorbing
            if f == neutral or f == g:
                return g
            if g == neutral:
                return f
            if f > g:
                f, g = g, f
            key = (f, g)
            r = cache.get(key)
            if r is not None:
                hits += 1
                return r
            lf = level[f]
            lg = level[g]
            if lf == lg:
                lo = rec(low[f], low[g])
                hi = rec(high[f], high[g])
            elif lf < lg:
                lo = rec(low[f], g)
                hi = rec(high[f], g)
            else:
                lf = lg
                lo = rec(f, low[g])
                hi = rec(f, high[g])
            if lo == hi:
                r = lo
            else:
                r = unique.get((lf, lo, hi))
                if r is None:
                    r = alloc(lf, lo, hi)
            cache[key] = r
            return r

        before = len(cache)
        try:
            return rec(f, g)
        finally:
            misses = len(cache) - before
            self.apply_calls += misses
            self.cache_misses += misses
            self.cache_hits += hits

    def apply_not(self, f: int) -> int:
        if f <= TRUE:
            return TRUE - f
        r = self._not_cache.get(f)
        if r is not None:
            return r
        r = self._mk(self._level[f], self.apply_not(self._low[f]),
                     self.apply_not(self._high[f]))
        self._not_cache[f] = r
        self._not_cache[r] = f
        return r

    def restrict(self, f: int, v: int, b) -> int:
        """Cofactor of ``f`` with ``v`` fixed to ``b``."""
        lv = self._lvl(v)
        return self._restrict(f, lv, 1 if b else 0)

    def _restrict(self, f: int, lv: int, b: int) -> int:
        lf = self._level[f]
        if lf > lv:
            return f
        if lf == lv:
            return self._high[f] if b else self._low[f]
        key = (f, lv, b)
        r = self._restrict_cache.get(key)
        if r is not None:
            return r
        r = self._mk(lf, self._restrict(self._low[f], lv, b),
                     self._restrict(self._high[f], lv, b))
        self._restrict_cache[key] = r
        return r

    def exists(self, f: int, v: int) -> int:
        """Existentially quantify variable ``v`` out of ``f``."""
        lv = self._lvl(v)
        level, low, high = self._level, self._low, self._high
        cache, mk, apply_or = self._exists_cache, self._mk, self.apply_or

        def rec(f):
            lf = level[f]
            if lf > lv:
                return f
            if lf == lv:
                return apply_or(low[f], high[f])
            key = (f, lv)
            r = cache.get(key)
            if r is None:
                r = mk(lf, rec(low[f]), rec(high[f]))
                cache[key] = r
            return r

        return rec(f)

    def conjoin(self, fs: Iterable[int]) -> int:
        """Left fold of `apply_and` over ``fs``."""
        r = TRUE
        for f in fs:
            r = self.apply_and(r, f)
            if r == FALSE:
                break
        return r

    # ------------------------------------------------------------------
    # inspection

    def evaluate(self, f: int, assignment: Mapping[int, object]) -> int:
        seq = self.order.sequence
        while f > TRUE:
            v = seq[self._level[f]]
            try:
                bit = assignment[v]
            except KeyError:
                raise UnknownVariable(f"assignment has no value for variable {v}") from None
            f = self._high[f] if bit else self._low[f]
        return f

    def descendants(self, roots: Iterable[int]) -> set[int]:
        """All nodes reachable from ``roots``, terminals included."""
        seen = set(roots)
        stack = [u for u in seen if u > TRUE]
        low, high = self._low, self._high
        while stack:
            u = stack.pop()
            c = low[u]
            if c not in seen:
                seen.add(c)
                if c > TRUE:
                    stack.append(c)
            c = high[u]
            if c not in seen:
                seen.add(c)
                if c > TRUE:
                    stack.append(c)
        return seen

    def _profile(self, f: int) -> tuple[int, frozenset[int]]:
        r = self._profile_cache.get(f)
        if r is None:
            nodes = self.descendants([f])
            lev = self._level
            r = (len(nodes), frozenset(lev[u] for u in nodes if u > TRUE))
            self._profile_cache[f] = r
        return r

    def node_count(self, f: int) -> int:
        return self._profile(f)[0]

    def support(self, f: int) -> set[int]:
        seq = self.order.sequence
        return {seq[lv] for lv in self._profile(f)[1]}

    def level_widths(self, f: int) -> dict[int, int]:
        """Reachable nodes per variable (width of the reduced diagram)."""
        seq = self.order.sequence
        widths: dict[int, int] = {}
        for u in self.descendants([f]):
            if u > TRUE:
                v = seq[self._level[u]]
                widths[v] = widths.get(v, 0) + 1
        return widths

    def check_invariants(self, roots: Iterable[int]) -> None:
        """Assert ordering, reducedness and uniqueness below ``roots``."""
        seen_triples: dict[tuple[int, int, int], int] = {}
        for u in self.descendants(roots):
            if u <= TRUE:
                continue
            lv, lo, hi = self._level[u], self._low[u], self._high[u]
            assert lo != hi, f"node {u} is redundant"
            assert self._level[lo] > lv and self._level[hi] > lv, f"node {u} violates the order"
            triple = (lv, lo, hi)
            assert seen_triples.setdefault(triple, u) == u, f"nodes {u} and {seen_triples[triple]} coincide"
            assert self._unique.get(triple) == u, f"node {u} missing from unique table"

    # ------------------------------------------------------------------
    # memory

    def clear_caches(self) -> None:
        self._and_cache.clear()
        self._or_cache.clear()
        self._not_cache.clear()
        self._exists_cache.clear()
        self._restrict_cache.clear()
        self._profile_cache.clear()

    def clear_dead(self, roots: Iterable[int]) -> int:
        """Release every node not reachable from ``roots``.

        Operation caches are emptied. Returns the number of nodes freed.
        """
        keep = self.descendants(roots)
        dead = [(k, u) for k, u in self._unique.items() if u not in keep]
        for k, u in dead:
            del self._unique[k]
        # lowest indices get reused first
        self._free.extend(sorted((u for _, u in dead), reverse=True))
        self.clear_caches()
        self.sweeps += 1
        return len(dead)

    def to_dot(self, f: int, names: Mapping[int, str] | None = None) -> str:
        """Graphviz rendering: solid edges go high, dashed edges go low."""
        lines = ["digraph bdd {"]
        nodes = sorted(self.descendants([f]))
        for u in nodes:
            if u <= TRUE:
                lines.append(f'  n{u} [shape=box, label="{u}"];')
            else:
                v = self.var(u)
                label = names.get(v, str(v)) if names else str(v)
                lines.append(f'  n{u} [label="{label}"];')
        for u in nodes:
            if u > TRUE:
                lines.append(f"  n{u} -> n{self._high[u]};")
                lines.append(f"  n{u} -> n{self._low[u]} [style=dashed];")
        lines.append("}")
        return "\n".join(lines) + "\n"
