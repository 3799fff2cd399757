"""Reduced ordered binary decision diagrams with a shared unique table.

Nodes are integers into one store. The two terminals are 0 (false) and
1 (true). Because every node is created through the unique table, two
`Predicate` objects denote the same Boolean function iff their node ids
are equal. The variable order is the order of declaration and is never
changed.
"""
import logging


logger = logging.getLogger(__name__)

FALSE = 0
TRUE = 1
DEFAULT_MAX_NODES = 2_000_000


class NodeLimitError(RuntimeError):
    """The store exceeded its configured node ceiling."""


class StoreMismatchError(ValueError):
    """Operands belong to different stores."""


class FixpointLimitError(RuntimeError):
    """A fixpoint did not converge within its iteration ceiling."""


class BDD:
    """Hash-consed store of decision diagram nodes."""

    def __init__(self, max_nodes=DEFAULT_MAX_NODES):
        self.max_nodes = max_nodes
        self.vars = list()
        self._level_of = dict()
        # terminal level is larger than any variable level
        self._terminal_level = 1 << 30
        self._level = [self._terminal_level, self._terminal_level]
        self._low = [FALSE, TRUE]
        self._high = [FALSE, TRUE]
        self._unique = dict()
        self._not_cache = dict()
        self._and_cache = dict()
        self._or_cache = dict()
        self._xor_cache = dict()
        self._exist_cache = dict()
        self._and_exist_cache = dict()
        self._rename_cache = dict()
        self.false = Predicate(self, FALSE)
        self.true = Predicate(self, TRUE)

    def __len__(self):
        return len(self._level)

    def __repr__(self):
        return f'BDD(vars={len(self.vars)}, nodes={len(self)})'

    # variables

    def declare(self, *names):
        for name in names:
            if name in self._level_of:
                raise ValueError(f'variable {name!r} already declared')
            self._level_of[name] = len(self.vars)
            self.vars.append(name)

    def var(self, name):
        level = self.level_of(name)
        return Predicate(self, self._mk(level, FALSE, TRUE))

    def level_of(self, name):
        try:
            return self._level_of[name]
        except KeyError:
            raise ValueError(f'undeclared variable {name!r}') from None

    def cube(self, assignment):
        """Conjunction of literals, from a mapping name -> bool."""
        items = sorted(
            (self.level_of(k), bool(v)) for k, v in assignment.items())
        u = TRUE
        for level, value in reversed(items):
            if value:
                u = self._mk(level, FALSE, u)
            else:
                u = self._mk(level, u, FALSE)
        return Predicate(self, u)

    # core

    def _mk(self, level, low, high):
        if low == high:
            return low
        key = (level, low, high)
        u = self._unique.get(key)
        if u is not None:
            return u
        u = len(self._level)
        if u >= self.max_nodes:
            raise NodeLimitError(
                f'decision diagram store exceeded {self.max_nodes} nodes')
        self._level.append(level)
        self._low.append(low)
        self._high.append(high)
        self._unique[key] = u
        return u

    def _top(self, u, v):
        lu = self._level[u]
        lv = self._level[v]
        if lu < lv:
            return lu, self._low[u], self._high[u], v, v
        if lv < lu:
            return lv, u, u, self._low[v], self._high[v]
        return lu, self._low[u], self._high[u], self._low[v], self._high[v]

    def _not(self, u):
        if u < 2:
            return 1 - u
        r = self._not_cache.get(u)
        if r is not None:
            return r
        r = self._mk(
            self._level[u], self._not(self._low[u]), self._not(self._high[u]))
        self._not_cache[u] = r
        return r

    def _and(self, u, v):
        if u == FALSE or v == FALSE:
            return FALSE
        if u == TRUE:
            return v
        if v == TRUE or u == v:
            return u
        if u > v:
            u, v = v, u
        key = (u, v)
        r = self._and_cache.get(key)
        if r is not None:
            return r
        level, u0, u1, v0, v1 = self._top(u, v)
        r = self._mk(level, self._and(u0, v0), self._and(u1, v1))
        self._and_cache[key] = r
        return r

    def _or(self, u, v):
        if u == TRUE or v == TRUE:
            return TRUE
        if u == FALSE:
            return v
        if v == FALSE or u == v:
            return u
        if u > v:
            u, v = v, u
        key = (u, v)
        r = self._or_cache.get(key)
        if r is not None:
            return r
        level, u0, u1, v0, v1 = self._top(u, v)
        r = self._mk(level, self._or(u0, v0), self._or(u1, v1))
        self._or_cache[key] = r
        return r

    def _xor(self, u, v):
        if u == v:
            return FALSE
        if u == FALSE:
            return v
        if v == FALSE:
            return u
        if u == TRUE:
            return self._not(v)
        if v == TRUE:
            return self._not(u)
        if u > v:
            u, v = v, u
        key = (u, v)
        r = self._xor_cache.get(key)
        if r is not None:
            return r
        level, u0, u1, v0, v1 = self._top(u, v)
        r = self._mk(level, self._xor(u0, v0), self._xor(u1, v1))
        self._xor_cache[key] = r
        return r

    def _ite(self, f, g, h):
        return self._or(self._and(f, g), self._and(self._not(f), h))

    def _exist(self, u, qlevels, max_level):
        """Existentially quantify the levels in frozenset `qlevels`."""
        if u < 2:
            return u
        level = self._level[u]
        if level > max_level:
            return u
        key = (u, qlevels)
        r = self._exist_cache.get(key)
        if r is not None:
            return r
        low = self._exist(self._low[u], qlevels, max_level)
        if level in qlevels:
            if low == TRUE:
                r = TRUE
            else:
                r = self._or(
                    low, self._exist(self._high[u], qlevels, max_level))
        else:
            r = self._mk(
                level, low, self._exist(self._high[u], qlevels, max_level))
        self._exist_cache[key] = r
        return r

    def _and_exist(self, u, v, qlevels, max_level):
        """Relational product: exists qlevels. u & v."""
        if u == FALSE or v == FALSE:
            return FALSE
        if u == TRUE and v == TRUE:
            return TRUE
        if u == TRUE or u == v:
            return self._exist(v, qlevels, max_level)
        if v == TRUE:
            return self._exist(u, qlevels, max_level)
        if u > v:
            u, v = v, u
        key = (u, v, qlevels)
        r = self._and_exist_cache.get(key)
        if r is not None:
            return r
        level, u0, u1, v0, v1 = self._top(u, v)
        if level > max_level:
            r = self._and(u, v)
        elif level in qlevels:
            low = self._and_exist(u0, v0, qlevels, max_level)
            if low == TRUE:
                r = TRUE
            else:
                r = self._or(
                    low, self._and_exist(u1, v1, qlevels, max_level))
        else:
            r = self._mk(
                level,
                self._and_exist(u0, v0, qlevels, max_level),
                self._and_exist(u1, v1, qlevels, max_level))
        self._and_exist_cache[key] = r
        return r

    def _rename(self, u, mapping, cache):
        """Simultaneous substitution of variables by variables.

        `mapping` is a dict level -> level. Works for any target order,
        because each node is rebuilt with `ite`.
        """
        if u < 2:
            return u
        r = cache.get(u)
        if r is not None:
            return r
        level = self._level[u]
        low = self._rename(self._low[u], mapping, cache)
        high = self._rename(self._high[u], mapping, cache)
        target = mapping.get(level, level)
        x = self._mk(target, FALSE, TRUE)
        r = self._ite(x, high, low)
        cache[u] = r
        return r

    def _levels(self, names):
        return frozenset(self.level_of(name) for name in names)

    # public algebra

    def _check(self, *preds):
        for p in preds:
            if not isinstance(p, Predicate):
                raise TypeError(f'expected Predicate, got {type(p)}')
            if p.bdd is not self:
                raise StoreMismatchError('operands from different stores')

    def ite(self, f, g, h):
        self._check(f, g, h)
        return Predicate(self, self._ite(f.node, g.node, h.node))

    def exist(self, names, f):
        self._check(f)
        qlevels = self._levels(names)
        if not qlevels:
            return f
        return Predicate(self, self._exist(f.node, qlevels, max(qlevels)))

    def forall(self, names, f):
        self._check(f)
        qlevels = self._levels(names)
        if not qlevels:
            return f
        u = self._exist(self._not(f.node), qlevels, max(qlevels))
        return Predicate(self, self._not(u))

    def and_exist(self, names, f, g):
        self._check(f, g)
        qlevels = self._levels(names)
        if not qlevels:
            return f & g
        return Predicate(
            self, self._and_exist(f.node, g.node, qlevels, max(qlevels)))

    def rename(self, f, mapping):
        """Substitute variables by variables, `mapping` name -> name.

        The map must be injective, and no target may occur in the support
        of `f` unless it is also a source.
        """
        self._check(f)
        lmap = {self.level_of(k): self.level_of(v) for k, v in mapping.items()}
        if len(set(lmap.values())) != len(lmap):
            raise ValueError('rename map is not injective')
        outside = set(lmap.values()) - set(lmap)
        if outside & self._support_levels(f.node):
            raise ValueError(
                'rename target variables occur in the predicate support')
        key = tuple(sorted(lmap.items()))
        cache = self._rename_cache.setdefault(key, dict())
        return Predicate(self, self._rename(f.node, lmap, cache))

    def _support_levels(self, u):
        seen = set()
        levels = set()
        stack = [u]
        while stack:
            w = stack.pop()
            if w < 2 or w in seen:
                continue
            seen.add(w)
            levels.add(self._level[w])
            stack.append(self._low[w])
            stack.append(self._high[w])
        return levels

    def support(self, f):
        self._check(f)
        return {self.vars[k] for k in self._support_levels(f.node)}

    def count(self, f, names):
        """Number of assignments to `names` that satisfy `f`."""
        self._check(f)
        levels = sorted(self._levels(names))
        if not self._support_levels(f.node) <= set(levels):
            raise ValueError('predicate support exceeds the counted variables')
        index = {level: k for k, level in enumerate(levels)}
        n = len(levels)
        memo = dict()

        def position(u):
            if u < 2:
                return n
            return index[self._level[u]]

        def rec(u):
            # models over the levels at or below position(u)
            if u == FALSE:
                return 0
            if u == TRUE:
                return 1
            r = memo.get(u)
            if r is not None:
                return r
            k = position(u)
            lo = self._low[u]
            hi = self._high[u]
            r = (rec(lo) << (position(lo) - k - 1)) + (
                rec(hi) << (position(hi) - k - 1))
            memo[u] = r
            return r

        return rec(f.node) << position(f.node)

    def pick_iter(self, f, names):
        """Yield every satisfying assignment over `names` as a dict."""
        self._check(f)
        levels = sorted(self._levels(names))
        if not self._support_levels(f.node) <= set(levels):
            raise ValueError('predicate support exceeds the enumerated variables')
        names_by_level = [self.vars[k] for k in levels]

        def rec(u, k, partial):
            if u == FALSE:
                return
            if k == len(levels):
                yield dict(partial)
                return
            level = levels[k]
            name = names_by_level[k]
            if self._level[u] == level:
                branches = ((False, self._low[u]), (True, self._high[u]))
            else:
                branches = ((False, u), (True, u))
            for value, w in branches:
                partial[name] = value
                yield from rec(w, k + 1, partial)
            del partial[name]

        yield from rec(f.node, 0, dict())


class Predicate:
    """Handle to a node in a `BDD` store."""

    __slots__ = ('bdd', 'node')

    def __init__(self, bdd, node):
        self.bdd = bdd
        self.node = node

    def __repr__(self):
        return f'Predicate({self.node})'

    def __hash__(self):
        return hash((id(self.bdd), self.node))

    def __eq__(self, other):
        if not isinstance(other, Predicate):
            return NotImplemented
        if other.bdd is not self.bdd:
            raise StoreMismatchError('comparing predicates of different stores')
        return self.node == other.node

    def __ne__(self, other):
        r = self.__eq__(other)
        if r is NotImplemented:
            return r
        return not r

    def _other(self, other):
        if not isinstance(other, Predicate):
            raise TypeError(f'expected Predicate, got {type(other)}')
        if other.bdd is not self.bdd:
            raise StoreMismatchError('operands from different stores')
        return other.node

    def __invert__(self):
        return Predicate(self.bdd, self.bdd._not(self.node))

    def __and__(self, other):
        return Predicate(self.bdd, self.bdd._and(self.node, self._other(other)))

    def __or__(self, other):
        return Predicate(self.bdd, self.bdd._or(self.node, self._other(other)))

    def __xor__(self, other):
        return Predicate(self.bdd, self.bdd._xor(self.node, self._other(other)))

    def __sub__(self, other):
        v = self.bdd._not(self._other(other))
        return Predicate(self.bdd, self.bdd._and(self.node, v))

    def __le__(self, other):
        v = self.bdd._not(self._other(other))
        return self.bdd._and(self.node, v) == FALSE

    def __ge__(self, other):
        return other.__le__(self)

    def implies(self, other):
        v = self._other(other)
        return Predicate(self.bdd, self.bdd._or(self.bdd._not(self.node), v))

    def iff(self, other):
        v = self._other(other)
        return Predicate(self.bdd, self.bdd._not(self.bdd._xor(self.node, v)))

    @property
    def is_false(self):
        return self.node == FALSE

    @property
    def is_true(self):
        return self.node == TRUE


def conj(preds, bdd):
    u = bdd.true
    for p in preds:
        u &= p
    return u


def disj(preds, bdd):
    u = bdd.false
    for p in preds:
        u |= p
    return u


def fixpoint(kind, body, bdd, var='X', env=None, max_iter=None, start=None):
    """Least (`'mu'`) or greatest (`'nu'`) fixpoint of `body`.

    `body(env)` is called with the environment in which `var` is bound
    to the current iterate. The body must be monotone in `var`.
    Returns the fixpoint; `env[var]` is left bound to it.

    `start` replaces the bottom (top) element as the first iterate. For
    `mu` it must lie below the least fixpoint and satisfy
    `start <= body(start)`; dually for `nu`.
    """
    if kind not in ('mu', 'nu'):
        raise ValueError(f'unknown fixpoint kind {kind!r}')
    if start is not None:
        x = start
    elif kind == 'mu':
        x = bdd.false
    else:
        x = bdd.true
    if env is None:
        env = dict()
    if max_iter is None:
        # the lattice has at most 2**n + 1 distinct chain elements
        max_iter = (1 << min(len(bdd.vars), 62)) + 1
    for _ in range(max_iter + 1):
        env[var] = x
        y = body(env)
        if y == x:
            return x
        x = y
    raise FixpointLimitError(
        f'{kind} {var} did not converge within {max_iter} iterations')
