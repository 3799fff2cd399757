"""Interleaved game structures over Boolean variables.

Each player j moves only on its turn (`turn = j`), writes only its own
variables, and advances the turn to j + 1 (mod n). `GameStructure`
holds the lifted relations and the operations that move between
predicates and explicit node sets.

Explicit graphs are encoded so that player m's variable block holds the
binary index of the last node player m moved to. Such a node is owned by
player m + 1, so at turn k the current node is read from block k - 1;
the remaining blocks carry values from earlier moves that no relation or
goal ever inspects. Every predicate built from node sets is therefore
independent of those stale blocks, and decoding is exact.
"""
import logging
import math
import os

from nestgr1.bdd import BDD, DEFAULT_MAX_NODES, conj, disj
from nestgr1.spec import (
    ExplicitGame, GameSpec, RawAction, SpecError, VariableTable,
    parse_formula, prime)


logger = logging.getLogger(__name__)

DEFAULT_EXPAND_LIMIT = 1 << 20


class CeilingError(RuntimeError):
    """An explicit enumeration would exceed its configured ceiling."""


def _env_int(name, default):
    value = os.environ.get(name)
    if value is None:
        return default
    n = int(value)
    if n <= 0:
        raise ValueError(f'{name} must be positive')
    return n


class GameStructure:
    """Lifted turn-based game over one decision diagram store.

    Attributes of interest:

      - `raw[j]`: player j's action conjoined with the node domain
      - `lifted[j]`: `ite(turn != j, x_j' = x_j, raw[j] & turn' = j + 1)`
      - `others[j]`: conjunction of `lifted[k]` over k != j
      - `sigma`: the node space
      - `goals[(j, k)]`: recurrence goal k of player j
    """

    def __init__(self, spec, bdd, sigma, raw, moves, goals, observed, names):
        self.spec = spec
        self.table = spec.table
        self.bdd = bdd
        self.sigma = sigma
        self.raw = raw
        self.moves = moves
        self.goals = goals
        self.observed = observed
        self._names = names
        self.stats = {'cpre': 0}
        self._lifted = None
        self._decode_cache = dict()

    # structure

    @property
    def n_players(self):
        return self.table.n_players

    @property
    def players(self):
        return self.table.players

    @property
    def explicit(self):
        return self.spec.explicit

    def turn(self, k):
        return self.bdd.cube(self.table.turn_assignment(k))

    def turn_next(self, k):
        return self.bdd.cube(self.table.turn_assignment(k, primed=True))

    def prime_map(self, j):
        """Unprimed -> primed, for the variables that change when j moves."""
        names = list(self.table.owned[j]) + list(self.table.turn_bits)
        return {x: prime(x) for x in names}

    def unprime_map(self, j):
        return {v: k for k, v in self.prime_map(j).items()}

    def full_prime_map(self):
        names = self.table.variables + list(self.table.turn_bits)
        return {x: prime(x) for x in names}

    def unprimed_names(self):
        return list(self.table.turn_bits) + self.table.variables

    @property
    def lifted(self):
        if self._lifted is None:
            self._lifted = list()
            for j in self.players:
                frame = conj(
                    (self.bdd.var(prime(x)).iff(self.bdd.var(x))
                     for x in self.table.owned[j]), self.bdd)
                mine = self.raw[j] & self.turn_next(self.table.succ(j))
                rho = self.bdd.ite(self.turn(j), mine, frame)
                self._lifted.append(rho)
        return self._lifted

    @property
    def others(self):
        lifted = self.lifted
        return [
            conj((lifted[k] for k in self.players if k != j), self.bdd)
            for j in self.players]

    def restrict(self, coop):
        """Copy of this game with every move kept inside `coop`."""
        moves = list()
        raw = list()
        for j in self.players:
            inside = coop & self.bdd.rename(coop, self.prime_map(j))
            moves.append(self.moves[j] & inside)
            raw.append(self.raw[j] & inside)
        g = GameStructure(
            self.spec, self.bdd, coop & self.sigma, raw, moves,
            {key: p & coop for key, p in self.goals.items()},
            self.observed, self._names)
        g.stats = self.stats
        g.parent = self
        return g

    # predicates and nodes

    def check_node_predicate(self, f):
        primed = {x for x in self.bdd.support(f) if x.endswith("'")}
        if primed:
            raise ValueError(
                f'node predicate mentions primed variables {sorted(primed)}')

    def _projection(self, f, k):
        hidden = [x for x in self.unprimed_names() if x not in self.observed[k]]
        return self.bdd.exist(hidden, f & self.sigma & self.turn(k))

    def count(self, f):
        """Number of nodes in `f` (stale blocks are not counted)."""
        return sum(
            self.bdd.count(self._projection(f, k), self.observed[k])
            for k in self.players)

    def decode(self, f):
        """Set of node ids in `f`."""
        r = self._decode_cache.get(f.node)
        if r is not None:
            return set(r)
        nodes = set()
        for k in self.players:
            proj = self._projection(f, k)
            for assignment in self.bdd.pick_iter(proj, self.observed[k]):
                nodes.add(self._names.name(k, assignment))
        self._decode_cache[f.node] = frozenset(nodes)
        return nodes

    def encode(self, nodes):
        """Predicate of the given node ids (within `sigma`)."""
        u = self.bdd.false
        for v in nodes:
            k, assignment = self._names.key(v)
            u |= self.turn(k) & self.bdd.cube(assignment)
        return u & self.sigma

    def node_ids(self, f=None):
        """Node ids in canonical order (all nodes of `sigma` by default)."""
        if f is None:
            f = self.sigma
        return self._names.sort(self.decode(f))

    def sort(self, nodes):
        return self._names.sort(nodes)

    def owner(self, v):
        return self._names.key(v)[0]

    # images

    def pre_player(self, j, f):
        """Nodes of player j with a move into `f`."""
        pmap = self.prime_map(j)
        fp = self.bdd.rename(f, pmap)
        return self.bdd.and_exist(pmap.values(), self.moves[j], fp)

    def post_player(self, j, f):
        """Nodes reached by one move of player j from `f`."""
        pmap = self.prime_map(j)
        u = self.bdd.and_exist(pmap.keys(), self.moves[j], f)
        return self.bdd.rename(u, self.unprime_map(j))

    def successors(self, v):
        k, _ = self._names.key(v)
        return self.sort(self.decode(self.post_player(k, self.encode([v]))))


class _SymbolicNames:
    """Node ids for games given in the symbolic format: `t<k>:x=0,y=1`."""

    def __init__(self, table):
        self.table = table
        self.vars = table.variables

    def name(self, k, assignment):
        bits = ','.join(f'{x}={int(assignment[x])}' for x in self.vars)
        return f't{k}:{bits}'

    def key(self, v):
        try:
            head, _, tail = v.partition(':')
            k = int(head[1:])
            assignment = dict()
            for item in filter(None, tail.split(',')):
                x, _, b = item.partition('=')
                assignment[x] = bool(int(b))
        except ValueError:
            raise KeyError(v) from None
        if set(assignment) != set(self.vars) or not 0 <= k < self.table.n_players:
            raise KeyError(v)
        return k, assignment

    def sort(self, nodes):
        def order(v):
            k, a = self.key(v)
            return (k, tuple(a[x] for x in self.vars))
        return sorted(nodes, key=order)


class _ExplicitNames:
    def __init__(self, game, codes, blocks):
        self.game = game
        self.codes = codes
        self.blocks = blocks
        self.by_key = dict()
        n = game.n_players
        for v in game.nodes:
            k = game.owner[v]
            block = blocks[(k - 1) % n]
            bits = _bits(codes[v], block)
            self.by_key[(k, tuple(sorted(bits.items())))] = v
        self._keys = {
            v: (game.owner[v], _bits(codes[v], blocks[(game.owner[v] - 1) % n]))
            for v in game.nodes}

    def name(self, k, assignment):
        return self.by_key[(k, tuple(sorted(assignment.items())))]

    def key(self, v):
        k, bits = self._keys[v]
        return k, dict(bits)

    def sort(self, nodes):
        return self.game.sort(nodes)


def _bits(code, block):
    return {x: bool((code >> b) & 1) for b, x in enumerate(block)}


def _cube_text(code, block, primed=False):
    lits = list()
    for b, x in enumerate(block):
        name = prime(x) if primed else x
        lits.append(name if (code >> b) & 1 else '!' + name)
    return '(' + ' & '.join(lits) + ')'


def encode_explicit(game):
    """Encode an `ExplicitGame` into a `GameSpec` over binary blocks."""
    n = game.n_players
    by_owner = {j: [v for v in game.nodes if game.owner[v] == j] for j in range(n)}
    codes = dict()
    for j, vs in by_owner.items():
        for c, v in enumerate(vs):
            codes[v] = c
    blocks = dict()
    owned = dict()
    for m in range(n):
        size = len(by_owner[(m + 1) % n])
        width = max(1, math.ceil(math.log2(size))) if size > 1 else 1
        blocks[m] = [f'x{m}_{b}' for b in range(width)]
        owned[m] = list(blocks[m])
    table = VariableTable(n_players=n, owned=owned)
    # every block holds a valid index for its role
    parts = list()
    for m in range(n):
        vs = by_owner[(m + 1) % n]
        valid = [c for c in range(len(vs))] or [0]
        parts.append(
            '(' + ' | '.join(_cube_text(c, blocks[m]) for c in valid) + ')')
    for k in range(n):
        if not by_owner[k]:
            parts.append(f'!(turn = {k})')
    domain = ' & '.join(parts)
    actions = list()
    for j in range(n):
        cur = blocks[(j - 1) % n]
        terms = list()
        for u, v in sorted(game.edges, key=lambda e: (game.index(e[0]), game.index(e[1]))):
            if game.owner[u] != j:
                continue
            terms.append(
                f'{_cube_text(codes[u], cur)} & {_cube_text(codes[v], blocks[j], True)}')
        text = ' | '.join(f'({t})' for t in terms) if terms else 'false'
        actions.append(RawAction(j, text))
    goals = dict()
    for key, nodes in game.goals.items():
        terms = [
            f'((turn = {game.owner[v]}) & '
            f'{_cube_text(codes[v], blocks[(game.owner[v] - 1) % n])})'
            for v in game.sort(nodes)]
        goals[key] = ' | '.join(terms) if terms else 'false'
    return GameSpec(
        table=table, actions=actions, goals=goals, domain=domain,
        explicit=game, codes=codes, blocks=blocks)


def build_game(spec, max_nodes=None):
    """Lift the raw actions of `spec` into a `GameStructure`."""
    if max_nodes is None:
        max_nodes = _env_int('NESTGR1_MAX_BDD_NODES', DEFAULT_MAX_NODES)
    table = spec.table
    if len(spec.actions) != table.n_players or sorted(
            a.player for a in spec.actions) != list(table.players):
        raise SpecError('exactly one action per player is required')
    bdd = BDD(max_nodes=max_nodes)
    bdd.declare(*table.ordered_names())
    turn_ok = disj(
        (bdd.cube(table.turn_assignment(k)) for k in table.players), bdd)
    domain = parse_formula(spec.domain, table, bdd, mode='node')
    sigma = turn_ok & domain
    if spec.explicit is not None:
        n = table.n_players
        observed = {
            k: list(spec.blocks[(k - 1) % n]) for k in table.players}
        names = _ExplicitNames(spec.explicit, spec.codes, spec.blocks)
    else:
        observed = {k: table.variables for k in table.players}
        names = _SymbolicNames(table)
    raw = list()
    moves = list()
    for a in sorted(spec.actions, key=lambda a: a.player):
        j = a.player
        rho_hat = parse_formula(a.formula, table, bdd, mode='action', player=j)
        pmap = {x: prime(x) for x in list(table.owned[j]) + list(table.turn_bits)}
        sigma_next = bdd.rename(sigma, pmap)
        rho_hat &= domain & bdd.rename(domain, pmap)
        raw.append(rho_hat)
        m = (bdd.cube(table.turn_assignment(j)) & sigma & rho_hat
             & bdd.cube(table.turn_assignment(table.succ(j), primed=True))
             & sigma_next)
        moves.append(m)
    goals = {
        key: parse_formula(text, table, bdd, mode='node') & sigma
        for key, text in spec.goals.items()}
    return GameStructure(spec, bdd, sigma, raw, moves, goals, observed, names)


def game_from_explicit(xgame, max_nodes=None):
    return build_game(encode_explicit(xgame), max_nodes=max_nodes)


def expand_explicit(g, limit=None):
    """Enumerate the nodes, edges and goals of `g` as an `ExplicitGame`."""
    if limit is None:
        limit = _env_int('NESTGR1_MAX_NODES', DEFAULT_EXPAND_LIMIT)
    total = g.count(g.sigma)
    if total > limit:
        raise CeilingError(
            f'game has {total} nodes, above the expansion ceiling {limit}')
    nodes = g.node_ids()
    owner = {v: g.owner(v) for v in nodes}
    edges = set()
    for j in g.players:
        mine = g.sigma & g.turn(j)
        if mine.is_false:
            continue
        for u in nodes:
            if owner[u] != j:
                continue
            for v in g.successors(u):
                edges.add((u, v))
    goals = {key: g.decode(p) for key, p in g.goals.items()}
    return ExplicitGame(
        nodes=nodes, owner=owner, edges=edges, goals=goals,
        n_players=g.n_players)
