"""Vocabulary shared by all modules, and the textual game formats.

Two line-oriented formats are read and written here.

Explicit graph (`.xg`)::

    # comment
    player 0 nodes: s1 s3 s5
    player 1 nodes: s0 s2 s4 s6
    edge s0 s1
    goal 0 0: s6

Symbolic game (`.sg`)::

    owns 0: x y
    owns 1: z
    action 0: x' <-> !z
    action 1: z' <-> x
    goal 0 0: x & turn = 0

Formulas use identifiers, a postfix prime, `true`, `false`, and the
operators `!`, `&`, `|`, `->`, `<->` (in decreasing binding strength;
`->` associates to the right). The atom `turn = k` is allowed in node
predicates only.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import NamedTuple

from nestgr1.bdd import Predicate


TURN_PREFIX = '_turn'


class SpecError(ValueError):
    """Malformed specification text or an invalid game description."""


class FormulaSyntaxError(SpecError):
    def __init__(self, message, text, pos):
        super().__init__(f'{message} at position {pos}: {text!r}')
        self.pos = pos


def prime(name):
    return name + "'"


@dataclass(frozen=True)
class VariableTable:
    """Players, variable ownership and the turn-variable encoding."""

    n_players: int
    owned: dict
    turn_bits: tuple = ()

    def __post_init__(self):
        if self.n_players < 2:
            raise SpecError('a game needs at least two players')
        if set(self.owned) != set(range(self.n_players)):
            raise SpecError(
                f'ownership must list players 0..{self.n_players - 1}')
        seen = dict()
        for j in range(self.n_players):
            for name in self.owned[j]:
                if name in seen:
                    raise SpecError(
                        f'variable {name!r} owned by players '
                        f'{seen[name]} and {j}')
                if name.startswith(TURN_PREFIX) or name.endswith("'"):
                    raise SpecError(f'reserved variable name {name!r}')
                seen[name] = j
        if not self.turn_bits:
            k = max(1, math.ceil(math.log2(self.n_players)))
            object.__setattr__(
                self, 'turn_bits',
                tuple(f'{TURN_PREFIX}{b}' for b in range(k)))

    @property
    def players(self):
        return range(self.n_players)

    @property
    def variables(self):
        return [x for j in self.players for x in self.owned[j]]

    def owner_of(self, name):
        for j in self.players:
            if name in self.owned[j]:
                return j
        raise KeyError(name)

    def succ(self, j, k=1):
        return (j + k) % self.n_players

    def ordered_names(self):
        """Declaration order: turn bits, then each player's block, with
        every primed variable adjacent to its unprimed partner."""
        names = list()
        for b in self.turn_bits:
            names.extend((b, prime(b)))
        for j in self.players:
            for x in self.owned[j]:
                names.extend((x, prime(x)))
        return names

    def turn_assignment(self, k, primed=False):
        bits = dict()
        for b, name in enumerate(self.turn_bits):
            if primed:
                name = prime(name)
            bits[name] = bool((k >> b) & 1)
        return bits


@dataclass
class RawAction:
    """Player `player` moves along `formula`, a relation over unprimed
    variables of everyone and primed variables of `player` only."""

    player: int
    formula: str


class Assumption(NamedTuple):
    """Recurrence assumption []<>(trap -> attr)."""

    trap: Predicate
    attr: Predicate

    @property
    def predicate(self):
        return ~self.trap | self.attr


@dataclass
class Gr1Objective:
    """Strict-implication GR(1) objective for one player."""

    player: int
    env_safety: Predicate
    env_recurrences: list
    sys_safety: Predicate
    sys_recurrences: list


@dataclass
class GameStackEntry:
    """One nested game: `player` forces `region` into `target`,
    assuming the listed recurrences of the other players."""

    player: object
    region: Predicate
    target: Predicate
    assumptions: list = field(default_factory=list)


@dataclass
class NestedContract:
    """Per (player, goal index) stacks of nested games.

    Entry 0 of each stack targets the original recurrence goal; entry
    k + 1 targets the goal set of entry k.
    """

    stacks: dict
    rho_c: Predicate


@dataclass
class ExplicitGame:
    """Enumerated turn-based game graph."""

    nodes: list
    owner: dict
    edges: set
    goals: dict = field(default_factory=dict)
    n_players: int = 2

    def __post_init__(self):
        self.validate()

    def validate(self):
        if len(set(self.nodes)) != len(self.nodes):
            raise SpecError('duplicate node id')
        known = set(self.nodes)
        if set(self.owner) != known:
            raise SpecError('every node needs exactly one owner')
        for v, j in self.owner.items():
            if not 0 <= j < self.n_players:
                raise SpecError(f'node {v!r} owned by unknown player {j}')
        for u, v in self.edges:
            if u not in known or v not in known:
                raise SpecError(f'edge ({u}, {v}) mentions an unknown node')
            if self.owner[v] != (self.owner[u] + 1) % self.n_players:
                raise SpecError(
                    f'edge ({u}, {v}) breaks turn alternation: owners '
                    f'{self.owner[u]} -> {self.owner[v]}')
        for (j, k), nodes in self.goals.items():
            if not 0 <= j < self.n_players:
                raise SpecError(f'goal for unknown player {j}')
            if not set(nodes) <= known:
                raise SpecError(f'goal {j} {k} mentions an unknown node')
        for j in range(self.n_players):
            ks = sorted(k for (p, k) in self.goals if p == j)
            if ks != list(range(len(ks))):
                raise SpecError(f'goal indices of player {j} must be 0..N-1')

    def successors(self, u):
        return sorted((v for (w, v) in self.edges if w == u), key=self.index)

    def predecessors(self, v):
        return sorted((u for (u, w) in self.edges if w == v), key=self.index)

    def index(self, v):
        """Position of `v` in natural id order (`s2` before `s10`)."""
        if not hasattr(self, '_index') or len(self._index) != len(self.nodes):
            ranked = sorted(self.nodes, key=natural_key)
            self._index = {w: k for k, w in enumerate(ranked)}
        return self._index[v]

    def sort(self, nodes):
        return sorted(nodes, key=self.index)

    def player_goals(self, j):
        n = sum(1 for (p, _) in self.goals if p == j)
        return [set(self.goals[(j, k)]) for k in range(n)]

    def isomorphic_to(self, other, mapping=None):
        """Equality under a node renaming (identity by default)."""
        if mapping is None:
            mapping = {v: v for v in self.nodes}
        if set(mapping) != set(self.nodes):
            return False
        if set(mapping.values()) != set(other.nodes):
            return False
        if any(self.owner[v] != other.owner[mapping[v]] for v in self.nodes):
            return False
        if {(mapping[u], mapping[v]) for u, v in self.edges} != set(other.edges):
            return False
        mine = {k: {mapping[v] for v in vs} for k, vs in self.goals.items()}
        theirs = {k: set(vs) for k, vs in other.goals.items()}
        return mine == theirs


def natural_key(name):
    parts = re.split(r'(\d+)', str(name))
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p)


# formulas

_TOKEN = re.compile(
    r"\s*(?:(?P<iff><->)|(?P<implies>->)|(?P<op>[!&|()'=])"
    r"|(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_.]*))")


def _tokenize(text):
    pos = 0
    tokens = list()
    while pos < len(text):
        if text[pos:].strip() == '':
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaSyntaxError('unexpected character', text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        value = m.group(kind)
        if kind in ('iff', 'implies'):
            kind = 'op'
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(('end', None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def take(self, value=None):
        tok = self.tokens[self.k]
        if value is not None and tok[1] != value:
            raise FormulaSyntaxError(
                f'expected {value!r}, found {tok[1]!r}', self.text, tok[2])
        self.k += 1
        return tok

    def parse(self):
        tree = self.iff()
        tok = self.peek()
        if tok[0] != 'end':
            raise FormulaSyntaxError(
                f'unexpected {tok[1]!r}', self.text, tok[2])
        return tree

    def iff(self):
        left = self.implies()
        while self.peek()[1] == '<->':
            self.take()
            left = ('<->', left, self.implies())
        return left

    def implies(self):
        left = self.disj()
        if self.peek()[1] == '->':
            self.take()
            return ('->', left, self.implies())
        return left

    def disj(self):
        left = self.conj()
        while self.peek()[1] == '|':
            self.take()
            left = ('|', left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek()[1] == '&':
            self.take()
            left = ('&', left, self.unary())
        return left

    def unary(self):
        if self.peek()[1] == '!':
            self.take()
            return ('!', self.unary())
        return self.atom()

    def atom(self):
        kind, value, pos = self.peek()
        if value == '(':
            self.take()
            tree = self.iff()
            self.take(')')
            return tree
        if kind != 'ident':
            raise FormulaSyntaxError(
                f'expected an operand, found {value!r}', self.text, pos)
        self.take()
        if value == 'true':
            return ('const', True)
        if value == 'false':
            return ('const', False)
        if value == 'turn' and self.peek()[1] == '=':
            self.take()
            kind, num, npos = self.take()
            if kind != 'num':
                raise FormulaSyntaxError(
                    'expected a player index after "turn ="', self.text, npos)
            return ('turn', int(num))
        primed = False
        if self.peek()[1] == "'":
            self.take()
            primed = True
        return ('var', value, primed, pos)


def parse_expr(text):
    """Parse formula text into a syntax tree of tuples."""
    return _Parser(text).parse()


def check_expr(tree, table, mode='node', player=None, text=''):
    """Validate a tree against `table`.

    `mode='node'` forbids primed variables; `mode='action'` forbids the
    turn atom and priming any variable not owned by `player`.
    """
    kind = tree[0]
    if kind == 'const':
        return
    if kind == 'turn':
        if mode != 'node':
            raise SpecError('"turn = k" is not allowed in actions')
        if not 0 <= tree[1] < table.n_players:
            raise SpecError(f'turn value {tree[1]} is not a player index')
        return
    if kind == 'var':
        _, name, primed, pos = tree
        try:
            owner = table.owner_of(name)
        except KeyError:
            raise SpecError(
                f'undeclared variable {name!r} at position {pos}: {text!r}'
            ) from None
        if primed and mode == 'node':
            raise SpecError(
                f'primed variable {name!r} in a node predicate: {text!r}')
        if primed and player is not None and owner != player:
            raise SpecError(
                f'player {player} primes variable {name!r} of player {owner}')
        return
    for sub in tree[1:]:
        check_expr(sub, table, mode, player, text)


def to_predicate(tree, bdd, table):
    kind = tree[0]
    if kind == 'const':
        return bdd.true if tree[1] else bdd.false
    if kind == 'turn':
        return bdd.cube(table.turn_assignment(tree[1]))
    if kind == 'var':
        _, name, primed, _ = tree
        return bdd.var(prime(name) if primed else name)
    if kind == '!':
        return ~to_predicate(tree[1], bdd, table)
    a = to_predicate(tree[1], bdd, table)
    b = to_predicate(tree[2], bdd, table)
    if kind == '&':
        return a & b
    if kind == '|':
        return a | b
    if kind == '->':
        return a.implies(b)
    if kind == '<->':
        return a.iff(b)
    raise AssertionError(kind)


_PRECEDENCE = {'<->': 1, '->': 2, '|': 3, '&': 4}


def format_expr(tree, parent=0):
    """Canonical text; `parse_expr(format_expr(t)) == t` up to positions."""
    kind = tree[0]
    if kind == 'const':
        return 'true' if tree[1] else 'false'
    if kind == 'turn':
        s = f'turn = {tree[1]}'
        return f'({s})' if parent else s
    if kind == 'var':
        return tree[1] + ("'" if tree[2] else '')
    if kind == '!':
        return '!' + format_expr(tree[1], 5)
    prec = _PRECEDENCE[kind]
    if kind == '->':
        s = f'{format_expr(tree[1], prec + 1)} -> {format_expr(tree[2], prec)}'
    else:
        s = f'{format_expr(tree[1], prec)} {kind} {format_expr(tree[2], prec + 1)}'
    return f'({s})' if prec < parent else s


def strip_positions(tree):
    if tree[0] == 'var':
        return tree[:3]
    if tree[0] in ('const', 'turn'):
        return tree
    return (tree[0],) + tuple(strip_positions(t) for t in tree[1:])


def parse_formula(text, table, bdd, mode='node', player=None):
    """Parse, validate and compile formula text to a `Predicate`."""
    tree = parse_expr(text)
    check_expr(tree, table, mode, player, text)
    return to_predicate(tree, bdd, table)


# game files

@dataclass
class GameSpec:
    """Parsed symbolic game: table, raw actions, goal formulas."""

    table: VariableTable
    actions: list
    goals: dict
    domain: str = 'true'
    explicit: ExplicitGame = None
    # explicit graphs only: node -> index, and player -> block variables
    codes: dict = None
    blocks: dict = None


def _lines(text):
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if line:
            yield lineno, line


_GOAL = re.compile(r'goal\s+(\d+)\s+(\d+)\s*:(.*)$')


def parse_xg(text):
    """Parse the explicit graph format into an `ExplicitGame`."""
    nodes = list()
    owner = dict()
    edges = set()
    goals = dict()
    players = set()
    for lineno, line in _lines(text):
        head = line.split()[0]
        if head == 'player':
            m = re.match(r'player\s+(\d+)\s+nodes\s*:(.*)$', line)
            if m is None:
                raise SpecError(f'line {lineno}: malformed player line')
            j = int(m.group(1))
            players.add(j)
            for v in m.group(2).split():
                if v in owner:
                    raise SpecError(
                        f'line {lineno}: node {v!r} has two owners')
                owner[v] = j
                nodes.append(v)
        elif head == 'edge':
            parts = line.split()
            if len(parts) != 3:
                raise SpecError(f'line {lineno}: expected "edge <u> <v>"')
            edges.add((parts[1], parts[2]))
        elif head == 'goal':
            m = _GOAL.match(line)
            if m is None:
                raise SpecError(f'line {lineno}: malformed goal line')
            key = (int(m.group(1)), int(m.group(2)))
            if key in goals:
                raise SpecError(f'line {lineno}: duplicate goal {key}')
            goals[key] = set(m.group(3).split())
        else:
            raise SpecError(f'line {lineno}: unknown directive {head!r}')
    goal_players = {j for j, _ in goals}
    n = max(players | goal_players | {1}) + 1
    if goal_players - players:
        raise SpecError(
            f'goal for unknown player {min(goal_players - players)}')
    return ExplicitGame(
        nodes=nodes, owner=owner, edges=edges, goals=goals, n_players=n)


def format_xg(game):
    lines = list()
    for j in range(game.n_players):
        ids = ' '.join(v for v in game.nodes if game.owner[v] == j)
        lines.append(f'player {j} nodes: {ids}'.rstrip())
    for u, v in sorted(game.edges, key=lambda e: (game.index(e[0]), game.index(e[1]))):
        lines.append(f'edge {u} {v}')
    for (j, k) in sorted(game.goals):
        ids = ' '.join(game.sort(game.goals[(j, k)]))
        lines.append(f'goal {j} {k}: {ids}'.rstrip())
    return '\n'.join(lines) + '\n'


def parse_sg(text):
    """Parse the symbolic game format into a `GameSpec`."""
    owned = dict()
    actions = dict()
    goal_text = dict()
    for lineno, line in _lines(text):
        head = line.split()[0]
        if head == 'owns':
            m = re.match(r'owns\s+(\d+)\s*:(.*)$', line)
            if m is None:
                raise SpecError(f'line {lineno}: malformed owns line')
            j = int(m.group(1))
            if j in owned:
                raise SpecError(f'line {lineno}: player {j} declared twice')
            owned[j] = m.group(2).split()
        elif head == 'action':
            m = re.match(r'action\s+(\d+)\s*:(.*)$', line)
            if m is None:
                raise SpecError(f'line {lineno}: malformed action line')
            j = int(m.group(1))
            if j in actions:
                raise SpecError(f'line {lineno}: second action for player {j}')
            actions[j] = m.group(2).strip()
        elif head == 'goal':
            m = _GOAL.match(line)
            if m is None:
                raise SpecError(f'line {lineno}: malformed goal line')
            key = (int(m.group(1)), int(m.group(2)))
            if key in goal_text:
                raise SpecError(f'line {lineno}: duplicate goal {key}')
            goal_text[key] = m.group(3).strip()
        else:
            raise SpecError(f'line {lineno}: unknown directive {head!r}')
    n = max(list(owned) + list(actions) + [j for j, _ in goal_text] + [1]) + 1
    for j in range(n):
        owned.setdefault(j, [])
    table = VariableTable(n_players=n, owned=owned)
    raw = list()
    for j in range(n):
        text_j = actions.get(j, 'true')
        check_expr(parse_expr(text_j), table, 'action', j, text_j)
        raw.append(RawAction(j, text_j))
    for (j, k), ftext in goal_text.items():
        check_expr(parse_expr(ftext), table, 'node', None, ftext)
    for j in range(n):
        ks = sorted(k for (p, k) in goal_text if p == j)
        if ks != list(range(len(ks))):
            raise SpecError(f'goal indices of player {j} must be 0..N-1')
    return GameSpec(table=table, actions=raw, goals=goal_text)


def format_sg(spec):
    lines = list()
    table = spec.table
    for j in table.players:
        lines.append(f'owns {j}: {" ".join(table.owned[j])}'.rstrip())
    for a in spec.actions:
        lines.append(f'action {a.player}: {format_expr(parse_expr(a.formula))}')
    for (j, k) in sorted(spec.goals):
        lines.append(f'goal {j} {k}: {format_expr(parse_expr(spec.goals[(j, k)]))}')
    return '\n'.join(lines) + '\n'


def detect_format(text):
    for _, line in _lines(text):
        head = line.split()[0]
        if head in ('player', 'edge'):
            return 'xg'
        if head in ('owns', 'action'):
            return 'sg'
    return 'xg'


def parse_game_spec(text, fmt=None):
    """Parse either file format into a `GameSpec`.

    Explicit graphs are encoded into Boolean variables by
    `nestgr1.game.encode_explicit`; the original graph is kept in
    `GameSpec.explicit`.
    """
    if fmt is None:
        fmt = detect_format(text)
    if fmt == 'sg':
        return parse_sg(text)
    if fmt == 'xg':
        from nestgr1.game import encode_explicit
        return encode_explicit(parse_xg(text))
    raise SpecError(f'unknown format {fmt!r}')
