"""Explicit-state reference solver.

Everything here works on plain Python sets over an `ExplicitGame` and is
meant for small graphs: it is the independent check for the symbolic
side, and it runs the exhaustive searches over candidate assumptions.

Realizability uses the strict-implication reading of GR(1): a move
outside a player's allowed edges loses for that player immediately. So
the guarantor never takes a disallowed edge, a guarantor node without
an allowed move is lost, and an opponent node without an allowed move is
won by the guarantor.
"""
import itertools
import logging
from dataclasses import dataclass, field

import networkx as nx


logger = logging.getLogger(__name__)

MAX_SEARCH_NODES = 24
MAX_SEARCH_EDGES = 20


class OracleCeilingError(RuntimeError):
    """A search is too large to enumerate."""


class OracleGame:
    """An `ExplicitGame` with forward and backward adjacency."""

    def __init__(self, game, edges=None):
        self.game = game
        self.nodes = game.sort(game.nodes)
        self.owner = dict(game.owner)
        self.n_players = game.n_players
        self.edges = set(game.edges if edges is None else edges)
        self.succ = {v: set() for v in self.nodes}
        self.pred = {v: set() for v in self.nodes}
        for u, v in self.edges:
            self.succ[u].add(v)
            self.pred[v].add(u)

    def with_edges(self, edges):
        return OracleGame(self.game, edges)

    def player_edges(self, j):
        return {(u, v) for (u, v) in self.edges if self.owner[u] == j}

    def check(self, nodes):
        unknown = set(nodes) - set(self.nodes)
        if unknown:
            raise KeyError(f'unknown nodes {sorted(unknown)}')
        return set(nodes)

    def members(self, j):
        if j is None:
            return set(range(self.n_players))
        if isinstance(j, int):
            return {j}
        return set(j)

    def goals(self):
        """Mapping player -> list of goal sets, all nodes for none."""
        out = dict()
        for j in range(self.n_players):
            mine = self.game.player_goals(j)
            out[j] = mine or [set(self.nodes)]
        return out


# operators

def pre(og, j, f):
    f = og.check(f)
    movers = og.members(j)
    return {u for u in og.nodes if og.owner[u] in movers and og.succ[u] & f}


def pre_star(og, f):
    seen = og.check(f)
    frontier = list(seen)
    while frontier:
        v = frontier.pop()
        for u in og.pred[v]:
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    return seen


def cpre(og, j, f):
    f = og.check(f)
    movers = og.members(j)
    out = set()
    for u in og.nodes:
        if og.owner[u] in movers:
            if og.succ[u] & f:
                out.add(u)
        elif og.succ[u] <= f:
            out.add(u)
    return out


def attr(og, j, f):
    x = og.check(f)
    while True:
        y = x | cpre(og, j, x)
        if y == x:
            return x
        x = y


def trap(og, j, s, e):
    s = og.check(s)
    e = og.check(e)
    x = set(og.nodes)
    while True:
        y = e | (cpre(og, j, x) & s)
        if y == x:
            return x
        x = y


def _goal_sccs(og, goal_sets):
    graph = nx.DiGraph()
    graph.add_nodes_from(og.nodes)
    graph.add_edges_from(og.edges)
    good = set()
    for comp in nx.strongly_connected_components(graph):
        if len(comp) == 1:
            (v,) = comp
            if not graph.has_edge(v, v):
                continue
        if all(comp & g for g in goal_sets):
            good |= comp
    return good


def coop_explicit(og, goals=None):
    """Nodes with an infinite play visiting every goal set infinitely
    often: those that reach a cycle-carrying strongly connected component
    meeting every goal set."""
    if goals is None:
        goals = og.goals()
    goal_sets = [set(s) for j in sorted(goals) for s in goals[j]]
    return pre_star(og, _goal_sccs(og, goal_sets))


# realizability

@dataclass
class RealizabilityQuery:
    """Player `player` guarantees `[]<>R` for every R in `guarantees`
    provided the others satisfy `[]<>A` for every A in `assumptions`.

    `sys_edges` and `env_edges` bound the allowed moves (all edges of the
    respective side when None). With `quantifier='cooperative'` the
    question is joint satisfiability instead.
    """

    player: int
    guarantees: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)
    sys_edges: set = None
    env_edges: set = None
    quantifier: str = 'realizable'
    from_nodes: set = None


def _allowed(og, q):
    allowed = dict()
    for u in og.nodes:
        mine = og.owner[u] == q.player
        bound = q.sys_edges if mine else q.env_edges
        allowed[u] = {
            v for v in og.succ[u] if bound is None or (u, v) in bound}
    return allowed


def _cpre_allowed(og, q, allowed, f):
    out = set()
    for u in og.nodes:
        if og.owner[u] == q.player:
            if allowed[u] & f:
                out.add(u)
        elif allowed[u] <= f:
            out.add(u)
    return out


def winning_set(og, q):
    """Nodes from which `q.player` wins the query."""
    if q.quantifier == 'cooperative':
        edges = {
            (u, v) for u, vs in _allowed(og, q).items() for v in vs}
        return coop_explicit(
            og.with_edges(edges),
            {0: [set(s) for s in q.guarantees + q.assumptions]
                or [set(og.nodes)]})
    if q.quantifier != 'realizable':
        raise ValueError(f'unknown quantifier {q.quantifier!r}')
    allowed = _allowed(og, q)
    everything = set(og.nodes)
    guarantees = [og.check(r) for r in q.guarantees] or [everything]
    assumptions = [og.check(a) for a in q.assumptions] or [everything]

    def cp(f):
        return _cpre_allowed(og, q, allowed, f)

    z = set(everything)
    while True:
        z_new = set(everything)
        for r in guarantees:
            reach = r & cp(z)
            y = set()
            while True:
                base = reach | cp(y)
                y_new = set()
                for a in assumptions:
                    x = set(everything)
                    while True:
                        x_next = base | ((everything - a) & cp(x))
                        if x_next == x:
                            break
                        x = x_next
                    y_new |= x
                if y_new == y:
                    break
                y = y_new
            z_new &= y
        if z_new == z:
            return z
        z = z_new


def gr1_realizable(og, q):
    """True if `q.player` wins from every node of `q.from_nodes`
    (every node by default)."""
    nodes = set(og.nodes) if q.from_nodes is None else og.check(q.from_nodes)
    return nodes <= winning_set(og, q)


def memoryless_winning_set(og, q, max_nodes=10):
    """Winning set by enumerating every memoryless opponent strategy.

    Independent of `winning_set`: the opponent's objective is a Rabin
    condition, so memoryless opponent strategies suffice, and each one
    leaves a one-player graph that is decided by reachability and
    strongly connected components. Supports at most one assumption.
    """
    if len(og.nodes) > max_nodes:
        raise OracleCeilingError(f'more than {max_nodes} nodes')
    if len(q.assumptions) > 1:
        raise ValueError('at most one assumption is supported')
    allowed = _allowed(og, q)
    everything = set(og.nodes)
    guarantees = [set(r) for r in q.guarantees] or [everything]
    assumption = set(q.assumptions[0]) if q.assumptions else everything
    theirs = [u for u in og.nodes if og.owner[u] != q.player]
    stuck = {u for u in theirs if not allowed[u]}
    choosers = [u for u in theirs if allowed[u]]
    options = [sorted(allowed[u], key=og.game.index) for u in choosers]
    won = set(everything)
    for pick in itertools.product(*options):
        choice = dict(zip(choosers, pick))
        graph = nx.DiGraph()
        graph.add_nodes_from(og.nodes)
        for u in og.nodes:
            if u in choice:
                graph.add_edge(u, choice[u])
            elif og.owner[u] == q.player:
                graph.add_edges_from((u, v) for v in allowed[u])
        good = set(stuck)
        for comp in nx.strongly_connected_components(graph):
            cyclic = len(comp) > 1 or graph.has_edge(*(2 * tuple(comp)))
            if cyclic and all(comp & r for r in guarantees):
                good |= comp
        # a cycle that avoids the assumption set forever
        free = graph.subgraph(everything - assumption)
        for comp in nx.strongly_connected_components(free):
            cyclic = len(comp) > 1 or free.has_edge(*(2 * tuple(comp)))
            if cyclic:
                good |= comp
        reach = set(good)
        for v in good:
            reach |= nx.ancestors(graph, v)
        won &= reach
    return won


# searches

def _subsets(items):
    for mask in range(1 << len(items)):
        yield {items[k] for k in range(len(items)) if (mask >> k) & 1}


def search_node_assumptions(og, goals, player, from_nodes=None):
    """Every node set P such that the other side realizes `[]<>P`
    unconditionally and `player` realizes `goals` assuming `[]<>P`, both
    from every node of `from_nodes` (all nodes by default).

    Candidates are enumerated in binary-counter order over the sorted
    node ids.
    """
    if len(og.nodes) > MAX_SEARCH_NODES:
        raise OracleCeilingError(
            f'{len(og.nodes)} nodes exceed the search ceiling {MAX_SEARCH_NODES}')
    if og.n_players != 2:
        raise ValueError('assumption search needs a two-player game')
    other = 1 - player
    found = list()
    for p in _subsets(og.nodes):
        env = RealizabilityQuery(
            player=other, guarantees=[p], from_nodes=from_nodes)
        if not gr1_realizable(og, env):
            continue
        sys = RealizabilityQuery(
            player=player, guarantees=[set(r) for r in goals],
            assumptions=[p], from_nodes=from_nodes)
        if gr1_realizable(og, sys):
            found.append(p)
    return found


def search_safety_restrictions(og, player=1, goals=None):
    """Every proper subset of `player`'s edges under which all goals
    remain jointly satisfiable from some node."""
    mine = sorted(
        og.player_edges(player),
        key=lambda e: (og.game.index(e[0]), og.game.index(e[1])))
    if len(mine) > MAX_SEARCH_EDGES:
        raise OracleCeilingError(
            f'{len(mine)} edges exceed the search ceiling {MAX_SEARCH_EDGES}')
    if goals is None:
        goals = og.goals()
    rest = og.edges - set(mine)
    found = list()
    for subset in _subsets(mine):
        if len(subset) == len(mine):
            continue
        if coop_explicit(og.with_edges(rest | subset), goals):
            found.append(subset)
    return found
