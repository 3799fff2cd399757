"""Recurrence assumptions and nested game stacks.

For each recurrence goal of a player, `game_stack` builds a sequence of
sub-games. The first one drives the play into the goal itself; each
following one, played by the other side, drives the play into the goal
set of the game before it. Inside every sub-game only unconditional
assumptions `[]<>(trap -> attr)` are made, so no liveness assumption
ever depends on another one.
"""
import json
import logging
from dataclasses import dataclass, field

from nestgr1.closure import (
    UnsatisfiableGoals, coop, objectives, player_goals, restrict_and_augment)
from nestgr1.ops import attr, trap
from nestgr1.spec import Assumption, GameStackEntry, NestedContract


logger = logging.getLogger(__name__)


class StackError(RuntimeError):
    """The stack construction failed to make progress."""


@dataclass
class AssumptionStep:
    """One round of the assumption loop for player `player`."""

    player: object
    goal: object
    attr: object
    escape: object
    trap: object
    attr_rings: list = field(default_factory=list)
    escape_rings: list = field(default_factory=list)

    @property
    def assumption(self):
        return ~self.trap | self.attr


@dataclass
class StackEntryDetail:
    """Bookkeeping kept next to each `GameStackEntry` for the runtime."""

    depth: int
    steps: list


@dataclass
class SynthesisReport:
    contracts: list
    stacks: NestedContract
    cpre_calls: int
    diagnostics: list
    coop: object = None
    game: object = None
    details: dict = field(default_factory=dict)
    stack_cpre: dict = field(default_factory=dict)

    @property
    def depth(self):
        return max((len(s) for s in self.stacks.stacks.values()), default=0)


def opponent(g, j):
    """The other side of `j`: the remaining coalition, or the single
    player left when `j` is itself a coalition."""
    if isinstance(j, int):
        rest = tuple(k for k in g.players if k != j)
        return rest[0] if len(rest) == 1 else rest
    rest = [k for k in g.players if k not in j]
    if len(rest) != 1:
        raise ValueError(f'coalition {j} must leave exactly one player')
    return rest[0]


def unconditional_assumption(g, j, goal):
    if goal.is_false:
        raise ValueError('goal is empty')
    rings_a = list()
    rings_b = list()
    a = attr(g, j, goal, rings=rings_a)
    b = attr(g, opponent(g, j), a, rings=rings_b)
    r = ~a & b & trap(g, j, b, a)
    return AssumptionStep(
        player=j, goal=goal, attr=a, escape=b, trap=r,
        attr_rings=rings_a, escape_rings=rings_b)


def game_stack(g, j, target, uncovered, diagnostics=None, limit=None):
    """Stack of sub-games covering `uncovered`, for reaching `target`.

    Returns `(entries, details)`; entry 0 targets `target` and each later
    entry targets the goal set of the previous one. `g` must already be
    restricted to the cooperative winning set.
    """
    if diagnostics is None:
        diagnostics = list()
    if limit is None:
        limit = g.count(g.sigma)
    entries = list()
    details = list()
    player = j
    G = target
    depth = 0
    while True:
        if depth > limit:
            raise StackError(f'stack deeper than {limit} games')
        goal = G
        assumptions = list()
        steps = list()
        while True:
            step = unconditional_assumption(g, player, goal)
            steps.append(step)
            goal = step.attr | step.trap
            if step.trap.is_false:
                break
            assumptions.append(Assumption(trap=step.trap, attr=step.attr))
        if not assumptions:
            diagnostics.append(dict(
                kind='empty-trap', depth=depth, player=_player_json(player),
                nodes=g.sort(g.decode(goal))))
        entries.append(GameStackEntry(
            player=player, region=goal & ~G, target=G,
            assumptions=assumptions))
        details.append(StackEntryDetail(depth=depth, steps=steps))
        before = uncovered
        uncovered = uncovered & ~goal
        if uncovered.is_false:
            break
        if depth > 0 and uncovered == before:
            raise StackError('nested game did not cover any new node')
        player = opponent(g, player)
        G = goal
        depth += 1
    return entries, details


def synthesize(g, schedule='flat'):
    """Cooperative winning set, restriction, then one stack per goal."""
    diagnostics = list()
    start = g.stats['cpre']
    result = coop(g, schedule)
    contracts = objectives(g)
    try:
        h, contracts = restrict_and_augment(g, result, contracts)
    except UnsatisfiableGoals as e:
        diagnostics.append(dict(kind='unsatisfiable-goals', message=str(e)))
        return SynthesisReport(
            contracts=contracts,
            stacks=NestedContract(stacks=dict(), rho_c=result.rho_c),
            cpre_calls=g.stats['cpre'] - start, diagnostics=diagnostics,
            coop=result, game=g)
    goals = player_goals(h)
    stacks = dict()
    details = dict()
    stack_cpre = dict()
    for j in h.players:
        for k, G in enumerate(goals[j]):
            before = h.stats['cpre']
            entries, info = game_stack(
                h, j, G, result.coop, diagnostics=diagnostics)
            stacks[(j, k)] = entries
            details[(j, k)] = info
            stack_cpre[(j, k)] = h.stats['cpre'] - before
            diagnostics.append(dict(
                kind='depth', player=j, goal=k, depth=len(entries)))
    for c in contracts:
        c.env_recurrences = [
            a for entries in stacks.values() for e in entries
            if e.player == c.player for a in e.assumptions]
    return SynthesisReport(
        contracts=contracts,
        stacks=NestedContract(stacks=stacks, rho_c=result.rho_c),
        cpre_calls=g.stats['cpre'] - start, diagnostics=diagnostics,
        coop=result, game=h, details=details, stack_cpre=stack_cpre)


# serialization

def _player_json(p):
    return p if isinstance(p, int) else list(p)


def _nodes(g, f):
    return g.sort(g.decode(f))


def report_to_dict(report):
    g = report.game
    out = dict()
    coop_nodes = _nodes(g, report.coop.coop)
    out['contracts'] = [
        dict(
            player=c.player,
            env_safety=len(coop_nodes),
            assumptions=[
                dict(trap=_nodes(g, a.trap), attr=_nodes(g, a.attr))
                for a in c.env_recurrences])
        for c in report.contracts]
    stacks = list()
    for (j, k), entries in sorted(report.stacks.stacks.items()):
        details = report.details.get((j, k), [])
        rows = list()
        for d, e in enumerate(entries):
            rows.append(dict(
                depth=d, player=_player_json(e.player),
                region=_nodes(g, e.region), target=_nodes(g, e.target),
                assumptions=[
                    dict(
                        trap=_nodes(g, a.trap), attr=_nodes(g, a.attr),
                        formula=assumption_text(g, a))
                    for a in e.assumptions],
                rounds=[
                    dict(
                        attr=_nodes(g, s.attr), escape=_nodes(g, s.escape),
                        trap=_nodes(g, s.trap))
                    for s in (details[d].steps if d < len(details) else [])]))
        stacks.append(dict(player=j, goal=k, entries=rows))
    out['stacks'] = stacks
    out['stats'] = dict(
        cpre_calls=report.cpre_calls, depth=report.depth,
        coop_nodes=len(coop_nodes))
    out['diagnostics'] = report.diagnostics
    return out


def _disj_text(nodes):
    if not nodes:
        return 'false'
    if len(nodes) == 1:
        return nodes[0]
    return '(' + ' | '.join(nodes) + ')'


def assumption_text(g, a):
    """`[]<>(trap -> attr)` over node ids, simplified inside the node
    space: when `trap | attr` covers every node the implication reduces
    to the negated trap."""
    trap_nodes = _nodes(g, a.trap)
    attr_nodes = _nodes(g, a.attr)
    if set(trap_nodes) | set(attr_nodes) == set(_nodes(g, g.sigma)):
        return f'[]<>!{_disj_text(trap_nodes)}'
    return f'[]<>({_disj_text(trap_nodes)} -> {_disj_text(attr_nodes)})'


def report_to_json(report):
    return json.dumps(report_to_dict(report), indent=2) + '\n'
