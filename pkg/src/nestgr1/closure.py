"""Cooperative winning set under three fixpoint schedules.

All three compute the nodes from which the players, acting together,
can visit every recurrence goal of every player infinitely often while
never leaving the node space. They differ only in how the greatest
fixpoints are nested, and therefore in their iterate traces.
"""
import logging
from dataclasses import dataclass, field, replace

from nestgr1.bdd import conj, fixpoint
from nestgr1.ops import pre, pre_star
from nestgr1.spec import Gr1Objective


logger = logging.getLogger(__name__)

SCHEDULES = ('flat', 'grouped', 'iterated')


class UnsatisfiableGoals(Exception):
    """The cooperative winning set is empty."""


@dataclass
class CoopResult:
    coop: object
    rho_c: object
    schedule: str
    iterations: list = field(default_factory=list)


def player_goals(g):
    """Mapping player -> list of goal predicates; `sigma` for none."""
    goals = dict()
    for j in g.players:
        mine = sorted(k for (p, k) in g.goals if p == j)
        goals[j] = [g.goals[(j, k)] for k in mine] or [g.sigma]
    return goals


def _result(g, z, schedule, trace):
    rho_c = z & g.bdd.rename(z, g.full_prime_map())
    return CoopResult(coop=z, rho_c=rho_c, schedule=schedule, iterations=trace)


def _closure_body(g, goals, z, within):
    # one round of the per-goal cooperative reachability
    terms = (pre_star(g, G & pre(g, None, z)) for G in goals)
    return within & conj(terms, g.bdd)


def coop_flat(g, goals=None):
    if goals is None:
        goals = player_goals(g)
    flat = [G for j in sorted(goals) for G in goals[j]]
    trace = list()

    def body(env):
        trace.append(env['Z'] & g.sigma)
        return _closure_body(g, flat, env['Z'], g.sigma)
    z = fixpoint('nu', body, g.bdd, var='Z')
    return _result(g, z, 'flat', trace)


def coop_grouped(g, goals=None):
    if goals is None:
        goals = player_goals(g)
    trace = list()

    def outer(env):
        z = env['Z'] & g.sigma
        trace.append(z)
        parts = list()
        for j in sorted(goals):
            inner = fixpoint(
                'nu',
                lambda e: _closure_body(g, goals[j], e['Zj'], z),
                g.bdd, var='Zj')
            parts.append(inner)
        return conj(parts, g.bdd)
    z = fixpoint('nu', outer, g.bdd, var='Z')
    return _result(g, z, 'grouped', trace)


def player_closure(g, j_goals, within):
    """Greatest set inside `within` from which every goal in `j_goals`
    stays cooperatively reachable."""
    return fixpoint(
        'nu', lambda e: _closure_body(g, j_goals, e['Zj'], within),
        g.bdd, var='Zj')


def coop_iterated(g, goals=None):
    """Alternate per-player closures and their intersection until stable.

    The trace holds every iterate, starting with the node space.
    """
    if goals is None:
        goals = player_goals(g)
    q = g.sigma
    trace = [q]
    while True:
        nxt = conj(
            (player_closure(g, goals[j], q) for j in sorted(goals)), g.bdd)
        if nxt == q:
            break
        q = nxt
        trace.append(q)
    return _result(g, q, 'iterated', trace)


def coop(g, schedule='flat', goals=None):
    if schedule == 'flat':
        return coop_flat(g, goals)
    if schedule == 'grouped':
        return coop_grouped(g, goals)
    if schedule == 'iterated':
        return coop_iterated(g, goals)
    raise ValueError(f'unknown schedule {schedule!r}')


def objectives(g):
    """One unconstrained objective per player, before any restriction."""
    goals = player_goals(g)
    return [
        Gr1Objective(
            player=j, env_safety=g.others[j], env_recurrences=[],
            sys_safety=g.lifted[j], sys_recurrences=list(goals[j]))
        for j in g.players]


def restrict_and_augment(g, result, contracts=None):
    """Restrict every move to the cooperative winning set and add the
    matching safety constraint to both sides of every contract."""
    if result.coop.is_false:
        raise UnsatisfiableGoals('goals cooperatively unsatisfiable')
    if contracts is None:
        contracts = objectives(g)
    h = g.restrict(result.coop)
    out = [
        replace(
            c, env_safety=c.env_safety & result.rho_c,
            sys_safety=c.sys_safety & result.rho_c)
        for c in contracts]
    return h, out
