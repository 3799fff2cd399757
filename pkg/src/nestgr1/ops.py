"""Predecessor, attractor and trap operators on a `GameStructure`.

A player argument is either one player index or a collection of them
(a coalition). Every call to `cpre` increments `g.stats['cpre']`.
"""
from nestgr1.bdd import disj, fixpoint


def _coalition(g, j):
    if isinstance(j, int):
        members = {j}
    else:
        members = set(j)
    if not members <= set(g.players):
        raise ValueError(f'unknown players {sorted(members - set(g.players))}')
    return members


def pre(g, j, f):
    """Nodes with a move into `f`; `j=None` means any player."""
    g.check_node_predicate(f)
    if j is None:
        players = g.players
    else:
        players = _coalition(g, j)
    return disj((g.pre_player(k, f) for k in players), g.bdd)


def pre_star(g, f):
    """Nodes from which some play reaches `f`."""
    g.check_node_predicate(f)
    f = f & g.sigma
    return fixpoint(
        'mu', lambda env: f | pre(g, None, env['Y']), g.bdd, var='Y')


def cpre(g, j, f):
    """Nodes from which coalition `j` forces the next node into `f`.

    On a node of another player every move must land in `f`; a
    deadlocked node of another player is included vacuously.
    """
    g.check_node_predicate(f)
    g.stats['cpre'] += 1
    members = _coalition(g, j)
    bdd = g.bdd
    result = bdd.false
    for k in g.players:
        if k in members:
            result |= g.pre_player(k, f)
            continue
        pmap = g.prime_map(k)
        fp = bdd.rename(f, pmap)
        escape = bdd.and_exist(pmap.values(), g.moves[k], ~fp)
        result |= g.turn(k) & g.sigma & ~escape
    return result


def attr(g, j, f, rings=None):
    """Least fixpoint of `f | cpre(j, X)`.

    If `rings` is a list, the successive iterates are appended to it,
    starting with `f` itself.
    """
    g.check_node_predicate(f)
    f = f & g.sigma
    if rings is not None:
        rings.append(f)

    def body(env):
        x = f | cpre(g, j, env['X'])
        if rings is not None and rings[-1] != x:
            rings.append(x)
        return x
    # f is below the least fixpoint and below body(f)
    return fixpoint('mu', body, g.bdd, var='X', start=f)


def trap(g, j, s, e, iterates=None):
    """Greatest fixpoint of `e | (cpre(j, X) & s)`.

    From the result outside `e`, coalition `j` can keep the play inside
    `s` until it enters `e` (possibly forever).
    """
    g.check_node_predicate(s)
    g.check_node_predicate(e)
    s = s & g.sigma
    e = e & g.sigma

    def body(env):
        x = e | (cpre(g, j, env['X']) & s)
        if iterates is not None:
            iterates.append(x)
        return x
    return fixpoint('nu', body, g.bdd, var='X')
