"""Memoryless strategies from game stacks, and play simulation.

A play is driven by a leader. The leader pursues its current recurrence
goal using the stack built for that goal; when the goal is visited, the
next player (cyclically) becomes leader and moves on to its own next
goal. The goal index being pursued is published as `PlayState.announce`.

Inside one stack entry every region node gets a rank
`(round, kind, ring)`: the assumption round that first covers it, 0 for
the strategist's attractor and 1 for the trap, and the onion ring of the
attractor (for trap nodes, of the other side's attractor back into it).
Strategist moves, trap-maintenance moves of the other side, and every
other-side move inside the attractor strictly decrease this rank.
"""
import logging
import random
from dataclasses import dataclass, field

from nestgr1.game import expand_explicit


logger = logging.getLogger(__name__)

POLICIES = ('adversarial', 'random', 'scripted', 'cooperative')
EXHAUSTIVE_NODES = 8


class RuntimeErrorStart(ValueError):
    """The start node lies outside the cooperative winning set."""


@dataclass
class EntryStrategy:
    depth: int
    player: object
    region: frozenset
    target: frozenset
    rank: dict
    # node -> successor, for the strategist and for trap maintenance
    moves: dict
    free: frozenset

    def members(self):
        return {self.player} if isinstance(self.player, int) else set(self.player)


@dataclass
class Strategy:
    game: object
    stacks: dict
    goals: dict

    def entry(self, key, v):
        for e in self.stacks[key]:
            if v in e.region:
                return e
        return None

    def choice(self, key, v):
        """Forced successor at `v` for goal `key`, or None if free."""
        e = self.entry(key, v)
        if e is None:
            return None
        return e.moves.get(v)

    def depth(self, key):
        return len(self.stacks[key])


@dataclass
class PlayState:
    node: object
    leader: int
    pointers: tuple
    step: int
    announce: int


@dataclass
class PlayTrace:
    states: list = field(default_factory=list)
    completions: list = field(default_factory=list)
    lasso: tuple = None
    cycle_goals: set = field(default_factory=set)

    @property
    def nodes(self):
        return [s.node for s in self.states]


def _ring_index(rings, v):
    for i, ring in enumerate(rings):
        if v in ring:
            return i
    return None


def extract_strategy(report):
    """Decode the stacks of a `SynthesisReport` into explicit strategies."""
    g = report.game
    if g is None or not report.stacks.stacks:
        raise ValueError('report has no stacks')
    xg = expand_explicit(g)
    succ = {v: xg.successors(v) for v in xg.nodes}
    stacks = dict()
    for key, entries in report.stacks.stacks.items():
        info = report.details.get(key)
        if info is None:
            raise ValueError(f'missing iterates for stack {key}')
        out = list()
        for e, detail in zip(entries, info):
            out.append(_entry_strategy(g, xg, succ, e, detail))
        stacks[key] = out
    goals = {key: frozenset(g.decode(p)) for key, p in g.goals.items()}
    for j in g.players:
        if not any(p == j for p, _ in goals):
            goals[(j, 0)] = frozenset(xg.nodes)
    return Strategy(game=xg, stacks=stacks, goals=goals)


def _entry_strategy(g, xg, succ, entry, detail):
    region = frozenset(g.decode(entry.region))
    target = frozenset(g.decode(entry.target))
    mine = {entry.player} if isinstance(entry.player, int) else set(entry.player)
    rounds = list()
    for step in detail.steps:
        rounds.append(dict(
            attr=[frozenset(g.decode(r)) for r in step.attr_rings],
            escape=[frozenset(g.decode(r)) for r in step.escape_rings],
            a=frozenset(g.decode(step.attr)),
            trap=frozenset(g.decode(step.trap))))
    rank = dict()
    where = dict()
    for v in region:
        for m, rd in enumerate(rounds):
            if v in rd['a']:
                rank[v] = (m, 0, _ring_index(rd['attr'], v))
                where[v] = (m, 'attr')
                break
            if v in rd['trap']:
                rank[v] = (m, 1, _ring_index(rd['escape'], v))
                where[v] = (m, 'trap')
                break
        else:
            raise AssertionError(f'region node {v} has no rank')
    moves = dict()
    free = set()

    def key(w):
        return (_rank_of(rank, target, w), xg.index(w))
    for v in xg.sort(region):
        m, kind = where[v]
        rd = rounds[m]
        options = succ[v]
        if xg.owner[v] in mine:
            if kind == 'attr':
                ok = [w for w in options if key(w)[0] < rank[v]]
            else:
                into = [w for w in options if w in rd['a']]
                ok = into or [
                    w for w in options if w in rd['trap'] and key(w)[0] < rank[v]]
            if not ok:
                raise AssertionError(f'no rank-decreasing move at {v}')
            moves[v] = min(ok, key=key)
        elif kind == 'trap':
            ok = [w for w in options if key(w)[0] < rank[v]]
            if not ok:
                raise AssertionError(f'no trap-maintenance move at {v}')
            moves[v] = min(ok, key=key)
        else:
            free.add(v)
    return EntryStrategy(
        depth=detail.depth, player=entry.player, region=region,
        target=target, rank=rank, moves=moves, free=frozenset(free))


def _rank_of(rank, target, w):
    # target nodes rank below every region node
    if w in target:
        return (-1, 0, 0)
    return rank.get(w, (1 << 30, 0, 0))


# plays

def _goal_counts(strategy):
    counts = dict()
    for (j, k) in strategy.goals:
        counts[j] = max(counts.get(j, 0), k + 1)
    return counts


def _arrive(strategy, counts, node, leader, pointers):
    """Apply a possible goal completion on arrival at `node`."""
    key = (leader, pointers[leader])
    if node in strategy.goals[key]:
        ptrs = list(pointers)
        ptrs[leader] = (ptrs[leader] + 1) % counts[leader]
        return (leader + 1) % len(counts), tuple(ptrs), key
    return leader, pointers, None


def _options(strategy, key, v):
    forced = strategy.choice(key, v)
    if forced is not None:
        return [forced], True
    return strategy.game.successors(v), False


def simulate(strategy, start, steps, policy='cooperative', seed=0, script=None):
    """Play `steps` moves from `start` under the extracted strategies.

    Free choices (moves not fixed by the current stack entry) are made by
    `policy`: `cooperative` takes the lowest successor id, `random` uses a
    seeded generator, `scripted` pops successors from `script` (falling
    back to the lowest id), and `adversarial` picks the highest id.
    """
    if policy not in POLICIES:
        raise ValueError(f'unknown policy {policy!r}')
    xg = strategy.game
    if start not in xg.owner:
        raise RuntimeErrorStart(f'start node {start!r} is outside Coop')
    counts = _goal_counts(strategy)
    rng = random.Random(seed)
    script = list(script or ())
    trace = PlayTrace()
    if steps <= 0:
        return trace
    leader, pointers = 0, tuple(0 for _ in counts)
    leader, pointers, done = _arrive(strategy, counts, start, leader, pointers)
    if done:
        trace.completions.append((0, done))
    node = start
    seen = dict()
    deterministic = policy in ('cooperative', 'adversarial')
    for t in range(steps):
        state = PlayState(
            node=node, leader=leader, pointers=pointers, step=t,
            announce=pointers[leader])
        trace.states.append(state)
        if deterministic and trace.lasso is None:
            sig = (node, leader, pointers)
            if sig in seen:
                first = seen[sig]
                trace.lasso = (first, t - first)
                trace.cycle_goals = {
                    key for (s, key) in trace.completions if s > first and s <= t}
                break
            seen[sig] = t
        key = (leader, pointers[leader])
        options, forced = _options(strategy, key, node)
        if not options:
            break
        if forced or policy == 'cooperative':
            nxt = options[0]
        elif policy == 'adversarial':
            nxt = options[-1]
        elif policy == 'random':
            nxt = rng.choice(options)
        else:
            nxt = script.pop(0) if script else options[0]
            if nxt not in options:
                raise ValueError(f'scripted move {node} -> {nxt} not allowed')
        node = nxt
        leader, pointers, done = _arrive(strategy, counts, node, leader, pointers)
        if done:
            trace.completions.append((t + 1, done))
    return trace


@dataclass
class ExhaustiveResult:
    ok: bool
    worst: dict
    failures: list
    states: int


def verify_exhaustive(strategy, starts=None, max_nodes=EXHAUSTIVE_NODES):
    """Check every adversary behaviour from every start node.

    States are `(node, leader, goal pointers)`. From every reachable
    state, every path must complete the announced goal within
    `|nodes| * depth` moves of the active stack; a cycle that avoids
    completion is a failure.
    """
    xg = strategy.game
    if len(xg.nodes) > max_nodes:
        raise ValueError(f'exhaustive check limited to {max_nodes} nodes')
    counts = _goal_counts(strategy)
    if starts is None:
        starts = xg.nodes
    n = len(xg.nodes)
    initial = set()
    for v in starts:
        leader, ptrs, _ = _arrive(
            strategy, counts, v, 0, tuple(0 for _ in counts))
        initial.add((v, leader, ptrs))
    # reachable product states and their transitions
    edges = dict()
    frontier = list(initial)
    seen = set(initial)
    while frontier:
        s = frontier.pop()
        v, leader, ptrs = s
        key = (leader, ptrs[leader])
        options, _ = _options(strategy, key, v)
        outs = list()
        for w in options:
            nl, np_, done = _arrive(strategy, counts, w, leader, ptrs)
            t = (w, nl, np_)
            outs.append((t, done is not None))
            if t not in seen:
                seen.add(t)
                frontier.append(t)
        edges[s] = outs
    # longest completion-free path from each state
    failures = list()
    worst = dict()
    memo = dict()
    on_stack = set()

    def longest(s):
        if s in memo:
            return memo[s]
        if s in on_stack:
            raise _Cycle(s)
        on_stack.add(s)
        best = 0
        if not edges[s]:
            on_stack.discard(s)
            raise _Deadlock(s)
        for t, done in edges[s]:
            best = max(best, 1 if done else 1 + longest(t))
        on_stack.discard(s)
        memo[s] = best
        return best
    for s in sorted(seen, key=repr):
        try:
            d = longest(s)
        except _Cycle as e:
            failures.append(('cycle', s, e.args[0]))
            continue
        except _Deadlock as e:
            failures.append(('deadlock', s, e.args[0]))
            continue
        key = (s[1], s[2][s[1]])
        bound = n * strategy.depth(key)
        worst[key] = max(worst.get(key, 0), d)
        if d > bound:
            failures.append(('slow', s, d, bound))
    return ExhaustiveResult(
        ok=not failures, worst=worst, failures=failures, states=len(seen))


class _Cycle(Exception):
    pass


class _Deadlock(Exception):
    pass
