"""Seeded random turn-alternating games for property tests."""
import random

from nestgr1.spec import ExplicitGame


def random_game(seed, max_nodes=32, max_players=3, max_goals=3,
                n_players=None, density=None):
    """Random `ExplicitGame` where every player owns at least one node.

    Edges only join a node of player j to a node of player j + 1 (mod n);
    deadlocks are allowed.
    """
    rng = random.Random(seed)
    n = n_players if n_players is not None else rng.randint(2, max_players)
    size = rng.randint(n, max(n, max_nodes))
    nodes = [f'v{k}' for k in range(size)]
    owner = dict()
    for k, v in enumerate(nodes):
        owner[v] = k if k < n else rng.randrange(n)
    if density is None:
        density = rng.choice((0.15, 0.3, 0.5))
    edges = set()
    for u in nodes:
        nxt = [v for v in nodes if owner[v] == (owner[u] + 1) % n]
        for v in nxt:
            if rng.random() < density:
                edges.add((u, v))
    goals = dict()
    for j in range(n):
        for k in range(rng.randint(0, max_goals)):
            count = rng.randint(1, min(3, size))
            goals[(j, k)] = set(rng.sample(nodes, count))
    return ExplicitGame(
        nodes=nodes, owner=owner, edges=edges, goals=goals, n_players=n)
