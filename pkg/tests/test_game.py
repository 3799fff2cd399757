import pytest
from hypothesis import given, settings, strategies as st

from conftest import read_fixture
from nestgr1.game import (
    CeilingError, build_game, encode_explicit, expand_explicit,
    game_from_explicit)
from nestgr1.generators import random_game
from nestgr1.spec import ExplicitGame, parse_sg, parse_xg


TWO_BITS = """owns 0: x
owns 1: y
action 0: x' <-> !y
action 1: y' <-> x
goal 0 0: x
"""


def test_frame_condition_on_lifted_relations():
    g = build_game(parse_sg(TWO_BITS))
    b = g.bdd
    rho0 = g.lifted[0]
    # at player 1's turn, player 0's copy of the relation only keeps x
    at1 = rho0 & g.turn(1)
    assert at1 <= b.var('x').iff(b.var("x'"))
    assert (at1 & g.turn(1) & ~b.var('x') & b.var("x'")).is_false
    # at its own turn player 0 hands over to player 1
    assert (rho0 & g.turn(0)) <= g.turn_next(1)


def test_two_player_others_is_lifted_of_the_opponent():
    g = build_game(parse_sg(TWO_BITS))
    assert g.others[0] == g.lifted[1]
    assert g.others[1] == g.lifted[0]


def test_symbolic_moves_alternate():
    g = build_game(parse_sg(TWO_BITS))
    assert g.count(g.sigma) == 8
    ex = expand_explicit(g)
    assert len(ex.nodes) == 8
    for u, v in ex.edges:
        assert ex.owner[v] == 1 - ex.owner[u]
    # x' <-> !y: from t0 with y=0 player 0 must set x
    assert g.successors('t0:x=0,y=0') == ['t1:x=1,y=0']
    assert g.successors('t1:x=1,y=1') == ['t0:x=1,y=1']


def test_three_players_cycle_turns():
    spec = parse_sg('owns 0: a\nowns 1: b\nowns 2: c\n'
                    'action 0: true\naction 1: true\naction 2: true\n')
    g = build_game(spec)
    ex = expand_explicit(g)
    assert len(ex.nodes) == 3 * 8
    for u, v in ex.edges:
        assert ex.owner[v] == (ex.owner[u] + 1) % 3
    # unused turn code 3 is not a node
    assert g.count(g.sigma) == 24


def test_chain_game():
    xg = ExplicitGame(
        nodes=['a', 'b', 'c'], owner={'a': 0, 'b': 1, 'c': 0},
        edges={('a', 'b'), ('b', 'c')})
    g = game_from_explicit(xg)
    ex = expand_explicit(g)
    assert g.count(g.sigma) == 3
    assert ex.edges == {('a', 'b'), ('b', 'c')}
    assert g.successors('c') == []
    assert g.decode(g.pre_player(0, g.encode(['b']))) == {'a'}
    assert g.decode(g.post_player(1, g.encode(['b']))) == {'c'}


def test_deadlocked_node_has_no_successor():
    xg = parse_xg(read_fixture('weak_fairness.xg'))
    g = game_from_explicit(xg)
    assert g.successors('s7') == []
    assert 's7' in g.node_ids()


def test_fixture_round_trips():
    for name in ('safety.xg', 'weak_fairness.xg', 'lack_of_closure.xg'):
        xg = parse_xg(read_fixture(name))
        g = game_from_explicit(xg)
        assert g.count(g.sigma) == len(xg.nodes)
        back = expand_explicit(g)
        assert back.edges == xg.edges
        assert back.goals == xg.goals
        assert back.owner == xg.owner


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_random_explicit_round_trip(seed):
    xg = random_game(seed, max_nodes=12)
    back = expand_explicit(game_from_explicit(xg))
    assert back.edges == xg.edges
    assert back.goals == xg.goals
    assert set(back.nodes) == set(xg.nodes)


def test_encoding_uses_one_block_per_player():
    xg = parse_xg(read_fixture('weak_fairness.xg'))
    spec = encode_explicit(xg)
    # player 1 owns 5 nodes -> block 0 needs 3 bits; player 0 owns 3 -> 2 bits
    assert len(spec.blocks[0]) == 3
    assert len(spec.blocks[1]) == 2


def test_encode_decode_inverse():
    g = game_from_explicit(parse_xg(read_fixture('safety.xg')))
    for subset in (['s0'], ['s1', 's6'], g.node_ids()):
        assert g.decode(g.encode(subset)) == set(subset)
    assert g.node_ids() == [f's{k}' for k in range(7)]


def test_restrict_keeps_moves_inside():
    g = game_from_explicit(parse_xg(read_fixture('lack_of_closure.xg')))
    keep = g.encode(['a', 'b', 'e', 'f'])
    h = g.restrict(keep)
    ex = expand_explicit(h)
    assert set(ex.nodes) == {'a', 'b', 'e', 'f'}
    assert ex.edges == {('a', 'b'), ('b', 'e'), ('e', 'f'), ('f', 'a')}


def test_node_predicate_check():
    g = build_game(parse_sg(TWO_BITS))
    g.check_node_predicate(g.bdd.var('x'))
    with pytest.raises(ValueError):
        g.check_node_predicate(g.bdd.var("x'"))


def test_expansion_ceiling(monkeypatch):
    g = build_game(parse_sg(TWO_BITS))
    with pytest.raises(CeilingError):
        expand_explicit(g, limit=4)
    monkeypatch.setenv('NESTGR1_MAX_NODES', '3')
    with pytest.raises(CeilingError):
        expand_explicit(g)
    monkeypatch.setenv('NESTGR1_MAX_NODES', 'lots')
    with pytest.raises(ValueError):
        expand_explicit(g)
