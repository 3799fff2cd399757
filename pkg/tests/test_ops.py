import pytest
from hypothesis import given, settings, strategies as st

from nestgr1 import oracle
from nestgr1.game import game_from_explicit
from nestgr1.generators import random_game
from nestgr1.ops import attr, cpre, pre, pre_star, trap
from nestgr1.oracle import OracleGame


def nodes(g, *names):
    return g.encode(names)


def test_predecessor_examples(safety):
    g = safety
    assert g.decode(pre(g, 0, nodes(g, 's6'))) == {'s5'}
    assert g.decode(pre(g, 1, nodes(g, 's6'))) == set()
    assert g.decode(pre(g, None, nodes(g, 's1'))) == {'s0', 's4'}
    assert g.decode(pre_star(g, nodes(g, 's6'))) == {f's{k}' for k in range(7)}


def test_cpre_examples(safety):
    g = safety
    # s4 (player 1) can go to s1 or s5; player 0 cannot force s5 there
    assert 's4' not in g.decode(cpre(g, 0, nodes(g, 's5')))
    assert 's4' in g.decode(cpre(g, 1, nodes(g, 's5')))
    assert 's4' in g.decode(cpre(g, 0, nodes(g, 's1', 's5')))


def test_cpre_counts_calls(safety):
    g = safety
    before = g.stats['cpre']
    cpre(g, 0, g.sigma)
    cpre(g, (0, 1), g.sigma)
    assert g.stats['cpre'] == before + 2


def test_attractor_examples(weak_coop):
    g = weak_coop
    a = attr(g, 0, nodes(g, 's6'))
    assert g.decode(a) == {'s5', 's6'}
    b = attr(g, 1, a)
    assert g.decode(b) == {'s4', 's5', 's6'}
    assert (~a & b & trap(g, 0, b, a)).is_false
    # one level down player 1 attracts to A, giving B again, and player 0
    # reaches B from everywhere; player 1 can stay out on s0..s3
    assert g.decode(attr(g, 0, b)) == {f's{k}' for k in range(7)}
    t = trap(g, 1, g.sigma, b)
    assert g.decode(~b & t) == {'s0', 's1', 's2', 's3'}


def test_attractor_rings(weak_coop):
    g = weak_coop
    rings = list()
    a = attr(g, 0, nodes(g, 's6'), rings=rings)
    assert g.decode(rings[0]) == {'s6'}
    assert rings[-1] == a
    for smaller, larger in zip(rings, rings[1:]):
        assert smaller <= larger and smaller != larger


def test_operator_input_checks(safety):
    g = safety
    with pytest.raises(ValueError):
        pre(g, 0, g.bdd.var("x0_0'"))
    with pytest.raises(ValueError):
        cpre(g, 5, g.sigma)


games = st.integers(0, 5_000).map(lambda s: random_game(s, max_nodes=14))


@st.composite
def game_and_sets(draw):
    xg = draw(games)
    ns = sorted(xg.nodes)
    f = draw(st.sets(st.sampled_from(ns)))
    s = draw(st.sets(st.sampled_from(ns)))
    j = draw(st.integers(0, xg.n_players - 1))
    return xg, f, s, j


def opp(xg, j):
    rest = tuple(k for k in range(xg.n_players) if k != j)
    return rest[0] if len(rest) == 1 else rest


@given(game_and_sets())
@settings(max_examples=80, deadline=None)
def test_symbolic_ops_match_explicit(case):
    xg, f, s, j = case
    g = game_from_explicit(xg)
    og = OracleGame(xg)
    F, S = g.encode(f), g.encode(s)
    assert g.decode(pre(g, j, F)) == oracle.pre(og, j, f)
    assert g.decode(pre_star(g, F)) == oracle.pre_star(og, f)
    assert g.decode(cpre(g, j, F)) == oracle.cpre(og, j, f)
    assert g.decode(cpre(g, opp(xg, j), F)) == oracle.cpre(og, opp(xg, j), f)
    assert g.decode(attr(g, j, F)) == oracle.attr(og, j, f)
    assert g.decode(trap(g, j, S, F)) == oracle.trap(og, j, s, f)


@given(game_and_sets())
@settings(max_examples=60, deadline=None)
def test_attractor_laws(case):
    xg, f, s, j = case
    g = game_from_explicit(xg)
    F, S = g.encode(f), g.encode(s)
    a = attr(g, j, F)
    # idempotent, unfolds, contains its argument, monotone
    assert attr(g, j, a) == a
    assert a == F | cpre(g, j, a)
    assert F <= a
    assert attr(g, j, F | S) >= a
    # cpre is monotone too
    assert cpre(g, j, F) <= cpre(g, j, F | S)


@given(game_and_sets())
@settings(max_examples=60, deadline=None)
def test_duality_and_determinacy(case):
    xg, f, _, j = case
    g = game_from_explicit(xg)
    F = g.encode(f)
    o = opp(xg, j)
    # one move: j forces F exactly where the others cannot force its complement
    assert cpre(g, j, F) == g.sigma & ~cpre(g, o, g.sigma & ~F)
    # reachability games are determined
    a = attr(g, j, F)
    keep_out = trap(g, o, g.sigma & ~F, g.bdd.false)
    assert (a & keep_out).is_false
    assert (a | keep_out) == g.sigma


@given(game_and_sets())
@settings(max_examples=40, deadline=None)
def test_trap_laws(case):
    xg, f, s, j = case
    g = game_from_explicit(xg)
    F, S = g.encode(f), g.encode(s)
    t = trap(g, j, S, F)
    assert t == F | (cpre(g, j, t) & S)
    assert t <= S | F
    assert trap(g, j, S | F, F) >= t
