import pytest
from hypothesis import given, settings, strategies as st

from conftest import load_oracle
from nestgr1 import oracle
from nestgr1.generators import random_game
from nestgr1.oracle import (
    OracleCeilingError, OracleGame, RealizabilityQuery, coop_explicit,
    gr1_realizable, memoryless_winning_set, search_node_assumptions,
    search_safety_restrictions, winning_set)
from nestgr1.spec import ExplicitGame


ALL7 = {f's{k}' for k in range(7)}
G1 = {'s6'}
G2 = {'s0'}


@pytest.fixture
def og():
    return load_oracle('safety.xg')


def test_explicit_operator_examples(og):
    assert oracle.pre(og, 0, {'s6'}) == {'s5'}
    assert oracle.pre(og, None, {'s1'}) == {'s0', 's4'}
    assert oracle.pre_star(og, {'s6'}) == ALL7
    assert oracle.attr(og, 0, {'s6'}) == {'s5', 's6'}
    assert oracle.cpre(og, 1, {'s5'}) == {'s4'}
    assert oracle.trap(og, 1, ALL7 - {'s6'}, set()) == ALL7 - {'s5', 's6'}
    with pytest.raises(KeyError):
        oracle.pre(og, 0, {'nope'})


def test_coop_examples():
    assert coop_explicit(load_oracle('safety.xg')) == ALL7
    assert coop_explicit(load_oracle('weak_fairness.xg')) == ALL7
    assert coop_explicit(load_oracle('lack_of_closure.xg')) == {'a', 'b', 'e', 'f'}


def test_empty_assumption_is_vacuous(og):
    q = RealizabilityQuery(player=0, guarantees=[G1, G2], assumptions=[set()])
    assert winning_set(og, q) == ALL7


def test_unconditional_recurrence_fails(og):
    # player 1 can keep away from s6 (s4 -> s1) and from s0 (loop s2 <-> s3)
    for goal in (G1, G2):
        q = RealizabilityQuery(player=0, guarantees=[goal])
        assert winning_set(og, q) != ALL7


def test_s3_assumption_for_g2(og):
    # the loop s4 -> s5 -> s6 -> s3 meets s3 forever without passing s0,
    # so player 0 only wins where it already can
    q = RealizabilityQuery(player=0, guarantees=[G2], assumptions=[{'s3'}])
    assert winning_set(og, q) == {'s0', 's1'}
    assert memoryless_winning_set(og, q) == {'s0', 's1'}


def test_swapped_goal_reading(og):
    for_g2 = search_node_assumptions(og, [G2], player=0)
    assert {'s0', 's2'} in for_g2
    from_s2 = {f's{k}' for k in range(2, 7)}
    for_g1 = search_node_assumptions(og, [G1], player=0, from_nodes=from_s2)
    assert {'s3'} in for_g1


def test_joint_search_is_empty(og):
    assert search_node_assumptions(og, [G1, G2], player=0) == []


def test_weak_fairness_search_is_empty():
    og = load_oracle('weak_fairness.xg')
    goal = [{'s6'}]
    assert search_node_assumptions(og, goal, player=0) == []
    coop_nodes = {f's{k}' for k in range(7)}
    assert search_node_assumptions(
        og, goal, player=0, from_nodes=coop_nodes) == []


def test_no_goals_leaves_only_environment_side(og):
    found = search_node_assumptions(og, [], player=0)
    assert ALL7 in found
    assert set() not in found
    for p in found:
        q = RealizabilityQuery(player=1, guarantees=[p])
        assert gr1_realizable(og, q)


def test_safety_search_on_fixture(og):
    assert search_safety_restrictions(og, player=1) == []


def test_safety_search_finds_redundant_edges():
    xg = ExplicitGame(
        nodes=['a', 'b', 'c'], owner={'a': 0, 'b': 1, 'c': 1},
        edges={('a', 'b'), ('a', 'c'), ('b', 'a'), ('c', 'a')},
        goals={(0, 0): {'a'}})
    found = search_safety_restrictions(OracleGame(xg), player=1)
    assert found == [{('b', 'a')}, {('c', 'a')}]


def test_search_results_are_proper(og):
    for p in search_node_assumptions(og, [G2], player=0):
        assert p
        assert gr1_realizable(og, RealizabilityQuery(player=1, guarantees=[p]))
        assert gr1_realizable(og, RealizabilityQuery(
            player=0, guarantees=[G2], assumptions=[p]))


def test_search_ceilings():
    big = random_game(7, max_nodes=32)
    while len(big.nodes) <= oracle.MAX_SEARCH_NODES:
        big = random_game(len(big.nodes) + 1000, max_nodes=32)
    with pytest.raises(OracleCeilingError):
        search_node_assumptions(OracleGame(big), [], player=0)
    with pytest.raises(OracleCeilingError):
        memoryless_winning_set(OracleGame(big), RealizabilityQuery(player=0))


def test_cooperative_quantifier(og):
    q = RealizabilityQuery(
        player=0, guarantees=[G1, G2], quantifier='cooperative')
    assert winning_set(og, q) == ALL7
    with pytest.raises(ValueError):
        winning_set(og, RealizabilityQuery(player=0, quantifier='maybe'))


small_games = st.integers(0, 20_000).map(
    lambda s: random_game(s, max_nodes=8, n_players=2, density=0.25))


@st.composite
def queries(draw):
    xg = draw(small_games)
    ns = sorted(xg.nodes)
    sets = st.sets(st.sampled_from(ns), min_size=1)
    player = draw(st.integers(0, 1))
    guarantees = draw(st.lists(sets, max_size=2))
    assumptions = draw(st.lists(sets, max_size=1))
    return OracleGame(xg), RealizabilityQuery(
        player=player, guarantees=guarantees, assumptions=assumptions)


@given(queries())
@settings(max_examples=150, deadline=None)
def test_fixpoint_agrees_with_memoryless_enumeration(case):
    og, q = case
    assert winning_set(og, q) == memoryless_winning_set(og, q)


@given(queries(), st.data())
@settings(max_examples=80, deadline=None)
def test_weaker_assumption_smaller_winning_set(case, data):
    og, q = case
    if not q.assumptions:
        return
    extra = data.draw(st.sets(st.sampled_from(og.nodes)))
    weaker = RealizabilityQuery(
        player=q.player, guarantees=q.guarantees,
        assumptions=[q.assumptions[0] | extra])
    assert winning_set(og, weaker) <= winning_set(og, q)
    more = RealizabilityQuery(
        player=q.player, guarantees=q.guarantees + [set(og.nodes[:1])],
        assumptions=q.assumptions)
    assert winning_set(og, more) <= winning_set(og, q)


@given(queries())
@settings(max_examples=80, deadline=None)
def test_winning_set_is_closed_under_play(case):
    og, q = case
    win = winning_set(og, q)
    for u in win:
        if og.owner[u] == q.player:
            assert og.succ[u] & win
        else:
            assert og.succ[u] <= win
