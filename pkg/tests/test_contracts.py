import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import load_game
from nestgr1.contracts import (
    StackError, game_stack, opponent, report_to_dict, report_to_json,
    synthesize, unconditional_assumption)
from nestgr1.game import expand_explicit, game_from_explicit
from nestgr1.generators import random_game
from nestgr1.oracle import OracleGame, RealizabilityQuery, winning_set


def names(g, f):
    return g.decode(f)


def test_walkthrough_rounds(weak):
    report = synthesize(weak)
    h = report.game
    entries = report.stacks.stacks[(0, 0)]
    steps = report.details[(0, 0)]
    assert len(entries) == 2
    first = steps[0].steps
    assert len(first) == 1
    assert names(h, first[0].attr) == {'s5', 's6'}
    assert names(h, first[0].escape) == {'s4', 's5', 's6'}
    assert first[0].trap.is_false
    assert names(h, entries[0].region) == {'s5'}
    nested = steps[1].steps
    assert names(h, nested[0].trap) == {'s0', 's1', 's2', 's3'}
    assert nested[-1].trap.is_false
    assert names(h, entries[1].region) == {'s0', 's1', 's2', 's3', 's4'}
    # player 1 has no goal of its own, so its stack aims at every node
    assert names(h, report.stacks.stacks[(1, 0)][0].target) == {
        f's{k}' for k in range(7)}


def test_empty_trap_diagnostic(weak):
    report = synthesize(weak)
    kinds = [d for d in report.diagnostics if d['kind'] == 'empty-trap']
    assert any(d['depth'] == 0 and d['player'] == 0 for d in kinds)


def test_goal_everywhere_gives_no_assumption(weak_coop):
    g = weak_coop
    step = unconditional_assumption(g, 0, g.sigma)
    assert step.attr == g.sigma and step.escape == g.sigma
    assert step.trap.is_false
    with pytest.raises(ValueError):
        unconditional_assumption(g, 0, g.bdd.false)


def test_single_level_stack():
    g = load_game('lack_of_closure.xg')
    report = synthesize(g)
    h = report.game
    entries = report.stacks.stacks[(0, 0)]
    assert len(entries) == 1
    assert names(h, entries[0].region) == {'b', 'e', 'f'}
    assert entries[0].assumptions == []


def test_opponent():
    g = game_from_explicit(random_game(3, n_players=3))
    assert opponent(g, 0) == (1, 2)
    assert opponent(g, (1, 2)) == 0
    with pytest.raises(ValueError):
        opponent(g, (1,))


def test_stack_without_progress_raises(weak_coop):
    g = weak_coop
    # s7 is outside the node space, so no nested game can ever cover it
    stray = g.parent.encode(['s7'])
    with pytest.raises(StackError):
        game_stack(g, 0, g.encode(['s6']), g.sigma | stray)


def test_report_serializes(weak):
    report = synthesize(weak)
    data = report_to_dict(report)
    assert json.loads(report_to_json(report)) == data
    assert data['stats']['coop_nodes'] == 7
    assert data['stats']['depth'] == 2
    assert data['contracts'][0]['assumptions'] == []
    assumptions = data['contracts'][1]['assumptions']
    assert assumptions == [dict(
        trap=['s0', 's1', 's2', 's3'], attr=['s4', 's5', 's6'])]


def two_player_games():
    return st.integers(0, 20_000).map(
        lambda s: random_game(s, max_nodes=12, n_players=2))


def stack_checks(report):
    h = report.game
    coop = report.coop.coop
    for (j, _), entries in report.stacks.stacks.items():
        covered = entries[0].target
        for d, e in enumerate(entries):
            # players alternate level by level
            assert e.player == (j if d % 2 == 0 else opponent(h, j))
            # regions are disjoint from what earlier levels already cover
            assert (e.region & covered).is_false
            covered |= e.region
            if d:
                assert e.target == entries[d - 1].target | entries[d - 1].region
        assert covered == coop
        assert len(entries) <= h.parent.count(h.parent.sigma)


@given(two_player_games())
@settings(max_examples=60, deadline=None)
def test_stack_structure(xg):
    report = synthesize(game_from_explicit(xg))
    if report.coop.coop.is_false:
        return
    stack_checks(report)


@given(two_player_games())
@settings(max_examples=40, deadline=None)
def test_assumptions_are_unconditionally_realizable(xg):
    report = synthesize(game_from_explicit(xg))
    if report.coop.coop.is_false:
        return
    h = report.game
    og = OracleGame(expand_explicit(h))
    everything = set(og.nodes)
    for entries in report.stacks.stacks.values():
        for e in entries:
            for a in e.assumptions:
                ok = (everything - h.decode(a.trap)) | h.decode(a.attr)
                q = RealizabilityQuery(
                    player=opponent(h, e.player), guarantees=[ok])
                assert winning_set(og, q) == everything


@given(two_player_games())
@settings(max_examples=40, deadline=None)
def test_entry_player_reaches_target_under_assumptions(xg):
    report = synthesize(game_from_explicit(xg))
    if report.coop.coop.is_false:
        return
    h = report.game
    og = OracleGame(expand_explicit(h))
    everything = set(og.nodes)
    for entries in report.stacks.stacks.values():
        for e in entries:
            target = h.decode(e.target)
            # make the target absorbing so that recurrence means reaching it
            edges = {(u, v) for (u, v) in og.edges if u not in target}
            edges |= {(v, v) for v in target}
            q = RealizabilityQuery(
                player=e.player, guarantees=[target],
                assumptions=[
                    (everything - h.decode(a.trap)) | h.decode(a.attr)
                    for a in e.assumptions])
            assert h.decode(e.region) <= winning_set(og.with_edges(edges), q)


def test_cpre_budget_on_fixtures():
    for name in ('safety.xg', 'weak_fairness.xg', 'lack_of_closure.xg'):
        g = load_game(name)
        n = g.count(g.sigma)
        report = synthesize(g)
        assert report.cpre_calls <= 6 * n * n
        assert sum(report.stack_cpre.values()) <= report.cpre_calls
