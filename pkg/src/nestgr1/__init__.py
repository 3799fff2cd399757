"""Symbolic cooperative winning sets and nested GR(1) contracts for
turn-based multi-player games."""
from nestgr1.bdd import BDD, Predicate, fixpoint
from nestgr1.closure import (
    CoopResult, coop, coop_flat, coop_grouped, coop_iterated,
    restrict_and_augment)
from nestgr1.contracts import (
    game_stack, report_to_dict, synthesize, unconditional_assumption)
from nestgr1.game import build_game, encode_explicit, expand_explicit
from nestgr1.spec import (
    ExplicitGame, GameSpec, VariableTable, parse_formula, parse_game_spec,
    parse_sg, parse_xg)

__version__ = '0.1.0'
