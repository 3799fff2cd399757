import os

import pytest

from nestgr1.closure import coop, restrict_and_augment
from nestgr1.game import build_game
from nestgr1.oracle import OracleGame
from nestgr1.spec import parse_game_spec, parse_xg


FIXTURES = os.path.join(os.path.dirname(__file__), os.pardir, 'fixtures')

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = dict()


def fixture_path(name):
    return os.path.abspath(os.path.join(FIXTURES, name))


def read_fixture(name):
    with open(fixture_path(name)) as f:
        return f.read()


def load_game(name):
    return build_game(parse_game_spec(read_fixture(name)))


def load_oracle(name):
    return OracleGame(parse_xg(read_fixture(name)))


def restricted(name):
    g = load_game(name)
    h, _ = restrict_and_augment(g, coop(g))
    return h


@pytest.fixture
def safety():
    return load_game('safety.xg')


@pytest.fixture
def weak():
    return load_game('weak_fairness.xg')


@pytest.fixture
def weak_coop():
    return restricted('weak_fairness.xg')


@pytest.fixture
def closure_game():
    return load_game('lack_of_closure.xg')


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section('acceptance criteria')
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(
            f'criterion {k}: {"PASS" if ok else "FAIL"} - {detail}')
