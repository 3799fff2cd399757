from conftest import read_fixture
from nestgr1.plotting import plot_game, plot_traces
from nestgr1.spec import parse_xg


def test_trace_plot(tmp_path):
    path = tmp_path / 'traces.png'
    plot_traces({'flat': [8, 7, 7], 'iterated': [8, 7]}, str(path))
    assert path.read_bytes()[:4] == b'\x89PNG'


def test_game_plot(tmp_path):
    xg = parse_xg(read_fixture('lack_of_closure.xg'))
    path = tmp_path / 'game.svg'
    plot_game(
        xg, str(path), highlight_nodes={'a', 'b'},
        highlight_edges={('a', 'b')}, title='closure')
    assert '<svg' in path.read_text()
