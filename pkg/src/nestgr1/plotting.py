"""Figures for the command line reports, rendered to files."""
import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402


_MARKERS = ('o', 's', '^', 'D', 'v')


def plot_traces(counts, path, title='cooperative winning set'):
    """Node count per iterate, one line per schedule.

    `counts` maps a schedule name to its list of iterate sizes.
    """
    fig, ax = plt.subplots(figsize=(5, 3.2))
    for name, ys in sorted(counts.items()):
        ax.plot(range(len(ys)), ys, marker='o', label=name)
    ax.set_xlabel('iterate')
    ax.set_ylabel('nodes')
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_game(game, path, highlight_nodes=(), highlight_edges=(), title=None):
    """Draw an `ExplicitGame`: player 0 as circles, player 1 as squares."""
    graph = nx.DiGraph()
    graph.add_nodes_from(game.nodes)
    graph.add_edges_from(game.edges)
    pos = nx.circular_layout(game.sort(game.nodes))
    fig, ax = plt.subplots(figsize=(5, 5))
    marked = set(highlight_nodes)
    for j in range(game.n_players):
        mine = [v for v in game.nodes if game.owner[v] == j]
        nx.draw_networkx_nodes(
            graph, pos, nodelist=mine, ax=ax,
            node_shape=_MARKERS[j % len(_MARKERS)],
            node_color=['tab:orange' if v in marked else 'white' for v in mine],
            edgecolors='black', node_size=700)
    hot = set(highlight_edges)
    nx.draw_networkx_edges(
        graph, pos, ax=ax, node_size=700, arrows=True,
        edgelist=[e for e in graph.edges if e not in hot])
    if hot:
        nx.draw_networkx_edges(
            graph, pos, ax=ax, node_size=700, arrows=True,
            edgelist=sorted(hot), edge_color='tab:red', width=2.0)
    nx.draw_networkx_labels(graph, pos, ax=ax, font_size=9)
    if title:
        ax.set_title(title)
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
