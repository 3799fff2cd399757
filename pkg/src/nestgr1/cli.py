"""Command line entry point.

Exit status: 0 on success, 1 when a diagnostic is reported (for example
cooperatively unsatisfiable goals or an exceeded ceiling), 2 on usage or
input errors.
"""
import argparse
import logging
import os
import sys

from nestgr1 import oracle as xo
from nestgr1.bdd import NodeLimitError
from nestgr1.closure import SCHEDULES, coop
from nestgr1.contracts import report_to_json, synthesize
from nestgr1.game import CeilingError, build_game, expand_explicit
from nestgr1.ops import attr, cpre, pre, pre_star, trap
from nestgr1.runtime import POLICIES, extract_strategy, simulate
from nestgr1.spec import SpecError, parse_formula, parse_game_spec


logger = logging.getLogger(__name__)


class Diagnostic(Exception):
    pass


def load(path, max_bdd_nodes=None):
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise SpecError(f'cannot read {path}: {e.strerror}') from None
    ext = os.path.splitext(path)[1].lstrip('.')
    spec = parse_game_spec(text, ext if ext in ('xg', 'sg') else None)
    return build_game(spec, max_nodes=max_bdd_nodes)


def _node_set(g, nodes, formula):
    if formula is not None:
        return parse_formula(formula, g.table, g.bdd, mode='node') & g.sigma
    try:
        return g.encode(nodes or [])
    except KeyError as e:
        raise SpecError(f'unknown node {e.args[0]!r}') from None


def _players(text):
    parts = [int(p) for p in text.split(',')]
    return parts[0] if len(parts) == 1 else tuple(parts)


def cmd_coop(args, out):
    g = load(args.file, args.max_bdd_nodes)
    r = coop(g, args.schedule)
    nodes = g.node_ids(r.coop)
    print(f'schedule: {args.schedule}', file=out)
    print(f'coop: {len(nodes)} of {g.count(g.sigma)} nodes', file=out)
    print('nodes: ' + ' '.join(nodes), file=out)
    if args.trace:
        for k, q in enumerate(r.iterations):
            print(f'iterate {k}: {g.count(q)}', file=out)
    if args.figure:
        from nestgr1.plotting import plot_traces
        counts = {
            s: [g.count(q) for q in coop(g, s).iterations] for s in SCHEDULES}
        plot_traces(counts, args.figure)
    if not nodes:
        raise Diagnostic('goals cooperatively unsatisfiable')


def cmd_contract(args, out):
    g = load(args.file, args.max_bdd_nodes)
    report = synthesize(g, args.schedule)
    out.write(report_to_json(report))
    if args.stats:
        print(f'cpre_calls: {report.cpre_calls}', file=sys.stderr)
        print(f'depth: {report.depth}', file=sys.stderr)
    if args.figure and report.game is not None:
        from nestgr1.plotting import plot_game
        xg = expand_explicit(g, args.max_nodes)
        plot_game(
            xg, args.figure, highlight_nodes=report.game.decode(report.coop.coop),
            title='cooperative winning set')
    if any(d['kind'] == 'unsatisfiable-goals' for d in report.diagnostics):
        raise Diagnostic('goals cooperatively unsatisfiable')


def _explicit(args):
    g = load(args.file, args.max_bdd_nodes)
    if g.explicit is not None:
        return g, xo.OracleGame(g.explicit)
    return g, xo.OracleGame(expand_explicit(g, args.max_nodes))


def cmd_oracle(args, out):
    g, og = _explicit(args)
    goals = og.goals()
    j = args.player
    if args.check == 'nonexistence-recurrence':
        mine = [goals[j][k] for k in args.goal] if args.goal else goals[j]
        found = xo.search_node_assumptions(og, mine, j, from_nodes=args.start)
        print(f'{len(found)} subsets found', file=out)
        for p in found:
            print('  {' + ', '.join(og.game.sort(p)) + '}', file=out)
    elif args.check == 'nonexistence-safety':
        found = xo.search_safety_restrictions(og, player=args.edges_of)
        print(f'{len(found)} subsets found', file=out)
        for s in found:
            edges = ' '.join(f'{u}->{v}' for u, v in sorted(s))
            print(f'  {{{edges}}}', file=out)
    elif args.check == 'mutual':
        if args.assumption is None:
            raise SpecError('--check mutual needs --assumption')
        p = og.check(args.assumption)
        mine = [goals[j][k] for k in args.goal] if args.goal else goals[j]
        env = xo.winning_set(og, xo.RealizabilityQuery(
            player=1 - j, guarantees=[p]))
        sys_ = xo.winning_set(og, xo.RealizabilityQuery(
            player=j, guarantees=mine, assumptions=[p]))
        print('assumption realized from: ' + ' '.join(og.game.sort(env)), file=out)
        print('goals realized from: ' + ' '.join(og.game.sort(sys_)), file=out)
        everywhere = set(og.nodes) if args.start is None else set(args.start)
        ok = everywhere <= env and everywhere <= sys_
        print(f'mutually realizable: {"yes" if ok else "no"}', file=out)
    elif args.check == 'coop':
        explicit = xo.coop_explicit(og, goals)
        symbolic = g.decode(coop(g).coop)
        print('coop: ' + ' '.join(og.game.sort(explicit)), file=out)
        same = explicit == symbolic
        print(f'symbolic agrees: {"yes" if same else "no"}', file=out)
        if not same:
            raise Diagnostic('explicit and symbolic results differ')


_OPS = ('pre', 'pre_star', 'cpre', 'attr', 'trap')


def cmd_ops(args, out):
    g = load(args.file, args.max_bdd_nodes)
    f = _node_set(g, args.nodes, args.formula)
    who = _players(args.player) if args.player is not None else None
    if args.op in ('cpre', 'attr', 'trap') and who is None:
        raise SpecError(f'--op {args.op} needs --player')
    if args.op == 'pre':
        r = pre(g, who, f)
    elif args.op == 'pre_star':
        r = pre_star(g, f)
    elif args.op == 'cpre':
        r = cpre(g, who, f)
    elif args.op == 'attr':
        r = attr(g, who, f)
    else:
        e = _node_set(g, args.escape, args.escape_formula)
        r = trap(g, who, f, e)
    print(f'{args.op}: {g.count(r)} nodes', file=out)
    print('nodes: ' + ' '.join(g.node_ids(r)), file=out)
    if args.bdd_nodes:
        print(f'store: {len(g.bdd)} decision nodes', file=out)


def cmd_simulate(args, out):
    g = load(args.file, args.max_bdd_nodes)
    report = synthesize(g)
    if not report.stacks.stacks:
        raise Diagnostic('goals cooperatively unsatisfiable')
    strategy = extract_strategy(report)
    start = args.start[0] if args.start else strategy.game.nodes[0]
    trace = simulate(
        strategy, start, args.steps, policy=args.policy, seed=args.seed,
        script=args.script)
    for s in trace.states:
        print(f'{s.step} {s.node} leader={s.leader} goal={s.announce}', file=out)
    for t, (j, k) in trace.completions:
        print(f'goal {j} {k} visited at step {t}', file=out)
    if trace.lasso is not None:
        first, length = trace.lasso
        goals = ' '.join(f'{j}:{k}' for j, k in sorted(trace.cycle_goals))
        print(f'lasso: prefix {first}, cycle {length}, goals {goals}', file=out)
    if args.dot:
        nodes = trace.nodes
        cycle = set()
        if trace.lasso is not None:
            first, length = trace.lasso
            loop = nodes[first:first + length] + [nodes[first]]
            cycle = set(zip(loop, loop[1:]))
        with open(args.dot, 'w') as f:
            f.write(to_dot(strategy.game, highlight=cycle))


def to_dot(game, highlight=(), coop_nodes=None):
    shapes = ('circle', 'box', 'diamond', 'triangle')
    goal_nodes = set().union(*game.goals.values()) if game.goals else set()
    lines = ['digraph game {']
    for v in game.sort(game.nodes):
        attrs = [f'shape={shapes[game.owner[v] % len(shapes)]}']
        if v in goal_nodes:
            attrs.append('peripheries=2')
        if coop_nodes is not None and v not in coop_nodes:
            attrs.append('style=dashed')
        lines.append(f'  "{v}" [{", ".join(attrs)}];')
    for u, v in sorted(game.edges, key=lambda e: (game.index(e[0]), game.index(e[1]))):
        extra = ' [color=red, penwidth=2]' if (u, v) in highlight else ''
        lines.append(f'  "{u}" -> "{v}"{extra};')
    lines.append('}')
    return '\n'.join(lines) + '\n'


def cmd_dot(args, out):
    g = load(args.file, args.max_bdd_nodes)
    xg = g.explicit if g.explicit is not None else expand_explicit(g, args.max_nodes)
    coop_nodes = g.decode(coop(g).coop) if args.coop else None
    out.write(to_dot(xg, coop_nodes=coop_nodes))


def build_parser():
    p = argparse.ArgumentParser(
        prog='nestgr1',
        description='Cooperative winning sets and nested GR(1) contracts.')
    p.add_argument('-v', '--verbose', action='store_true')
    sub = p.add_subparsers(dest='command', required=True)

    def common(sp):
        sp.add_argument('file', help='game file (.xg or .sg)')
        sp.add_argument(
            '--max-nodes', type=_positive, default=None,
            help='ceiling for explicit enumeration')
        sp.add_argument(
            '--max-bdd-nodes', type=_positive, default=None,
            help='ceiling for the decision diagram store')

    sp = sub.add_parser('coop', help='cooperative winning set')
    common(sp)
    sp.add_argument('--schedule', choices=SCHEDULES, default='flat')
    sp.add_argument('--trace', action='store_true')
    sp.add_argument('--figure', help='write an iterate plot to this file')
    sp.set_defaults(run=cmd_coop)

    sp = sub.add_parser('contract', help='nested game contracts as JSON')
    common(sp)
    sp.add_argument('--schedule', choices=SCHEDULES, default='flat')
    sp.add_argument('--stats', action='store_true')
    sp.add_argument('--figure', help='write a game drawing to this file')
    sp.set_defaults(run=cmd_contract)

    sp = sub.add_parser('oracle', help='explicit-state checks')
    common(sp)
    sp.add_argument(
        '--check', required=True,
        choices=('nonexistence-recurrence', 'nonexistence-safety', 'mutual', 'coop'))
    sp.add_argument('--player', type=int, default=0)
    sp.add_argument('--goal', type=int, nargs='+')
    sp.add_argument('--edges-of', type=int, default=1)
    sp.add_argument('--assumption', nargs='+')
    sp.add_argument('--start', nargs='+', help='required initial nodes')
    sp.set_defaults(run=cmd_oracle)

    sp = sub.add_parser('ops', help='evaluate one set operator')
    common(sp)
    sp.add_argument('--op', choices=_OPS, required=True)
    sp.add_argument('--player', help='player index or comma-separated coalition')
    sp.add_argument('--nodes', nargs='*')
    sp.add_argument('--formula')
    sp.add_argument('--escape', nargs='*')
    sp.add_argument('--escape-formula')
    sp.add_argument('--bdd-nodes', action='store_true')
    sp.set_defaults(run=cmd_ops)

    sp = sub.add_parser('simulate', help='play under extracted strategies')
    common(sp)
    sp.add_argument('--steps', type=int, default=20)
    sp.add_argument('--policy', choices=POLICIES, default='cooperative')
    sp.add_argument('--seed', type=int, default=0)
    sp.add_argument('--start', nargs=1)
    sp.add_argument('--script', nargs='*')
    sp.add_argument('--dot', help='write the game with the cycle highlighted')
    sp.set_defaults(run=cmd_simulate)

    sp = sub.add_parser('dot', help='Graphviz rendering of the game')
    common(sp)
    sp.add_argument('--coop', action='store_true')
    sp.set_defaults(run=cmd_dot)
    return p


def _positive(text):
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError('must be positive')
    return n


def main(argv=None, out=None):
    if out is None:
        out = sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        args.run(args, out)
    except (SpecError, KeyError) as e:
        print(f'error: {e}', file=sys.stderr)
        return 2
    except (Diagnostic, CeilingError, NodeLimitError,
            xo.OracleCeilingError) as e:
        print(f'diagnostic: {e}', file=sys.stderr)
        return 1
    return 0


def main_exit():
    sys.exit(main())


if __name__ == '__main__':
    main_exit()
