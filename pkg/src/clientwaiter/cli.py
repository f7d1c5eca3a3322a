"""Command line: ``clientwaiter <subcommand> ...``.

Exit codes: 0 success, 1 a checked property failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .density import SizeLimitExceeded, density_report
from .experiments import (
    ConfigError,
    ExperimentConfig,
    run_bias_curve,
    run_hitting_time,
    run_threshold_scan,
    run_tree_game,
    write_csv,
)
from .game import Side, play
from .goals import ComponentAtLeast, ContainsCopy, MaxDegreeAtLeast, PathAtLeast
from .graph import Graph, GraphError, make_gnp, named_graph, read_graph
from .solver import Counterexample, SolverBudgetExceeded, critical_bias, solve, verify_strategy
from .strategies.base import PreconditionFailed
from .strategies.registry import StrategyContext, UnknownStrategy, make_client, make_waiter
from .structure import biconnected_components, classify_edges_triangles, h_core, k3_core

OK, VIOLATION, USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def parse_board(text: str) -> Graph:
    """A named graph (``K6``, ``K5-e``, ``C4``), ``gnp:n:p:seed``, or a file."""
    if text.startswith("gnp:"):
        try:
            _, n, p, seed = text.split(":")
            return make_gnp(int(n), float(p), int(seed))
        except ValueError as exc:
            raise UsageError(f"--board {text!r}: expected gnp:n:p:seed") from exc
    if Path(text).is_file():
        return read_graph(text)
    return named_graph(text)


def parse_goal(text: str):
    """``K3``-style pattern names, or ``component:s``, ``path:l``, ``degree:k``."""
    kind, _, arg = text.partition(":")
    if arg:
        if not arg.isdigit():
            raise UsageError(f"--goal {text!r}: size must be a non-negative integer")
        size = int(arg)
        if kind == "component":
            return ComponentAtLeast(size)
        if kind == "path":
            return PathAtLeast(size)
        if kind == "degree":
            return MaxDegreeAtLeast(size)
        raise UsageError(f"--goal {text!r}: unknown goal kind {kind!r}")
    return ContainsCopy(named_graph(text))


def _game_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--board", required=True, help="K6, K5-e, C4, gnp:n:p:seed or a graph file")
    p.add_argument("--goal", required=True, help="pattern name (K3) or component:s, path:l, degree:k")
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--variant", default="cw", choices=["cw", "wc"])


def _experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir")
    p.add_argument("--format", choices=["csv", "svg", "both"])
    p.add_argument("--n", help="comma-separated n grid")
    p.add_argument("--q", help="comma-separated biases (integers or c*n^a/b)")
    p.add_argument("--reps", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="clientwaiter", description="Biased Client-Waiter and Waiter-Client games on graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="exact winner under perfect play")
    _game_args(p)
    p.add_argument("--critical", type=int, metavar="Q_MAX", help="report the critical bias up to Q_MAX instead")
    p.add_argument("--max-edges", type=int, default=16)

    p = sub.add_parser("verify", help="check a strategy against every opponent line")
    _game_args(p)
    p.add_argument("--strategy", required=True, help="strategy key, e.g. star or k3_bias2")
    p.add_argument("--side", choices=["waiter", "client"], default="waiter")

    p = sub.add_parser("play", help="one game between two strategies")
    _game_args(p)
    p.add_argument("--waiter", default="random")
    p.add_argument("--client", default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", action="store_true", help="print the move record")

    for name, helptext in (
        ("bias-curve", "star / component / path measurements across biases"),
        ("threshold", "Client win rate of the pattern game on G(n,p)"),
        ("hitting-time", "Client-win versus K5-e hitting times"),
        ("tree-game", "transversal Client on the m-ary tree"),
    ):
        p = sub.add_parser(name, help=helptext)
        _experiment_args(p)
        if name == "bias-curve":
            p.add_argument("--waiter")
            p.add_argument("--clients")
        if name == "threshold":
            p.add_argument("--pattern")
            p.add_argument("--c", help="comma-separated multiples of n^(-1/m2(H))")
            p.add_argument("--p", help="comma-separated edge probabilities")
        if name == "tree-game":
            p.add_argument("--k", type=int)
            p.add_argument("--m", type=int)
            p.add_argument("--waiter", help="comma-separated Waiter keys")

    p = sub.add_parser("graph", help="structural reports")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="infile", help="graph file ('n m' then 'u v' lines)")
    src.add_argument("--board", help="named graph or gnp:n:p:seed")
    p.add_argument("--report", choices=["density", "core", "decompose", "edges"], default="density")
    p.add_argument("--pattern", default="K3", help="pattern for --report core")
    return ap


def _cmd_solve(a) -> int:
    board, goal = parse_board(a.board), parse_goal(a.goal)
    if a.critical:
        qc = critical_bias(board, goal, a.critical, a.variant, max_edges=a.max_edges)
        print(f"q_c = {qc if qc is not None else 'none (Waiter wins at q=1)'}")
        return OK
    res = solve(board, goal, a.q, a.variant, max_edges=a.max_edges)
    print(res.winner.value)
    print(f"positions={res.nodes} relevant_edges={res.relevant_edges}", file=sys.stderr)
    return OK


def _cmd_verify(a) -> int:
    board, goal = parse_board(a.board), parse_goal(a.goal)
    ctx = StrategyContext(board, a.q, pattern=getattr(goal, "pattern", None))
    strat = make_waiter(a.strategy, ctx) if a.side == "waiter" else make_client(a.strategy, ctx)
    res = verify_strategy(strat, board, goal, a.q, a.variant, side=Side(a.side.capitalize()))
    if isinstance(res, Counterexample):
        print("Counterexample")
        print(res.serialize())
        return VIOLATION
    print(f"Verified ({res.positions} positions)")
    return OK


def _cmd_play(a) -> int:
    board, goal = parse_board(a.board), parse_goal(a.goal)
    ctx = StrategyContext(board, a.q, pattern=getattr(goal, "pattern", None), seed=a.seed)
    rec = play(board, goal, a.q, a.variant, make_waiter(a.waiter, ctx), make_client(a.client, ctx), seed=a.seed)
    if a.trace:
        print(rec.serialize())
    print(rec.winner.value)
    return OK


def _config(a, kind: str, **extra) -> ExperimentConfig:
    overrides = {
        "kind": kind,
        "seed": a.seed,
        "out_dir": a.out_dir,
        "format": a.format,
        "n": a.n,
        "q": a.q,
        "reps": a.reps,
        **extra,
    }
    if a.config:
        return ExperimentConfig.from_file(a.config, **overrides)
    return ExperimentConfig.from_mapping(overrides)


def _outputs(cfg: ExperimentConfig, stem: str, rows, plot=None) -> None:
    out = Path(cfg.out_dir)
    legend = f"{stem}: n={cfg.n} q={cfg.q} reps={cfg.reps} seed={cfg.seed}"
    if cfg.format in ("csv", "both"):
        print(f"wrote {write_csv(rows, out / f'{stem}.csv')}")
    if cfg.format in ("svg", "both") and plot is not None:
        print(f"wrote {plot(rows, out / f'{stem}.svg', legend)}")


def _print_rows(rows) -> None:
    for r in rows:
        ci = f" [{r['ci_low']}, {r['ci_high']}]" if r["ci_low"] != "" else ""
        bound = f" bound={r['bound']}" if r["bound"] != "" else ""
        print(f"n={r['n']} q={r['q']} {r['waiter']} {r['client']} {r['statistic']}={r['value']}{ci}{bound} {r['notes']}".rstrip())


def _cmd_bias_curve(a) -> int:
    from .plotting import plot_bias_curve

    cfg = _config(a, "bias-curve", waiter=a.waiter, clients=a.clients)
    rows = run_bias_curve(cfg)
    _print_rows(rows)
    _outputs(cfg, f"bias_curve_{cfg.waiter}", rows, plot_bias_curve)
    return VIOLATION if any(r["flagged"] for r in rows) else OK


def _cmd_threshold(a) -> int:
    from .plotting import plot_threshold

    cfg = _config(a, "threshold", pattern=a.pattern, c=a.c, p=a.p)
    rows = run_threshold_scan(cfg)
    _print_rows(rows)
    _outputs(cfg, f"threshold_{cfg.pattern}", rows, plot_threshold)
    return OK


def _cmd_hitting(a) -> int:
    from .plotting import plot_hitting_histogram

    cfg = _config(a, "hitting-time")
    rows, runs = run_hitting_time(cfg)
    _print_rows(rows)
    diffs = [r.tau_client - r.tau_k5e for r in runs if r.tau_client is not None and r.tau_k5e is not None]
    _outputs(cfg, "hitting_time", rows, lambda rows, path, legend: plot_hitting_histogram(diffs, path, legend))
    return VIOLATION if any(r["flagged"] for r in rows) else OK


def _cmd_tree(a) -> int:
    cfg = _config(a, "tree-game", k=a.k, m=a.m, waiter=a.waiter or "random,greedy_anti")
    rows = run_tree_game(cfg)
    _print_rows(rows)
    _outputs(cfg, "tree_game", rows)
    return VIOLATION if any(r["flagged"] for r in rows) else OK


def _cmd_graph(a) -> int:
    g = read_graph(a.infile) if a.infile else parse_board(a.board)
    if a.report == "density":
        for key, value in density_report(g).as_dict().items():
            print(f"{key} = {value}")
    elif a.report == "edges":
        for eid, cls in enumerate(classify_edges_triangles(g)):
            print(eid, *g.edges[eid], cls.value)
    elif a.report == "core":
        pattern = named_graph(a.pattern)
        tr = k3_core(g) if a.pattern == "K3" else h_core(g, pattern)
        print(f"core edges = {len(tr.core_edges)} of {g.e}")
        print(f"removal steps = {len(tr.removal_steps)}")
        for st in tr.removal_steps:
            print(f"  {st.kind}: offer {','.join(map(str, st.offer))}")
    else:
        for i, comp in enumerate(biconnected_components(g)):
            print(f"block {i}: {len(comp)} edges: {','.join(map(str, sorted(comp)))}")
    return OK


COMMANDS = {
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "play": _cmd_play,
    "bias-curve": _cmd_bias_curve,
    "threshold": _cmd_threshold,
    "hitting-time": _cmd_hitting,
    "tree-game": _cmd_tree,
    "graph": _cmd_graph,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError, GraphError, UnknownStrategy, PreconditionFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (SolverBudgetExceeded, SizeLimitExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
