"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or
``python3 tests/test_acceptance.py``; the lines are repeated in the
"acceptance criteria" section of the pytest summary.
"""

from __future__ import annotations

import sys
import time
from math import ceil, floor

import numpy as np
import pytest
from acceptance_log import LINES
from drive import drive
from instances import random_instance
from invariants import component_waiter_checker

from clientwaiter.density import arboricity, max_density
from clientwaiter.experiments import ExperimentConfig, run_hitting_time, run_threshold_scan, run_tree_game, wilson
from clientwaiter.families import ExplicitFamily
from clientwaiter.forests import hall_orientation, is_forest, nash_williams
from clientwaiter.game import Side, play
from clientwaiter.goals import ComponentAtLeast, ContainsCopy, FamilyGoal, MaxDegreeAtLeast, PathAtLeast, Transversal
from clientwaiter.graph import Graph, make_complete, make_gnp, make_mary_tree, named_graph
from clientwaiter.paths import longest_path
from clientwaiter.solver import Verified, naive_solve, solve, verify_strategy
from clientwaiter.strategies import StrategyParams, build_family, evaluate_criteria, star_bound, waiter_star
from clientwaiter.strategies.clients import AvoidPotentialClient, GreedyClient, RandomClient, RandomSubsetClient, TransversalPotentialClient
from clientwaiter.strategies.component import ComponentWaiter, PathWaiter
from clientwaiter.strategies.k3 import K3Bias2Waiter
from clientwaiter.strategies.waiters import RandomWaiter
from clientwaiter.structure import biconnected_components, find_copies, grow_core_trace, h_core, k3_core

pytestmark = pytest.mark.acceptance

K3 = make_complete(3)


def record(num: int, title: str, ok: bool, detail: str, started: float, limit_s: float) -> None:
    elapsed = time.perf_counter() - started
    ok = ok and elapsed < limit_s
    line = f"{'PASS' if ok else 'FAIL'} {num:>2} {title}: {detail} [{elapsed:.1f}s, limit {limit_s:.0f}s]"
    LINES.append(line)
    print(line)
    assert ok, line


def ci(successes: int, trials: int) -> str:
    lo, hi = wilson(successes, trials)
    return f"95% CI [{lo:.3f}, {hi:.3f}]"


# -- 1 ----------------------------------------------------------------------------------


def test_01_solver_matches_naive_recursion():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240501)
    mismatches = []
    for i in range(500):
        board, goal, q, variant = random_instance(rng, max_edges=8)
        fast = solve(board, goal, q, variant).winner
        slow = naive_solve(board, goal, q, variant)
        if fast != slow:
            mismatches.append((i, board.edges, goal, q, variant, fast, slow))
    record(1, "solver == naive recursion", not mismatches, f"500 instances, {len(mismatches)} mismatches", t0, 120)


# -- 2 ----------------------------------------------------------------------------------


def test_02_triangle_anchor_games():
    t0 = time.perf_counter()
    k6 = solve(make_complete(6), ContainsCopy(K3), 2, "cw")
    k5e = solve(named_graph("K5-e"), ContainsCopy(K3), 1, "cw")
    ok = k6.winner is Side.WAITER and k5e.winner is Side.CLIENT
    detail = f"CW(K6,K3,2)={k6.winner.value}, CW(K5-e,K3,1)={k5e.winner.value}"
    record(2, "triangle anchor games", ok, detail, t0, 600)


# -- 3 ----------------------------------------------------------------------------------


def test_03_star_waiter_degree_bound():
    t0 = time.perf_counter()
    failures = []
    for n in range(2, 8):
        for q in range(1, 7):
            bound = star_bound(n, q)
            res = verify_strategy(waiter_star(q), make_complete(n), MaxDegreeAtLeast(bound + 1), q, "cw")
            if not isinstance(res, Verified):
                failures.append(("exhaustive", n, q))
    games = 0
    worst = 0.0
    n = 200
    for q in (1, 2, 3, 6, 12, 50):
        bound = star_bound(n, q)
        for seed in range(3):
            for client in (GreedyClient(), RandomClient()):
                rec = play(make_complete(n), MaxDegreeAtLeast(n), q, "cw", waiter_star(q), client, seed=seed, early_stop=False)
                deg = rec.final.client_graph().max_degree()
                worst = max(worst, deg / bound)
                games += 1
                if deg > bound:
                    failures.append(("simulated", q, seed, client.name, deg, bound))
    detail = f"K_n n<=7 q<=6 exhaustive + {games} games at n=200, {len(failures)} violations, max deg/bound={worst:.3f}"
    record(3, "star Waiter max-degree bound", not failures, detail, t0, 600)


# -- 4 ----------------------------------------------------------------------------------


def test_04_component_waiter_invariants():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    bad = []
    for game in range(1000):
        n = int(rng.integers(30, 121))
        q = int(rng.integers(n - 1, 4 * (n - 1) + 1))
        client = GreedyClient() if game % 2 else RandomClient()
        hook, final = component_waiter_checker()
        w = ComponentWaiter()
        state = drive(make_complete(n), ComponentAtLeast(n + 1), q, "cw", w, client, seed=game, before_offer=hook)
        errs = final(state, w)
        if errs:
            bad.append((n, q, game, errs[:2]))
    record(4, "component Waiter invariants", not bad, f"1000 games n in [30,120], q in [n-1,4(n-1)], {len(bad)} with violations", t0, 300)


# -- 5 ----------------------------------------------------------------------------------


def test_05_component_size_at_huge_bias():
    t0 = time.perf_counter()
    worst = 0
    games = 0
    for n in (60, 100):
        q = ceil(6 * n ** (4 / 3) - 1e-9)
        board = make_complete(n)
        for rep in range(125):
            for client in (RandomClient(), GreedyClient()):
                rec = play(board, ComponentAtLeast(n + 1), q, "cw", ComponentWaiter(), client, seed=rep, early_stop=False)
                worst = max(worst, max(len(c) for c in rec.final.client_graph().components()))
                games += 1
    record(5, "max Client component < 9", worst < 9, f"{games} games at n in (60,100), largest component {worst}", t0, 300)


# -- 6 ----------------------------------------------------------------------------------


def test_06_path_waiter_short_paths():
    t0 = time.perf_counter()
    n = 20
    q = ceil(3 * n ** (4 / 3) - 1e-9)
    board = make_complete(n)
    # exhaustive over every Client line of play, which covers the first four plies
    res = verify_strategy(PathWaiter(), board, PathAtLeast(4), q, "cw")
    longest = 0
    for seed in range(1000):
        client = GreedyClient() if seed % 2 else RandomClient()
        rec = play(board, PathAtLeast(n), q, "cw", PathWaiter(), client, seed=seed, early_stop=False)
        longest = max(longest, longest_path(rec.final.client_graph(), require_exact=True).length)
    ok = isinstance(res, Verified) and longest <= 3
    detail = f"q={q}, exhaustive {type(res).__name__}({getattr(res, 'positions', '-')} positions), 1000 games longest path {longest}"
    record(6, "path Waiter keeps paths <= 3 edges", ok, detail, t0, 300)


# -- 7 ----------------------------------------------------------------------------------


def _small_board(rng: np.random.Generator) -> Graph:
    n = int(rng.integers(4, 8))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    e = int(rng.integers(3, min(12, len(pairs)) + 1))
    pick = sorted(rng.choice(len(pairs), size=e, replace=False).tolist())
    return Graph(n, tuple(pairs[i] for i in pick))


def _criterion_family(rng: np.random.Generator, board: Graph, q: int, avoid: bool) -> ExplicitFamily:
    while True:
        members = tuple(
            frozenset(rng.choice(board.e, size=int(rng.integers(1, board.e + 1)), replace=False).tolist())
            for _ in range(int(rng.integers(1, 5)))
        )
        fam = ExplicitFamily(members)
        crit = evaluate_criteria(fam, q)
        if crit.avoid_holds() if avoid else crit.transversal_holds():
            return fam


def test_07_potential_clients_sound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    losses = []
    for i in range(300):
        board = _small_board(rng)
        q = int(rng.integers(1, 3))
        avoid = i % 2 == 0
        fam = _criterion_family(rng, board, q, avoid)
        if avoid:
            res = verify_strategy(AvoidPotentialClient(fam, q), board, FamilyGoal(fam), q, "wc", side=Side.CLIENT)
        else:
            res = verify_strategy(TransversalPotentialClient(fam, q), board, Transversal(fam), q, "cw", side=Side.CLIENT)
        if not isinstance(res, Verified):
            losses.append((i, board.edges, fam.members(), q, avoid))
    record(7, "potential Clients win when criterion holds", not losses, f"300 boards (150 avoid, 150 transversal), {len(losses)} losses", t0, 1200)


# -- 8 ----------------------------------------------------------------------------------


def test_08_random_subset_distribution():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    pairs = [(u, v) for u in range(10) for v in range(u + 1, 10)]
    board = Graph(10, tuple(pairs[i] for i in sorted(rng.choice(len(pairs), size=30, replace=False).tolist())))
    q = 2
    triangles = ExplicitFamily(tuple(frozenset(c) for c in find_copies(board, K3)))
    phi = evaluate_criteria(triangles, q).phi_ES
    need = floor(board.e / (q + 1))
    runs = 100_000
    hits = np.zeros(board.e)
    joint = 0
    goal = ComponentAtLeast(board.n + 1)
    for seed in range(runs):
        client = RandomSubsetClient()
        play(board, goal, q, "cw", RandomWaiter(), client, seed=seed, early_stop=False)
        marked = set(client.marked)
        hits[list(marked)] += 1
        inside = sum(1 for t in triangles.members() if t <= marked)
        joint += len(marked) >= need and inside <= 2 * phi
    dev = float(np.max(np.abs(hits / runs - 1 / (q + 1))))
    ok = dev <= 0.01 and joint > 0
    detail = f"{runs} runs, max |Pr[x in X_C] - 1/3| = {dev:.4f}, joint event {joint}/{runs} (Phi={phi:.3f}, {len(triangles.members())} triangles)"
    record(8, "random-subset Client marginals", ok, detail, t0, 300)


# -- 9 ----------------------------------------------------------------------------------


def _relabel(g: Graph, perm) -> Graph:
    return Graph(g.n, tuple((perm[u], perm[v]) for u, v in g.edges))


def _pairs(g: Graph, eids) -> set[tuple[int, int]]:
    return {tuple(sorted(g.edges[i])) for i in eids}


def test_09_graph_machinery():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    bad = []
    traces = 0
    for i in range(200):
        n = int(rng.integers(2, 21))
        g = make_gnp(n, float(rng.uniform(0.1, 0.9)), rng)
        dec = nash_williams(g)
        forests = dec.forests()
        target = ceil(arboricity(g)) if g.e else 0
        if dec.f != target or any(not is_forest(g, f) for f in forests) or sorted(x for f in forests for x in f) != list(range(g.e)):
            bad.append(("nash_williams", i))
        if g.e:
            k = max(1, ceil(max_density(g)))
            if max(hall_orientation(g, k).outdegrees(g.n)) > k:
                bad.append(("orientation", i))
        perm = rng.permutation(n).tolist()
        h = _relabel(g, perm)
        for core_of in (k3_core, lambda x: h_core(x, K3)):
            core = core_of(g)
            sub = g.edge_subgraph(core.core_edges)
            if _pairs(sub, core_of(sub).core_edges) != _pairs(g, core.core_edges):
                bad.append(("idempotent", i))
            mapped = {tuple(sorted((perm[u], perm[v]))) for u, v in _pairs(g, core.core_edges)}
            if _pairs(h, core_of(h).core_edges) != mapped:
                bad.append(("invariant", i))
        core = k3_core(g)
        for block in biconnected_components(core.core):
            comp, _ = core.core.edge_subgraph(block).compact()
            trace = grow_core_trace(comp)
            traces += 1
            if not all(trace.bound_holds()):
                bad.append(("growth", i))
    detail = f"200 graphs v<=20, {traces} growth traces, {len(bad)} violations"
    record(9, "forests, orientations, cores", not bad, detail, t0, 600)


# -- 10 ---------------------------------------------------------------------------------


def test_10_k3_bias2_waiter_on_catalog():
    from catalog import load_catalog

    t0 = time.perf_counter()
    graphs = load_catalog()
    bad = []
    for g in graphs:
        res = verify_strategy(K3Bias2Waiter(), g, ContainsCopy(K3), 2, "cw")
        verdict = solve(g, ContainsCopy(K3), 2, "cw").winner
        if not isinstance(res, Verified) or verdict is not Side.WAITER:
            bad.append((g.edges, type(res).__name__, verdict))
    detail = f"{len(graphs)} connected graphs v<=8 m<=2, {len(bad)} discrepancies"
    record(10, "K3 bias-2 Waiter on every m<=2 graph", not bad, detail, t0, 1800)


# -- 11 ---------------------------------------------------------------------------------


def test_11_triangle_threshold_scan():
    t0 = time.perf_counter()
    cfg = ExperimentConfig.from_mapping({"kind": "threshold", "n": "80", "q": "2", "c": "0.3,3", "reps": "200", "seed": "11"})
    low, high = run_threshold_scan(cfg)
    rate_low = low["successes"] / low["trials"]
    rate_high = high["successes"] / high["trials"]
    ok = rate_low <= 0.1 and rate_high >= 0.9
    detail = (
        f"soft: c=0.3 win rate {rate_low:.3f} {ci(low['successes'], low['trials'])}; "
        f"c=3 win rate {rate_high:.3f} {ci(high['successes'], high['trials'])}; "
        f"notes {low['notes']} | {high['notes']}"
    )
    record(11, "threshold scan K3 q=2 n=80", ok, detail, t0, 1800)


# -- 12 ---------------------------------------------------------------------------------


def test_12_hitting_time():
    t0 = time.perf_counter()
    cfg = ExperimentConfig.from_mapping({"kind": "hitting-time", "n": "40", "reps": "200", "seed": "12"})
    rows, runs = run_hitting_time(cfg)
    agree = sum(r.tau_client == r.tau_k5e for r in runs)
    early = sum(r.tau_client is not None and r.tau_k5e is not None and r.tau_client < r.tau_k5e for r in runs)
    ok = agree / len(runs) >= 0.9 and early == 0
    detail = (
        f"agreement {agree}/{len(runs)} {ci(agree, len(runs))} (soft, need >= 0.9); "
        f"Client win before K5-e in {early}/{len(runs)} runs (hard, need 0); histogram {rows[2]['value']}"
    )
    record(12, "hitting time n=40", ok, detail, t0, 1800)


# -- 13 ---------------------------------------------------------------------------------


def test_13_tree_game():
    t0 = time.perf_counter()
    tree = make_mary_tree(16, 2)
    family = build_family("tree_outedges", tree, StrategyParams(q=1, k=2, m=16), 1)
    phi_t = evaluate_criteria(family, 1).phi_T
    cfg = ExperimentConfig.from_mapping({"kind": "tree-game", "q": "1", "k": "2", "m": "16", "reps": "100", "waiter": "random,greedy_anti", "seed": "13"})
    rows = run_tree_game(cfg)
    wins = {r["waiter"]: r["successes"] for r in rows}
    ok = phi_t < 1 and all(w == 100 for w in wins.values()) and len(wins) == 2
    detail = f"phi_T={phi_t:.4f}, Client wins {wins} out of 100 each"
    record(13, "tree game m=16 k=2 q=1", ok, detail, t0, 300)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", *sys.argv[1:]]))
