from itertools import combinations
from math import ceil

import numpy as np
import pytest
from drive import drive
from hypothesis import given, settings
from hypothesis import strategies as st
from invariants import component_waiter_checker, path_waiter_checker

from clientwaiter.families import ExplicitFamily
from clientwaiter.game import Side, play
from clientwaiter.goals import ComponentAtLeast, ContainsCopy, FamilyGoal, MaxDegreeAtLeast, PathAtLeast, Transversal
from clientwaiter.graph import Graph, make_complete, make_cycle, make_gnp, make_mary_tree, make_path, named_graph
from clientwaiter.solver import Counterexample, Verified, solve, verify_strategy
from clientwaiter.strategies import (
    PreconditionFailed,
    StrategyParams,
    build_family,
    evaluate_criteria,
    star_bound,
    waiter_core_reduction,
    waiter_dispatch,
    waiter_forest,
    waiter_k3_bias2,
    waiter_orientation,
    waiter_star,
)
from clientwaiter.strategies.base import ArbitraryWaiter, WaiterStrategy
from clientwaiter.strategies.clients import (
    AvoidPotentialClient,
    GreedyClient,
    RandomClient,
    RandomSubsetClient,
    TransversalPotentialClient,
)
from clientwaiter.strategies.component import ComponentWaiter, PathWaiter, component_aux_bias
from clientwaiter.strategies.criteria import InvalidParameters, exact_es, tree_condition
from clientwaiter.strategies.dispatch import NoApplicableStrategy, routing_case
from clientwaiter.strategies.registry import StrategyContext, UnknownStrategy, make_client, make_waiter

K3, C4, K4 = named_graph("K3"), named_graph("C4"), named_graph("K4")


# -- star -----------------------------------------------------------------------------


def test_star_bound_values():
    assert star_bound(7, 3) == 4
    assert star_bound(5, 3) == 2
    for n in (10, 30):
        for k in (1, 2, 3):
            q = ceil(n / k) - 2
            if q >= 1:
                assert star_bound(n, q) <= 2 * k


def test_star_huge_bias_on_k4():
    # offers stay at one vertex, so Client still collects a short path
    assert star_bound(4, 5) == 2
    res = verify_strategy(waiter_star(5), K4, MaxDegreeAtLeast(3), 5, "cw")
    assert isinstance(res, Verified)


@pytest.mark.parametrize("n,q", [(5, 3), (6, 2), (7, 3)])
def test_star_verified_exhaustively(n, q):
    bound = star_bound(n, q)
    res = verify_strategy(waiter_star(q), make_complete(n), MaxDegreeAtLeast(bound + 1), q, "cw")
    assert isinstance(res, Verified)


def test_star_simulated_against_greedy():
    n, q = 60, 5
    for client in (GreedyClient(), RandomClient()):
        rec = play(make_complete(n), MaxDegreeAtLeast(n), q, "cw", waiter_star(q), client, seed=3, early_stop=False)
        assert rec.final.client_graph().max_degree() <= star_bound(n, q)


# -- component and path Waiters -----------------------------------------------------------


def test_component_waiter_precondition():
    with pytest.raises(PreconditionFailed):
        play(make_complete(10), ComponentAtLeast(11), 3, "cw", ComponentWaiter(), RandomClient(), seed=0, early_stop=False)


def test_aux_bias():
    assert [component_aux_bias(q) for q in (2, 5, 8, 11)] == [0, 1, 2, 3]


@settings(max_examples=15)
@given(st.integers(8, 40), st.integers(0, 3), st.booleans(), st.integers(0, 10**6))
def test_component_waiter_invariants(n, qscale, greedy, seed):
    q = (n - 1) * (1 + qscale)
    hook, final = component_waiter_checker()
    w = ComponentWaiter()
    client = GreedyClient() if greedy else RandomClient()
    state = drive(make_complete(n), ComponentAtLeast(n + 1), q, "cw", w, client, seed, hook)
    assert final(state, w) == []


@settings(max_examples=15)
@given(st.integers(8, 40), st.integers(0, 3), st.integers(0, 10**6))
def test_path_waiter_invariants(n, qscale, seed):
    q = (n - 1) * (1 + qscale)
    hook, final = path_waiter_checker()
    w = PathWaiter()
    state = drive(make_complete(n), PathAtLeast(n), q, "cw", w, RandomClient(), seed, hook)
    assert final(state, w) == []


# -- orientation, forests, triangles ------------------------------------------------


def test_orientation_on_cycle():
    res = verify_strategy(waiter_orientation(make_cycle(6), K3), make_cycle(6), ContainsCopy(K3), 1, "cw")
    assert isinstance(res, Verified)


def test_orientation_keeps_k4_away_on_sparse_boards():
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(40):
        g = make_gnp(7, 0.45, rng)
        if g.e > 14 or not g.e:
            continue
        try:
            w = waiter_orientation(g, K4)
            res = verify_strategy(w, g, ContainsCopy(K4), 1, "cw")
        except PreconditionFailed:
            continue
        assert isinstance(res, Verified)
        checked += 1
    assert checked > 0


def test_forest_waiter():
    res = verify_strategy(waiter_forest(C4, C4), C4, ContainsCopy(C4), 1, "cw")
    assert isinstance(res, Verified)
    tree = make_path(6)
    res = verify_strategy(waiter_forest(tree, C4), tree, ContainsCopy(C4), 1, "cw")
    assert isinstance(res, Verified)


def test_k3_bias2():
    with pytest.raises(PreconditionFailed):
        play(make_complete(6), ContainsCopy(K3), 2, "cw", waiter_k3_bias2(), RandomClient(), seed=0)
    assert solve(make_complete(6), ContainsCopy(K3), 2, "cw").winner is Side.WAITER
    for g in (make_cycle(5), named_graph("K5-e").edge_subgraph(range(8)), named_graph("K4")):
        assert isinstance(verify_strategy(waiter_k3_bias2(), g, ContainsCopy(K3), 2, "cw"), Verified)


def test_core_reduction_pendant_triangle():
    board = Graph(6, K4.edges + ((3, 4), (4, 5), (3, 5)))
    for q in (1, 2):
        if solve(board, ContainsCopy(K3), q, "cw").winner is Side.WAITER:
            res = verify_strategy(waiter_core_reduction(board, K3), board, ContainsCopy(K3), q, "cw")
            assert isinstance(res, Verified)
    triangle_free = make_cycle(7)
    res = verify_strategy(waiter_core_reduction(triangle_free, K3), triangle_free, ContainsCopy(K3), 1, "cw")
    assert isinstance(res, Verified)


def test_dispatch_routing():
    w = waiter_dispatch(C4, C4)
    assert w.case == "b.iv"
    assert isinstance(verify_strategy(w, C4, ContainsCopy(C4), 1, "cw"), Verified)
    assert routing_case(K4) == "b.iv"
    assert routing_case(make_cycle(5)) == "a"
    with pytest.raises(PreconditionFailed):
        waiter_dispatch(C4, make_path(4))
    with pytest.raises(PreconditionFailed):
        waiter_dispatch(C4, K3)
    with pytest.raises(NoApplicableStrategy):
        waiter_dispatch(make_complete(6), C4)


def test_dispatch_k4_on_sparse_board():
    g = Graph(6, ((0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3), (3, 4), (4, 5), (5, 3)))
    w = waiter_dispatch(g, K4)
    assert isinstance(verify_strategy(w, g, ContainsCopy(K4), 1, "cw"), Verified)


# -- potential Clients ---------------------------------------------------------------


def test_random_subset_full_offers_mark_everything():
    c = RandomSubsetClient()
    rec = play(make_complete(5), ComponentAtLeast(6), 2, "cw", ArbitraryWaiter(), c, seed=1, early_stop=False)
    assert sorted(c.marked) == rec.final.client_edges()


class SingletonWaiter(WaiterStrategy):
    def offer(self, state):
        return (state.free_edges()[0],)


def test_random_subset_singleton_offers_are_binomial():
    c = RandomSubsetClient()
    counts = []
    for seed in range(2000):
        play(make_complete(4), ComponentAtLeast(5), 2, "cw", SingletonWaiter(), c, seed=seed, early_stop=False)
        counts.append(len(c.marked))
    assert abs(np.mean(counts) - 6 / 3) < 0.1


def test_random_subset_marginals():
    board = make_complete(6)
    hits = np.zeros(board.e)
    runs = 3000
    for seed in range(runs):
        c = RandomSubsetClient()
        play(board, ComponentAtLeast(7), 2, "cw", RandomWaiterFixed(), c, seed=seed, early_stop=False)
        hits[c.marked] += 1
    assert np.all(np.abs(hits / runs - 1 / 3) < 0.04)


class RandomWaiterFixed(WaiterStrategy):
    """Random offer sizes, so marking probabilities vary by turn."""

    def reset(self, rng=None):
        self.rng = rng

    def offer(self, state):
        free = state.free_edges()
        k = int(self.rng.integers(1, min(state.q + 1, len(free)) + 1))
        return tuple(sorted(self.rng.choice(free, size=k, replace=False).tolist()))


def test_avoid_potential_three_pairs():
    fam = ExplicitFamily(({0, 1}, {2, 3}, {4, 5}))
    assert evaluate_criteria(fam, 1).phi_ES == pytest.approx(0.75)
    res = verify_strategy(AvoidPotentialClient(fam, 1), K4, FamilyGoal(fam), 1, "wc", side=Side.CLIENT)
    assert isinstance(res, Verified)


def test_avoid_potential_violating_family_can_lose():
    # q+1 singletons covering one offer: Client must take one of them
    fam = ExplicitFamily(({0}, {1}))
    assert not evaluate_criteria(fam, 1).avoid_holds()
    res = verify_strategy(AvoidPotentialClient(fam, 1, check_monotone=False), K3, FamilyGoal(fam), 1, "wc", side=Side.CLIENT)
    assert isinstance(res, Counterexample)


def test_transversal_single_member():
    fam = ExplicitFamily((frozenset(range(6)),))
    res = verify_strategy(TransversalPotentialClient(fam, 2), K4, Transversal(fam), 2, "cw", side=Side.CLIENT)
    assert isinstance(res, Verified)


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1))
def test_transversal_on_random_criterion_families(seed):
    rng = np.random.default_rng(seed)
    board = make_gnp(6, 0.6, rng)
    if board.e < 4 or board.e > 10:
        return
    q = int(rng.integers(1, 3))
    members = tuple(frozenset(rng.choice(board.e, size=int(rng.integers(4, board.e + 1)), replace=False).tolist()) for _ in range(2))
    fam = ExplicitFamily(members)
    if not evaluate_criteria(fam, q).transversal_holds():
        return
    res = verify_strategy(TransversalPotentialClient(fam, q), board, Transversal(fam), q, "cw", side=Side.CLIENT)
    assert isinstance(res, Verified)


# -- families and criteria ----------------------------------------------------------------


def test_tree_outedges_family():
    tree = make_mary_tree(4, 2)
    fam = build_family("tree_outedges", tree, StrategyParams(q=1, k=2))
    assert fam.member_sizes() == {3: 20}
    assert len(fam.members()) == 20


def test_disjoint_cut_on_k4():
    fam = build_family("disjoint_cut", K4, StrategyParams(q=1, delta=0.25))
    members = fam.members()
    assert len(members) == 6 and all(len(m) == 1 for m in members)


@settings(max_examples=30)
@given(st.lists(st.booleans(), min_size=10, max_size=10))
def test_sparse_component_family_matches_scan(mask):
    k5 = make_complete(5)
    fam = build_family("sparse_component", k5, StrategyParams(q=1, delta=0.25, theta=1.0))
    chosen = [i for i, keep in enumerate(mask) if keep]
    expected = False
    for size in range(2, 6):
        for vs in combinations(range(5), size):
            inside = sum(1 for i in chosen if set(k5.edges[i]) <= set(vs))
            if inside >= ceil(1.25 * size):
                expected = True
    assert fam.any_contained(chosen) == expected


def test_criteria_values():
    fam = ExplicitFamily((frozenset({0, 1, 2}),))
    assert exact_es(fam, 1) == pytest.approx(1 / 8)
    tree = make_mary_tree(16, 2)
    tfam = build_family("tree_outedges", tree, StrategyParams.for_tree(2, 1))
    assert evaluate_criteria(tfam, 1).phi_T < 1
    lhs, rhs = tree_condition(2, 1, 16)
    assert lhs == pytest.approx(13.09, abs=0.01) and rhs == 14 and lhs < rhs


def test_parameter_validation():
    with pytest.raises(InvalidParameters):
        StrategyParams(q=0)
    p = StrategyParams.for_component(0.5)
    assert p.delta == pytest.approx(1.0)
    with pytest.raises(InvalidParameters):
        StrategyParams(q=1, eps=0.5, delta=0.3, theta=0.1, checks=("component",))


# -- registry -------------------------------------------------------------------------------


def test_registry_keys():
    ctx = StrategyContext(make_complete(5), 2, pattern=K3)
    assert make_waiter("star", ctx).name == "star"
    assert make_client("random", ctx) is not None
    tree = make_mary_tree(4, 2)
    tctx = StrategyContext(tree.graph, 1, family_source=tree, params=StrategyParams(q=1, k=2))
    assert isinstance(make_client("transversal:tree_outedges", tctx), TransversalPotentialClient)
    with pytest.raises(UnknownStrategy):
        make_waiter("nope", ctx)
    with pytest.raises(UnknownStrategy):
        make_waiter("orientation", StrategyContext(K4, 1))
