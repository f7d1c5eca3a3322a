import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from instances import random_instance

from clientwaiter.game import Side, new_game, replay
from clientwaiter.goals import ContainsCopy, MaxDegreeAtLeast, evaluate
from clientwaiter.graph import Graph, make_complete, named_graph
from clientwaiter.solver import (
    Counterexample,
    SolverBudgetExceeded,
    Verified,
    critical_bias,
    naive_solve,
    solve,
    verify_strategy,
)
from clientwaiter.strategies.base import WaiterStrategy
from clientwaiter.strategies.star import StarWaiter
from clientwaiter.strategies.waiters import SolverWaiter

K3 = named_graph("K3")


class SingletonWaiter(WaiterStrategy):
    """Offers one edge at a time, so Client simply takes everything."""

    history_free = True

    def offer(self, state):
        return (state.free_edges()[0],)


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_solver_matches_naive(seed):
    board, goal, q, variant = random_instance(np.random.default_rng(seed), max_edges=7)
    assert solve(board, goal, q, variant).winner == naive_solve(board, goal, q, variant)


def test_anchor_positions():
    assert solve(make_complete(6), ContainsCopy(K3), 2, "cw").winner is Side.WAITER
    assert solve(named_graph("K5-e"), ContainsCopy(K3), 1, "cw").winner is Side.CLIENT
    for q in (2, 3, 4):
        assert solve(K3, ContainsCopy(K3), q, "cw").winner is Side.WAITER
    assert solve(K3, ContainsCopy(K3), 1, "cw").winner == naive_solve(K3, ContainsCopy(K3), 1, "cw")


def test_critical_bias():
    edge = Graph(2, ((0, 1),))
    assert critical_bias(edge, ContainsCopy(edge), 4) == 4
    k4 = critical_bias(make_complete(4), ContainsCopy(K3), 5)
    naive = [naive_solve(make_complete(4), ContainsCopy(K3), q, "cw") for q in range(1, 6)]
    expected = max((q for q, w in enumerate(naive, 1) if w is Side.CLIENT), default=None)
    assert k4 == expected
    assert critical_bias(named_graph("K5-e"), ContainsCopy(K3), 2) >= 1


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_client_waiter_monotone_in_bias(seed):
    rng = np.random.default_rng(seed)
    board, goal, _, _ = random_instance(rng, max_edges=8)
    outcomes = [solve(board, goal, q, "cw").winner for q in (1, 2, 3)]
    for lo, hi in zip(outcomes, outcomes[1:]):
        assert not (lo is Side.WAITER and hi is Side.CLIENT)


def test_budget_guard():
    with pytest.raises(SolverBudgetExceeded):
        solve(make_complete(8), ContainsCopy(K3), 1, "cw", max_edges=10)


def test_verify_star_positive_and_negative():
    k5 = make_complete(5)
    assert isinstance(verify_strategy(StarWaiter(3), k5, MaxDegreeAtLeast(3), 3, "cw"), Verified)
    res = verify_strategy(StarWaiter(3), k5, MaxDegreeAtLeast(2), 3, "cw")
    assert isinstance(res, Counterexample)


def test_broken_strategy_counterexample_replays():
    board = make_complete(4)
    res = verify_strategy(SingletonWaiter(), board, ContainsCopy(K3), 1, "cw")
    assert isinstance(res, Counterexample)
    final = replay(new_game(board, ContainsCopy(K3), 1, "cw"), res.serialize())
    assert evaluate(ContainsCopy(K3), final.client_graph())
    assert res.record.winner is Side.CLIENT


def test_solver_waiter_policy_verifies():
    res = verify_strategy(SolverWaiter(), make_complete(6), ContainsCopy(K3), 2, "cw")
    assert isinstance(res, Verified)
    sol = solve(make_complete(6), ContainsCopy(K3), 2, "cw", want_policy=True)
    assert sol.policy
