import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from clientwaiter.decide import CopyGameDecider, k5_minus_edge, triangle_playout
from clientwaiter.game import Side
from clientwaiter.goals import ContainsCopy
from clientwaiter.graph import Graph, make_complete, make_cycle, make_gnp, named_graph
from clientwaiter.solver import solve

K3 = named_graph("K3")


def test_known_boards():
    unbiased = CopyGameDecider(K3, 1, gadgets=(k5_minus_edge(),))
    assert unbiased.decide(named_graph("K5-e")).winner is Side.CLIENT
    assert unbiased.decide(make_cycle(9)).winner is Side.WAITER
    assert unbiased.decide(make_cycle(9)).methods == set() or unbiased.decide(make_cycle(9)).certified
    biased = CopyGameDecider(K3, 2)
    dec = biased.decide(make_complete(6))
    assert dec.winner is Side.WAITER and dec.certified


def test_gadget_shortcut_agrees_with_solver():
    gadget_free = CopyGameDecider(K3, 1)
    assert gadget_free.decide(named_graph("K5-e")).winner is Side.CLIENT


def test_two_blocks_one_client_win():
    # K5-e glued at a vertex to a triangle: Client wins through the dense block
    k5e = named_graph("K5-e")
    edges = k5e.edges + ((4, 5), (5, 6), (4, 6))
    dec = CopyGameDecider(K3, 1).decide(Graph(7, edges))
    assert dec.winner is Side.CLIENT
    assert len(dec.blocks) >= 1


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2]))
def test_block_rule_matches_whole_board_solver(seed, q):
    rng = np.random.default_rng(seed)
    g = make_gnp(int(rng.integers(5, 9)), float(rng.uniform(0.3, 0.8)), rng)
    whole = solve(g, ContainsCopy(K3), q, "cw", max_edges=16) if g.e <= 14 else None
    if whole is None:
        return
    dec = CopyGameDecider(K3, q).decide(g)
    assert dec.certified
    assert dec.winner == whole.winner


def test_playout_is_a_heuristic_label():
    dense = make_gnp(24, 0.7, 1)
    dec = CopyGameDecider(K3, 2, solver_edges=10, playout=True).decide(dense)
    assert dec.winner is not None
    assert "playout" in dec.methods and not dec.certified
    assert triangle_playout(make_complete(8), 1) is Side.CLIENT
