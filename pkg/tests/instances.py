"""Random small game instances shared by unit and acceptance tests."""

from __future__ import annotations

import numpy as np

from clientwaiter.families import ExplicitFamily
from clientwaiter.goals import ComponentAtLeast, ContainsCopy, FamilyGoal, MaxDegreeAtLeast, PathAtLeast
from clientwaiter.graph import Graph, named_graph

PATTERNS = ("K3", "P3", "K1,3", "C4", "P4")


def random_board(rng: np.random.Generator, max_edges: int = 8, max_n: int = 6) -> Graph:
    n = int(rng.integers(3, max_n + 1))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    e = int(rng.integers(1, min(max_edges, len(pairs)) + 1))
    pick = sorted(rng.choice(len(pairs), size=e, replace=False).tolist())
    return Graph(n, tuple(pairs[i] for i in pick))


def random_goal(rng: np.random.Generator, board: Graph):
    kind = int(rng.integers(5))
    if kind == 0:
        return ContainsCopy(named_graph(PATTERNS[int(rng.integers(len(PATTERNS)))]))
    if kind == 1:
        return ComponentAtLeast(int(rng.integers(2, 5)))
    if kind == 2:
        return PathAtLeast(int(rng.integers(1, 4)))
    if kind == 3:
        return MaxDegreeAtLeast(int(rng.integers(1, 4)))
    members = []
    for _ in range(int(rng.integers(1, 4))):
        size = int(rng.integers(1, min(3, board.e) + 1))
        members.append(frozenset(rng.choice(board.e, size=size, replace=False).tolist()))
    return FamilyGoal(ExplicitFamily(tuple(members)))


def random_instance(rng: np.random.Generator, max_edges: int = 8):
    board = random_board(rng, max_edges)
    goal = random_goal(rng, board)
    q = int(rng.integers(1, 4))
    variant = "cw" if rng.random() < 0.5 else "wc"
    return board, goal, q, variant
