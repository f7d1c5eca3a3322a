"""Client policies: random, greedy, random marking and potential-guided."""

from __future__ import annotations

from math import exp
from typing import Sequence

import numpy as np

from ..game import GameState, Owner
from ..goals import ComponentAtLeast, MaxDegreeAtLeast, PathAtLeast
from .base import ClientStrategy, StrategyError


class RandomClient(ClientStrategy):
    name = "random"

    def __init__(self, seed: int | None = None):
        self.rng = np.random.default_rng(seed)

    def reset(self, rng=None):
        if rng is not None:
            self.rng = rng

    def pick(self, state, offer):
        return offer[int(self.rng.integers(len(offer)))]


class _ClientForest:
    """Union-find over Client's edges, kept in step with the history."""

    def __init__(self):
        self.board = None
        self.node = None

    def sync(self, state: GameState):
        if self.board is not state.board or not self._extends(state):
            self.board = state.board
            n = state.board.n
            self.parent = list(range(n))
            self.size = [1] * n
            self.deg = [0] * n
            self.node = None
            turns = state.history
        else:
            turns = [state.last] if state.last is not self.node else []
        for t in turns:
            if t.pick is not None:
                self._add(*state.board.edges[t.pick])
        self.node = state.last

    def _extends(self, state):
        last = state.last
        return last is self.node or (last is not None and last.prev is self.node)

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def _add(self, u, v):
        self.deg[u] += 1
        self.deg[v] += 1
        a, b = self.find(u), self.find(v)
        if a != b:
            if self.size[a] < self.size[b]:
                a, b = b, a
            self.parent[b] = a
            self.size[a] += self.size[b]

    def merged(self, u, v) -> int:
        a, b = self.find(u), self.find(v)
        return self.size[a] + (self.size[b] if a != b else 0)


class GreedyClient(ClientStrategy):
    """Grow the goal's measure as fast as possible, one pick at a time.

    Degree goals take the edge raising the largest endpoint degree;
    component and path goals take the edge creating the largest component
    (paths prefer joining low-degree endpoints on ties).  Other goals take
    the lowest id.
    """

    name = "greedy"

    def __init__(self):
        self.forest = _ClientForest()

    def reset(self, rng=None):
        self.forest = _ClientForest()

    def pick(self, state, offer):
        goal = state.goal
        f = self.forest
        f.sync(state)
        edges = state.board.edges
        if isinstance(goal, MaxDegreeAtLeast):
            return max(offer, key=lambda e: (max(f.deg[edges[e][0]], f.deg[edges[e][1]]), -e))
        if isinstance(goal, ComponentAtLeast):
            return max(offer, key=lambda e: (f.merged(*edges[e]), -e))
        if isinstance(goal, PathAtLeast):
            return max(
                offer,
                key=lambda e: (f.merged(*edges[e]), -max(f.deg[edges[e][0]], f.deg[edges[e][1]]), -e),
            )
        return min(offer)


class RandomSubsetClient(ClientStrategy):
    """Uniform pick, then mark it with probability ``|offer| / (q+1)``.

    Every element lands in the marked set ``X_C`` with probability exactly
    ``1/(q+1)``: it is picked with probability ``1/|offer|`` when offered.
    """

    name = "random_subset"

    def __init__(self, seed: int | None = None):
        self.rng = np.random.default_rng(seed)
        self.marked: list[int] = []

    def reset(self, rng=None):
        if rng is not None:
            self.rng = rng
        self.marked = []

    def pick(self, state, offer):
        e = offer[int(self.rng.integers(len(offer)))]
        alpha = len(offer) / (state.q + 1)
        if alpha > 1:
            raise StrategyError("offer larger than q+1")
        if self.rng.random() < alpha:
            self.marked.append(e)
        return e


class PotentialClient(ClientStrategy):
    """Pick the offered edge minimising the family potential after the turn.

    The turn is simulated in full: Client takes the edge, Waiter the rest
    of the offer.  Ties go to the lowest edge id.
    """

    history_free = True
    mode = "avoid"

    def __init__(self, family, q: int, check_monotone: bool = True):
        self.family = family
        self.q = q
        self.check_monotone = check_monotone
        self.beta = self._beta(q)
        self.trace: list[float] = []

    def _beta(self, q: int) -> float:
        raise NotImplementedError

    def score(self, state: GameState, offer: Sequence[int], e: int) -> float:
        changes = {x: Owner.WAITER for x in offer}
        changes[e] = Owner.CLIENT
        return self.family.potential_delta(state.owner, changes, self.mode, self.beta)

    def pick(self, state, offer):
        best = min(sorted(offer), key=lambda e: self.score(state, offer, e))
        if self.check_monotone and len(offer) == self.q + 1:
            delta = self.score(state, offer, best)
            if delta > 1e-9 * max(1.0, self.family.potential(state.owner, self.mode, self.beta)):
                raise StrategyError(f"potential rose by {delta} on a full offer")
        return best


class AvoidPotentialClient(PotentialClient):
    """Waiter-Client avoider: members without Waiter edges weigh
    ``(q+1) ** -free``."""

    name = "avoid_potential"
    mode = "avoid"

    def _beta(self, q):
        return 1.0 / (q + 1)


class TransversalPotentialClient(PotentialClient):
    """Client-Waiter hitter: members Client has not hit weigh
    ``exp(-free / (q+1))``."""

    name = "transversal_potential"
    mode = "hit"

    def __init__(self, family, q: int):
        super().__init__(family, q, check_monotone=False)

    def _beta(self, q):
        return exp(-1.0 / (q + 1))


class SolverClient(ClientStrategy):
    """Perfect play read off the exact solver."""

    name = "solver"
    history_free = True

    def __init__(self, policy=None):
        self.policy = policy

    def pick(self, state, offer):
        if self.policy is None:
            from ..solver import solver_policy

            self.policy = solver_policy(state.board, state.goal, state.q, state.variant)
        return self.policy.pick(state, offer)
