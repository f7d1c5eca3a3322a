"""Generic Waiter policies: random, potential-greedy and solver-driven."""

from __future__ import annotations

import numpy as np

from ..game import CW, GameState, Owner
from .base import WaiterStrategy, lowest_free


class RandomWaiter(WaiterStrategy):
    """Uniform random legal offer (random size in Client-Waiter)."""

    name = "random"

    def __init__(self, seed: int | None = None):
        self.rng = np.random.default_rng(seed)

    def reset(self, rng=None):
        if rng is not None:
            self.rng = rng

    def offer(self, state: GameState):
        free = state.free_edges()
        k = min(state.q + 1, len(free))
        if state.variant is CW:
            k = int(self.rng.integers(1, k + 1))
        return tuple(sorted(self.rng.choice(free, size=k, replace=False).tolist()))


class GreedyAntiWaiter(WaiterStrategy):
    """One-step lookahead against a potential-guided Client.

    Candidate offers are the lowest free edges of each family block (or
    member) and the single most dangerous edge; the chosen candidate
    maximises the potential left after Client's best reply.
    """

    name = "greedy_anti"
    history_free = True

    def __init__(self, family, q: int, mode: str = "hit", beta: float | None = None):
        self.family = family
        self.mode = mode
        self.beta = beta if beta is not None else np.exp(-1.0 / (q + 1))

    def _groups(self):
        fam = self.family
        if getattr(fam, "blocks", None) is not None:
            return fam.blocks
        return [tuple(sorted(m)) for m in fam.members()]

    def offer(self, state: GameState):
        q1 = state.q + 1
        own = state.owner
        cands = set()
        for grp in self._groups():
            free = [e for e in grp if own[e] == Owner.FREE]
            if free:
                cands.add(tuple(free[:q1]))
        if not cands:
            return lowest_free(state, q1)
        if state.variant is not CW:
            pad = [e for e in range(state.board.e) if own[e] == Owner.FREE]
            cands = {tuple(sorted(set(c) | set([e for e in pad if e not in c][: q1 - len(c)]))) for c in cands}

        def after_best_reply(off):
            vals = []
            for e in off:
                changes = {x: Owner.WAITER for x in off}
                changes[e] = Owner.CLIENT
                vals.append(self.family.potential_delta(own, changes, self.mode, self.beta))
            return min(vals)

        return max(sorted(cands), key=after_best_reply)


class SolverWaiter(WaiterStrategy):
    """Perfect play from the exact solver (optionally on a sub-board)."""

    name = "solver"
    history_free = True

    def __init__(self, policy=None):
        self.policy = policy

    def offer(self, state):
        if self.policy is None:
            from ..solver import solver_policy

            self.policy = solver_policy(state.board, state.goal, state.q, state.variant)
        return self.policy.offer(state)
