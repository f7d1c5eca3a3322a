"""Policy base classes shared by all strategies."""

from __future__ import annotations

from typing import Sequence

from ..game import GameState, Owner, Turn


class StrategyError(RuntimeError):
    """A strategy cannot continue (precondition or internal assertion)."""


class PreconditionFailed(ValueError):
    pass


class WaiterStrategy:
    """Maps a game state to an offer.  ``history_free`` strategies depend on
    the ownership vector only, which lets verification share positions."""

    name = "waiter"
    history_free = False

    def reset(self, rng=None) -> None:
        pass

    def offer(self, state: GameState) -> tuple[int, ...]:
        raise NotImplementedError


class ClientStrategy:
    name = "client"
    history_free = False

    def reset(self, rng=None) -> None:
        pass

    def pick(self, state: GameState, offer: Sequence[int]) -> int:
        raise NotImplementedError


class ReplayWaiter(WaiterStrategy):
    """Waiter with private bookkeeping that follows the game history.

    Subclasses implement ``_start(board, q)``, ``_plan()`` (next offer from
    the bookkeeping alone) and ``_observe(offer, pick)``.  When handed a
    state that is not the direct continuation of the last one seen (a new
    game, or a verifier jumping between branches), the bookkeeping is
    rebuilt by replaying the recorded turns.
    """

    def __init__(self):
        self._board = None
        self._q = 0
        self._node: Turn | None = None
        self._pending: tuple[int, ...] | None = None

    def reset(self, rng=None) -> None:
        self._board = None

    def _start(self, board, q: int) -> None:
        raise NotImplementedError

    def _plan(self) -> tuple[int, ...]:
        raise NotImplementedError

    def _observe(self, offer: tuple[int, ...], pick: int | None) -> None:
        raise NotImplementedError

    def _sync(self, state: GameState) -> None:
        last = state.last
        if self._board is state.board and self._q == state.q:
            if last is self._node:
                return
            if last is not None and last.prev is self._node and last.offer == self._pending:
                self._observe(last.offer, last.pick)
                self._node = last
                return
        self._board, self._q = state.board, state.q
        self._start(state.board, state.q)
        self._node = None
        for t in last.chain() if last is not None else []:
            planned = self._plan()
            if planned != t.offer:
                raise StrategyError(f"history offer {t.offer} differs from replayed plan {planned}")
            self._observe(t.offer, t.pick)
            self._node = t

    def offer(self, state: GameState) -> tuple[int, ...]:
        self._sync(state)
        off = self._plan()
        self._pending = off
        return off


def lowest_free(state: GameState, k: int, pool: Sequence[int] | None = None) -> tuple[int, ...]:
    own = state.owner
    src = range(state.board.e) if pool is None else pool
    out = []
    for e in src:
        if own[e] == Owner.FREE:
            out.append(e)
            if len(out) == k:
                break
    return tuple(out)


class ArbitraryWaiter(WaiterStrategy):
    """Lowest-id free edges, as many as allowed (always legal)."""

    name = "arbitrary"
    history_free = True

    def offer(self, state: GameState) -> tuple[int, ...]:
        return lowest_free(state, state.q + 1)
