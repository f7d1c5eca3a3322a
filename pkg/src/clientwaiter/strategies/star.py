"""Waiter follows Client's newest star endpoint."""

from __future__ import annotations

from math import ceil

from .base import ReplayWaiter


def star_bound(n: int, q: int) -> int:
    """Client's maximum degree under the star strategy on K_n."""
    return 2 * ceil((n - 1) / (q + 2))


class StarWaiter(ReplayWaiter):
    """Offer up to q+1 free edges at the endpoint Client just reached.

    The first offer, and any offer after the current vertex runs out of
    free edges, uses the lowest vertex that still has one.  Offered edges
    are the lowest ids at that vertex.
    """

    name = "star"

    def __init__(self, q: int | None = None, offer_size: int | None = None):
        super().__init__()
        self.offer_size = offer_size

    def _start(self, board, q):
        self.g = board
        self.size = self.offer_size or q + 1
        self.free_at = [set(board.incident[v]) for v in range(board.n)]
        self.center: int | None = None
        self.follow: int | None = None
        self.low = 0

    def _plan(self):
        v = self.follow
        if v is None or not self.free_at[v]:
            while self.low < self.g.n and not self.free_at[self.low]:
                self.low += 1
            if self.low == self.g.n:
                return ()
            v = self.low
        self.center = v
        return tuple(sorted(self.free_at[v])[: self.size])

    def _observe(self, offer, pick):
        for eid in offer:
            a, b = self.g.edges[eid]
            self.free_at[a].discard(eid)
            self.free_at[b].discard(eid)
        if pick is not None:
            self.follow = self.g.other(pick, self.center)
