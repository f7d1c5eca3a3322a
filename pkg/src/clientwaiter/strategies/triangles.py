"""Fast heuristic play for the Client-Waiter triangle game on large boards.

In Client-Waiter every edge is eventually offered, so a free edge whose
two triangle partners both belong to Client (a *hot* edge) decides the
game for Client.  Waiter's heuristic only makes *safe* offers: whichever
edge Client takes, no hot edge appears.  Client's heuristic takes a
winning edge when offered one and otherwise the edge creating the most
hot edges.
"""

from __future__ import annotations

from itertools import combinations

from ..game import GameState, Owner
from ..graph import Graph
from .base import ClientStrategy, WaiterStrategy

CANDIDATES = 8


def _new_hot(board: Graph, own, e: int, gone: frozenset[int] = frozenset()) -> int:
    """Hot edges created if Client takes ``e`` (edges in ``gone`` go to Waiter)."""
    u, v = board.edges[e]
    nb = board.nbr_mask
    count = 0
    for a, b in ((u, v), (v, u)):
        m = nb[a] & nb[b]
        while m:
            low = m & -m
            w = low.bit_length() - 1
            m ^= low
            x, y = board.edge_id(a, w), board.edge_id(b, w)
            if own[x] == Owner.CLIENT and own[y] == Owner.FREE and y not in gone:
                count += 1
    return count


def _completes(board: Graph, own, e: int) -> bool:
    u, v = board.edges[e]
    m = board.nbr_mask[u] & board.nbr_mask[v]
    while m:
        low = m & -m
        w = low.bit_length() - 1
        m ^= low
        if own[board.edge_id(u, w)] == Owner.CLIENT and own[board.edge_id(v, w)] == Owner.CLIENT:
            return True
    return False


def has_hot_edge(state: GameState) -> bool:
    """True when Client is certain to complete a triangle."""
    b = state.board
    own = state.owner
    return any(own[e] == Owner.FREE and _completes(b, own, e) for e in range(b.e))


class ThreatClient(ClientStrategy):
    name = "threat"
    history_free = True

    def pick(self, state, offer):
        b, own = state.board, state.owner
        for e in sorted(offer):
            if _completes(b, own, e):
                return e
        gone = frozenset(offer)
        return max(sorted(offer), key=lambda e: (_new_hot(b, own, e, gone - {e}), -e))


class SafeOfferWaiter(WaiterStrategy):
    """Offer up to q+1 edges, none of which hands Client a hot edge.

    Candidates are the free edges under the most pressure (in a triangle
    with one Client edge and a free partner) plus those partners; the
    safe subset with the most pressure relieved is offered.  With no safe
    offer at all Waiter is lost and offers the lowest free edges.
    """

    name = "safe_offer"
    history_free = True

    def offer(self, state):
        b, own, q1 = state.board, state.owner, state.q + 1
        free = [e for e in range(b.e) if own[e] == Owner.FREE]
        pressure: dict[int, int] = {}
        partner: dict[int, set[int]] = {}
        for c in range(b.e):
            if own[c] != Owner.CLIENT:
                continue
            u, v = b.edges[c]
            m = b.nbr_mask[u] & b.nbr_mask[v]
            while m:
                low = m & -m
                w = low.bit_length() - 1
                m ^= low
                x, y = b.edge_id(u, w), b.edge_id(v, w)
                if own[x] == Owner.FREE and own[y] == Owner.FREE:
                    for s, t in ((x, y), (y, x)):
                        pressure[s] = pressure.get(s, 0) + 1
                        partner.setdefault(s, set()).add(t)
        ranked = sorted(pressure, key=lambda e: (-pressure[e], e))[:CANDIDATES]
        pool = sorted(set(ranked) | {t for e in ranked[:3] for t in partner[e]})[: 2 * CANDIDATES]
        best, best_key = None, None
        for size in range(min(q1, len(pool)), 0, -1):
            for combo in combinations(pool, size):
                gone = frozenset(combo)
                if all(_new_hot(b, own, e, gone - {e}) == 0 for e in combo):
                    key = (sum(pressure.get(e, 0) for e in combo), size)
                    if best_key is None or key > best_key:
                        best, best_key = combo, key
        if best is not None:
            return tuple(sorted(best))
        for e in free:
            if _new_hot(b, own, e) == 0:
                return (e,)
        return tuple(free[:q1])
