"""Unbiased Waiter strategies that cap Client's density or arboricity.

Both work on a sub-board given by edge ids of the game board (the whole
board by default), so they can serve as per-component inner strategies.
"""

from __future__ import annotations

from math import ceil
from typing import Iterable

from ..density import arboricity, max_density
from ..forests import hall_orientation, nash_williams
from ..game import CW, GameState, Owner
from ..graph import Graph
from ..solver import ResidualSolver, SolverPolicy, normalise
from .base import PreconditionFailed, StrategyError, WaiterStrategy


def restricted(board: Graph, edge_ids: Iterable[int] | None) -> tuple[Graph, list[int]]:
    """The sub-board as its own graph plus the local -> board edge-id map."""
    ids = list(range(board.e)) if edge_ids is None else sorted(set(edge_ids))
    return Graph(board.n, tuple(board.edges[i] for i in ids)), ids


class _SubBoardWaiter(WaiterStrategy):
    """Builds its plan lazily on first sight of a board."""

    history_free = True

    def __init__(self, pattern: Graph | None = None, edge_ids=None, check_precondition: bool = True):
        self.pattern = pattern
        self.edge_ids = edge_ids
        self.check_precondition = check_precondition
        self._board = None

    def _ensure(self, state: GameState) -> None:
        if self._board is state.board:
            return
        if self.check_precondition and state.q != 1:
            raise PreconditionFailed(f"{self.name} is for the unbiased game (q=1), got q={state.q}")
        self._board = state.board
        self.local, self.ids = restricted(state.board, self.edge_ids)
        self._build()

    def _build(self) -> None:
        raise NotImplementedError


class OrientationWaiter(_SubBoardWaiter):
    """Offer pairs of out-edges of one vertex at a time.

    Edges are oriented with out-degree at most ``ceil(m(G))``; Client then
    keeps at most ``ceil(m(G)/2)`` out-edges per vertex, so every subgraph
    of Client's graph has density at most that.
    """

    name = "orientation"

    def _build(self):
        m = max_density(self.local)
        self.k = max(1, ceil(m))
        self.client_outdeg_bound = ceil(m / 2)
        if self.check_precondition and self.pattern is not None:
            mh = max_density(self.pattern)
            if not self.client_outdeg_bound < mh:
                raise PreconditionFailed(f"ceil(m(G)/2) = {self.client_outdeg_bound} is not below m(H) = {mh}")
        self.orientation = hall_orientation(self.local, self.k)
        self.out_edges = [[self.ids[i] for i in lst] for lst in self.orientation.out_edges(self.local)]
        self.source = {self.ids[i]: s for i, s in enumerate(self.orientation.source)}

    def offer(self, state: GameState):
        self._ensure(state)
        own = state.owner
        for lst in self.out_edges:
            free = [e for e in lst if own[e] == Owner.FREE]
            if free:
                return tuple(free[:2])
        return ()


def forest_pairs(f: int) -> list[tuple[int, int | None]]:
    """Pair forest indices (0,1), (2,3), ...; an odd last one gets ``None``."""
    return [(i, i + 1 if i + 1 < f else None) for i in range(0, f, 2)]


def _cycle_masks(g: Graph, ids: list[int]) -> list[int]:
    """Edge masks (board ids) of all cycles in the graph on board edges ``ids``."""
    import networkx as nx

    h = nx.Graph()
    for e in ids:
        u, v = g.edges[e]
        h.add_edge(u, v, eid=e)
    out = []
    for cyc in nx.simple_cycles(h):
        mask = 0
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            mask |= 1 << h[a][b]["eid"]
        out.append(mask)
    return out


class SolverForestPairPolicy:
    """Keeps Client acyclic on one union of two forests.

    Cycles live inside single blocks, so each block is played to the end
    with perfect play for the goal "Client owns a cycle of this block".
    """

    def __init__(self, board: Graph, pair_edges: list[int]):
        from ..structure import biconnected_components

        local, ids = restricted(board, pair_edges)
        self.blocks = []
        rs = ResidualSolver(1, CW)
        for blk in biconnected_components(local):
            bids = sorted(ids[i] for i in blk)
            cycles = _cycle_masks(board, bids)
            mask = sum(1 << e for e in bids)
            if cycles and rs.cw_waiter_wins(normalise(cycles)):
                self.blocks.append((bids, SolverPolicy(cycles, rs, restrict=mask)))
            elif cycles:
                raise StrategyError(f"no acyclic play exists on block {bids}")
            else:
                self.blocks.append((bids, None))

    def offer(self, state: GameState) -> tuple[int, ...] | None:
        own = state.owner
        for bids, pol in self.blocks:
            free = [e for e in bids if own[e] == Owner.FREE]
            if not free:
                continue
            if pol is None:
                return tuple(free[:2])
            return pol.offer(state)
        return None


class ForestWaiter(_SubBoardWaiter):
    """Split the board into forests, pair them, keep Client acyclic per pair.

    Client ends with at most one forest per pair, i.e. arboricity at most
    ``ceil(ar(G)/2)``.  ``pair_policy(board, edge_ids)`` builds the per-pair
    policy; the default is solver-derived.
    """

    name = "forest"

    def __init__(self, pattern=None, edge_ids=None, check_precondition=True, pair_policy=SolverForestPairPolicy):
        super().__init__(pattern, edge_ids, check_precondition)
        self.pair_policy = pair_policy

    def _build(self):
        ar = arboricity(self.local)
        self.client_forest_bound = ceil(ar / 2)
        if self.check_precondition and self.pattern is not None:
            ah = arboricity(self.pattern)
            if not self.client_forest_bound < ah:
                raise PreconditionFailed(f"ceil(ar(G)/2) = {self.client_forest_bound} is not below ar(H) = {ah}")
        dec = nash_williams(self.local)
        forests = [[self.ids[i] for i in fr] for fr in dec.forests()]
        self.pairs = []
        for a, b in forest_pairs(dec.f):
            edges = forests[a] + (forests[b] if b is not None else [])
            self.pairs.append((sorted(edges), self.pair_policy(self._board, sorted(edges))))

    def offer(self, state: GameState):
        self._ensure(state)
        for _, pol in self.pairs:
            off = pol.offer(state)
            if off:
                return tuple(off)
        return ()
