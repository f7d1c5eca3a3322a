"""Decide pattern games on random boards block by block.

The board is reduced to its core (triangle core for triangles at bias at
least two, pattern core otherwise) and split into biconnected blocks.
Waiter wins when every block is a Waiter win; Client wins when some
block is a Client win.  Each block verdict carries the method that produced it:

``empty``     the block holds no copy of the pattern
``lemma``     triangle at bias 2 on a block of maximum density at most 2
``gadget``    the block contains a subgraph on which Client provably wins
``solver``    exact search (blocks with at most ``solver_edges`` edges)
``playout``   one heuristic game, not a certificate
``undecided`` none of the above applied
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .density import max_density
from .game import CW, Side, new_game, step
from .goals import ContainsCopy
from .graph import Graph, make_complete
from .solver import MAX_NODES, SolverBudgetExceeded, solve
from .structure import biconnected_components, find_copies, h_core, k3_core
from .strategies.k3 import is_triangle
from .strategies.triangles import SafeOfferWaiter, ThreatClient, _completes, _new_hot

CERTIFIED = ("empty", "lemma", "gadget", "solver")


def k5_minus_edge() -> Graph:
    k5 = make_complete(5)
    return k5.edge_subgraph(range(1, k5.e))


@dataclass(frozen=True)
class BlockVerdict:
    edges: tuple[int, ...]
    winner: Side | None
    method: str


@dataclass
class Decision:
    winner: Side | None
    blocks: list[BlockVerdict] = field(default_factory=list)
    core_edges: int = 0

    @property
    def methods(self) -> set[str]:
        return {b.method for b in self.blocks}

    @property
    def certified(self) -> bool:
        """Whether the verdict rests on certified block verdicts only."""
        if self.winner is Side.CLIENT:
            return any(b.winner is Side.CLIENT and b.method in CERTIFIED for b in self.blocks)
        if self.winner is Side.WAITER:
            return all(b.method in CERTIFIED for b in self.blocks)
        return False


def triangle_playout(block: Graph, q: int) -> Side:
    """One game of the hot-edge heuristics on ``block``.

    Client wins on owning a triangle or once some free edge closes a
    triangle with two Client edges; Waiter wins when the board runs out.
    """
    waiter, client = SafeOfferWaiter(), ThreatClient()
    state = new_game(block, ContainsCopy(make_complete(3)), q, CW)
    while state.e_free:
        offer = waiter.offer(state)
        pick = client.pick(state, offer)
        if _completes(block, state.owner, pick):
            return Side.CLIENT
        state = step(state, offer, pick)
        if _new_hot(block, state.owner, pick):
            return Side.CLIENT
    return Side.WAITER


class CopyGameDecider:
    """Block-wise verdicts for CW(board, pattern, q), cached by block edges.

    ``gadgets`` are graphs known to be Client wins at this bias; a block
    containing one is a Client win because Client-Waiter wins pass to
    supergraphs.
    """

    def __init__(
        self,
        pattern: Graph,
        q: int,
        solver_edges: int = 16,
        solver_nodes: int = MAX_NODES,
        playout: bool = False,
        gadgets: tuple[Graph, ...] = (),
    ):
        self.pattern = pattern
        self.q = q
        self.solver_edges = solver_edges
        self.solver_nodes = solver_nodes
        self.playout = playout and is_triangle(pattern)
        self.gadgets = gadgets
        self.cache: dict[frozenset, tuple[Side | None, str]] = {}

    def core(self, g: Graph):
        if is_triangle(self.pattern) and self.q >= 2:
            return k3_core(g)
        return h_core(g, self.pattern)

    def block_verdict(self, block: Graph) -> tuple[Side | None, str]:
        key = frozenset(block.edges)
        if key not in self.cache:
            self.cache[key] = self._decide_block(block)
        return self.cache[key]

    def _decide_block(self, block: Graph) -> tuple[Side | None, str]:
        if not find_copies(block, self.pattern, limit=1):
            return Side.WAITER, "empty"
        if is_triangle(self.pattern) and self.q == 2 and max_density(block) <= 2:
            return Side.WAITER, "lemma"
        for gadget in self.gadgets:
            if find_copies(block, gadget, limit=1):
                return Side.CLIENT, "gadget"
        if block.e <= self.solver_edges:
            try:
                res = solve(block, ContainsCopy(self.pattern), self.q, CW, self.solver_edges, self.solver_nodes)
                return res.winner, "solver"
            except SolverBudgetExceeded:
                pass
        if self.playout:
            return triangle_playout(block, self.q), "playout"
        return None, "undecided"

    def decide(self, g: Graph) -> Decision:
        trace = self.core(g)
        core_ids = sorted(trace.core_edges)
        core = g.edge_subgraph(core_ids)
        verdicts = []
        for blk in sorted(biconnected_components(core), key=lambda b: (len(b), min(b))):
            ids = tuple(sorted(core_ids[i] for i in blk))
            block, _ = g.edge_subgraph(ids).compact()
            winner, method = self.block_verdict(block)
            verdicts.append(BlockVerdict(ids, winner, method))
        if any(v.winner is Side.CLIENT for v in verdicts):
            overall = Side.CLIENT
        elif all(v.winner is Side.WAITER for v in verdicts):
            overall = Side.WAITER
        else:
            overall = None
        return Decision(overall, verdicts, len(core_ids))

