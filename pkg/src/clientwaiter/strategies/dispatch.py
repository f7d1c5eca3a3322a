"""Pick the unbiased Waiter strategy that keeps Client free of a pattern.

Routing uses ``k = floor(m2(H))`` and ``x = m2(H) - k``:

* ``x < 1/2``: peel a vertex of degree at most ``2(delta(H) - 1)``, play the
  rest first, then offer the peeled vertex's edges in pairs;
* ``k >= 3`` or ``e_H < v_H^2/4``: bounded out-degree orientation;
* dense patterns on at least five vertices, and the 4-cycle: forest pairs;
* ``K_4``: no closed-form strategy here, the solver is used instead.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor

from ..density import arboricity, is_strictly_2balanced, m2, max_density
from ..forests import is_forest
from ..game import CW
from ..graph import Graph
from ..solver import MAX_RELEVANT_EDGES, ResidualSolver, SolverPolicy
from .base import PreconditionFailed, WaiterStrategy
from .k3 import Groups, PlanWaiter, is_triangle, seq
from .orientation import ForestWaiter, OrientationWaiter, restricted


class NoApplicableStrategy(ValueError):
    """No routing case admits this board; callers fall back to the solver."""


def peeling_order(g: Graph, max_degree: int) -> list[int] | None:
    """Vertices removed one at a time, each of degree <= ``max_degree`` in
    what remains; None when the peeling gets stuck."""
    deg = {v: g.degree(v) for v in g.non_isolated()}
    alive = set(deg)
    order = []
    while alive:
        v = min((v for v in alive if deg[v] <= max_degree), default=None)
        if v is None:
            return None
        order.append(v)
        alive.discard(v)
        for u in g.neighbors(v):
            if u in alive:
                deg[u] -= 1
    return order


class PeelingWaiter(PlanWaiter):
    """Plays the peeled vertices backwards: the last one peeled goes first.

    Each vertex's remaining edges are offered in pairs, so Client keeps at
    most half of them, fewer than the pattern's minimum degree.
    """

    name = "peeling"

    def __init__(self, max_degree: int, edge_ids=None):
        super().__init__(edge_ids)
        self.max_degree = max_degree

    def _build(self, board, q, ids):
        local, map_ids = restricted(board, ids)
        order = peeling_order(local, self.max_degree)
        if order is None:
            raise PreconditionFailed(f"some subgraph has minimum degree above {self.max_degree}")
        removed: set[int] = set()
        layers = []
        for v in order:
            own = [map_ids[e] for e in local.incident[v] if local.other(e, v) not in removed]
            removed.add(v)
            layers.append([own[i : i + 2] for i in range(0, len(own), 2)])
        groups = [grp for layer in reversed(layers) for grp in layer]
        flat = sorted(e for grp in groups for e in grp)
        return seq([Groups(flat, groups)]) if flat else None


class _SolverWaiterOnEdges(WaiterStrategy):
    name = "solver"
    history_free = True

    def __init__(self, policy: SolverPolicy):
        self.policy = policy

    def offer(self, state):
        return self.policy.offer(state)


def routing_case(pattern: Graph) -> str:
    """Which case of the routing applies to ``pattern`` (board-independent)."""
    rep = m2(pattern)
    k = floor(rep)
    x = rep - k
    if x < Fraction(1, 2):
        return "a"
    if k >= 3:
        return "b.i"
    if 4 * pattern.e < len(pattern.non_isolated()) ** 2:
        return "b.ii"
    vh = len(pattern.non_isolated())
    if vh >= 5:
        return "b.iii"
    if vh == 4:
        return "b.iv"
    raise NoApplicableStrategy(f"no case for a pattern on {vh} vertices")


def _is_tree(h: Graph) -> bool:
    core, _ = h.compact()
    return core.e == core.n - 1 and is_forest(core, range(core.e))


def waiter_dispatch(g: Graph, pattern: Graph, q: int = 1, edge_ids=None) -> WaiterStrategy:
    """Strategy for Waiter in CW(g, pattern, 1), tagged with ``.case``.

    ``g`` is the board being analysed; ``edge_ids`` (optional) says where its
    edges sit on the game board when it is a sub-board.
    """
    if q != 1:
        raise PreconditionFailed(f"routing covers the unbiased game only (q={q})")
    core, _ = pattern.compact()
    if _is_tree(core):
        raise PreconditionFailed("pattern is a tree")
    if is_triangle(core):
        raise PreconditionFailed("triangles use the core reduction or the solver")
    if not is_strictly_2balanced(core):
        raise PreconditionFailed("pattern is not strictly 2-balanced")
    if g.e and max_density(g) > m2(core):
        raise NoApplicableStrategy(f"m(G) = {max_density(g)} exceeds m2(H) = {m2(core)}")
    case = routing_case(core)
    vh = core.n
    if case == "a":
        strat: WaiterStrategy = PeelingWaiter(2 * (core.min_degree() - 1), edge_ids=edge_ids)
    elif case in ("b.i", "b.ii"):
        strat = OrientationWaiter(core, edge_ids=edge_ids)
    elif case == "b.iii" or (case == "b.iv" and core.e == 4):
        strat = ForestWaiter(core, edge_ids=edge_ids)
    else:
        # K4: route to perfect play on small boards
        from ..goals import ContainsCopy, winning_sets

        if g.e > MAX_RELEVANT_EDGES:
            raise NoApplicableStrategy(f"K4 routing needs the solver; {g.e} edges is over its limit")
        ids = list(range(g.e)) if edge_ids is None else sorted(edge_ids)
        sets = [sum(1 << ids[i] for i in range(g.e) if s >> i & 1) for s in winning_sets(ContainsCopy(core), g)]
        strat = _SolverWaiterOnEdges(SolverPolicy(sets, ResidualSolver(1, CW), restrict=sum(1 << e for e in ids)))
    strat.case = case
    strat.pattern_measures = {"m2": m2(core), "m": max_density(core), "ar": arboricity(core), "v": vh}
    return strat
