"""Waiter strategies for the triangle game at bias two, and core reduction.

Plans are trees of phases played in order: a phase is finished once all of
its edges are claimed, and every phase only ever offers its own edges.  The
current phase is therefore a function of the ownership vector alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import networkx as nx

from ..density import max_density
from ..game import CW, GameState, Owner
from ..graph import Graph, make_complete
from ..solver import MAX_RELEVANT_EDGES, ResidualSolver, SolverPolicy, normalise
from ..structure import biconnected_components, h_core, k3_core, triangles
from .base import PreconditionFailed, StrategyError, WaiterStrategy
from .orientation import restricted

BASE_VERTICES = 6


# -- plan phases ----------------------------------------------------------------


@dataclass
class Phase:
    edges: list[int]

    def has_free(self, own: bytes) -> bool:
        return any(own[e] == Owner.FREE for e in self.edges)

    def offer(self, state: GameState) -> tuple[int, ...]:
        raise NotImplementedError

    def describe(self, depth: int = 0) -> list[str]:
        return ["  " * depth + f"{type(self).__name__.lower()} {len(self.edges)} edges"]


@dataclass
class Sequence_(Phase):
    children: list[Phase] = field(default_factory=list)
    label: str = ""

    def offer(self, state):
        own = state.owner
        for ch in self.children:
            if ch.has_free(own):
                return ch.offer(state)
        return ()

    def describe(self, depth=0):
        out = ["  " * depth + f"sequence {self.label}".rstrip()]
        for ch in self.children:
            out += ch.describe(depth + 1)
        return out


@dataclass
class Groups(Phase):
    """Fixed groups of at most q+1 edges, each offered once, in order."""

    groups: list[list[int]] = field(default_factory=list)

    def offer(self, state):
        own = state.owner
        for grp in self.groups:
            free = tuple(e for e in grp if own[e] == Owner.FREE)
            if free:
                return free
        return ()


@dataclass
class Arbitrary(Phase):
    size: int = 1

    def offer(self, state):
        own = state.owner
        return tuple([e for e in self.edges if own[e] == Owner.FREE][: self.size])


@dataclass
class SolverPhase(Phase):
    policy: SolverPolicy | None = None

    def offer(self, state):
        return self.policy.offer(state)


@dataclass
class StrategyPhase(Phase):
    """Delegates to another Waiter strategy restricted to these edges."""

    strategy: WaiterStrategy | None = None

    def offer(self, state):
        return tuple(self.strategy.offer(state))

    def describe(self, depth=0):
        return ["  " * depth + f"{self.strategy.name} on {len(self.edges)} edges"]


def seq(children: Iterable[Phase | None], label: str = "") -> Phase | None:
    kids = [c for c in children if c is not None and c.edges]
    if not kids:
        return None
    if len(kids) == 1 and not label:
        return kids[0]
    return Sequence_(sorted(e for c in kids for e in c.edges), kids, label)


class PlanWaiter(WaiterStrategy):
    """Plays a phase tree built for the board it first sees."""

    history_free = True

    def __init__(self, edge_ids=None, check_precondition: bool = True):
        self.edge_ids = edge_ids
        self.check_precondition = check_precondition
        self._board = None
        self._q = None
        self.plan: Phase | None = None

    def _build(self, board: Graph, q: int, edge_ids: list[int]) -> Phase | None:
        raise NotImplementedError

    def _ensure(self, state: GameState):
        if self._board is state.board and self._q == state.q:
            return
        self._board, self._q = state.board, state.q
        _, ids = restricted(state.board, self.edge_ids)
        self.plan = self._build(state.board, state.q, ids)

    def offer(self, state):
        self._ensure(state)
        off = self.plan.offer(state) if self.plan is not None and self.plan.has_free(state.owner) else ()
        if not off:
            # the plan's edges are all claimed; anything left is outside the sub-board
            return ()
        return off


# -- triangle game at bias two ---------------------------------------------------


class _Sub:
    """Adjacency view of the board restricted to a set of edge ids."""

    def __init__(self, board: Graph, ids: Iterable[int]):
        self.board = board
        self.ids = sorted(set(ids))
        self.adj: dict[int, set[int]] = {}
        for e in self.ids:
            u, v = board.edges[e]
            self.adj.setdefault(u, set()).add(v)
            self.adj.setdefault(v, set()).add(u)

    @property
    def vertices(self) -> list[int]:
        return sorted(self.adj)

    def eid(self, u, v) -> int:
        return self.board.edge_id(u, v)

    def within(self, vs) -> list[int]:
        vs = set(vs)
        return [e for e in self.ids if self.board.edges[e][0] in vs and self.board.edges[e][1] in vs]

    def between(self, a, b) -> list[int]:
        a, b = set(a), set(b)
        out = []
        for e in self.ids:
            x, y = self.board.edges[e]
            if (x in a and y in b) or (x in b and y in a):
                out.append(e)
        return out

    def nx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_edges_from(self.board.edges[e] for e in self.ids)
        return g

    def graph(self) -> Graph:
        return Graph(self.board.n, tuple(self.board.edges[e] for e in self.ids))


class K3Bias2Waiter(PlanWaiter):
    """Keeps Client triangle-free at bias 2 on boards with m(G) <= 2.

    Recursive plan: boards on at most six vertices are played perfectly by
    the solver; a cut of at most three edges splits the board, both sides
    are played first and the cut is offered in one turn; otherwise the
    board is 4-regular and the closed neighbourhood of its lowest vertex is
    played first, then the edges leaving it in the groups fixed by the
    shape of that neighbourhood.
    """

    name = "k3_bias2"

    def __init__(self, edge_ids=None, check_precondition: bool = True):
        super().__init__(edge_ids, check_precondition)
        self.rs = ResidualSolver(2, CW)
        self.cases: list[str] = []

    def _build(self, board, q, ids):
        if self.check_precondition:
            if q != 2:
                raise PreconditionFailed(f"k3_bias2 needs q=2, got q={q}")
            m = max_density(restricted(board, ids)[0])
            if m > 2:
                raise PreconditionFailed(f"k3_bias2 needs m(G) <= 2, got {m}")
        self.cases = []
        return self._plan(_Sub(board, ids))

    # each returned phase covers exactly sub.ids
    def _plan(self, sub: _Sub) -> Phase | None:
        if not sub.ids:
            return None
        g = sub.graph()
        tri = triangles(g)
        if not tri:
            self.cases.append("triangle-free")
            return Arbitrary(sub.ids, size=3)
        comps = [c for c in nx.connected_components(sub.nx())]
        if len(comps) > 1:
            return seq([self._plan(_Sub(sub.board, sub.within(c))) for c in sorted(comps, key=min)])
        if len(sub.vertices) <= BASE_VERTICES:
            return self._solver_phase(sub, tri)
        cut_value, (a, b) = nx.stoer_wagner(sub.nx())
        if cut_value <= 3:
            self.cases.append(f"cut-{cut_value}")
            cut = sub.between(a, b)
            return seq(
                [
                    self._plan(_Sub(sub.board, sub.within(a))),
                    self._plan(_Sub(sub.board, sub.within(b))),
                    Groups(cut, [cut]),
                ],
                label="cut",
            )
        degs = {v: len(sub.adj[v]) for v in sub.vertices}
        if set(degs.values()) != {4}:
            raise StrategyError(f"no case applies: edge-connectivity {cut_value} but degrees {sorted(set(degs.values()))}")
        return self._regular(sub, min(sub.vertices))

    def _solver_phase(self, sub: _Sub, tri) -> Phase:
        sets = [sum(1 << sub.ids[i] for i in t) for t in tri]
        fam = normalise(sets)
        if not self.rs.cw_waiter_wins(fam):
            raise StrategyError(f"solver finds no Waiter win on base board {sub.ids}")
        self.cases.append("base")
        mask = sum(1 << e for e in sub.ids)
        return SolverPhase(sub.ids, SolverPolicy(sets, self.rs, restrict=mask))

    def _regular(self, sub: _Sub, v0: int, rotated: bool = False) -> Phase:
        nbrs = sorted(sub.adj[v0])
        closed = [v0] + nbrs
        rest = [v for v in sub.vertices if v not in closed]
        ngraph = nx.Graph()
        ngraph.add_nodes_from(nbrs)
        ngraph.add_edges_from((u, v) for u in nbrs for v in nbrs if u < v and v in sub.adj[u])
        if not nx.is_connected(ngraph):
            comps = sorted((sorted(c) for c in nx.connected_components(ngraph)), key=min)
            a = comps[0]
            b = [v for v in nbrs if v not in a]
            self.cases.append("split-neighbourhood")
            star_a = [sub.eid(v0, v) for v in a]
            star_b = [sub.eid(v0, v) for v in b]
            others = [e for e in sub.ids if e not in star_a and e not in star_b]
            return seq([self._plan(_Sub(sub.board, others)), Groups(star_a + star_b, [star_a, star_b])], label="split")

        inner = sub.within(closed)
        cut = sub.between(closed, rest)
        ndeg = {v: ngraph.degree(v) for v in nbrs}
        e_n = ngraph.number_of_edges()
        out = {v: sorted(u for u in sub.adj[v] if u in rest) for v in closed}

        def cut_at(v):
            return [sub.eid(v, u) for u in out[v]]

        if e_n == 4 and sorted(ndeg.values()) == [2, 2, 2, 2]:
            self.cases.append("neighbourhood-C4")
            groups = []
            for u in rest:
                grp = [sub.eid(u, v) for v in closed if v in sub.adj[u]]
                if len(grp) > 3:
                    raise StrategyError(f"vertex {u} sends {len(grp)} edges into the neighbourhood")
                if grp:
                    groups.append(grp)
        elif e_n == 4 and sorted(ndeg.values()) == [1, 2, 2, 3]:
            self.cases.append("neighbourhood-paw")
            (v1,) = [v for v in nbrs if ndeg[v] == 1]
            first = cut_at(v1)
            groups = [first, [e for e in cut if e not in first]]
        elif e_n == 3 and sorted(ndeg.values()) == [1, 1, 2, 2]:
            ends = sorted(v for v in nbrs if ndeg[v] == 1)
            path = nx.shortest_path(ngraph, ends[0], ends[1])
            v1, v2, v3, v4 = path
            hits = {u: {v for v in path if v in sub.adj[u]} for u in rest}
            for u in rest:
                for trio, centre in (({v1, v2, v3}, v2), ({v2, v3, v4}, v3)):
                    if trio <= hits[u]:
                        if rotated:
                            raise StrategyError("rotated neighbourhood is not a 4-cycle")
                        self.cases.append("neighbourhood-P4-rotate")
                        return self._regular(sub, centre, rotated=True)
            groups = None
            for u in rest:
                if hits[u] == {v1, v3, v4}:
                    self.cases.append("neighbourhood-P4-b")
                    (w,) = [x for x in out[v4] if x != u]
                    first = [sub.eid(u, v3), sub.eid(u, v4), sub.eid(v4, w)]
                    groups = [first, [e for e in cut if e not in first]]
                    break
                if hits[u] == {v1, v2, v4}:
                    self.cases.append("neighbourhood-P4-b")
                    (w,) = [x for x in out[v1] if x != u]
                    first = [sub.eid(u, v2), sub.eid(u, v1), sub.eid(v1, w)]
                    groups = [first, [e for e in cut if e not in first]]
                    break
            if groups is None:
                self.cases.append("neighbourhood-P4-c")
                groups = []
                used: set[int] = set()
                for end, nxt in ((v1, v2), (v4, v3)):
                    grp = cut_at(end)
                    for u in rest:
                        if hits[u] == {end, nxt}:
                            grp = sorted(set(grp) | {sub.eid(u, nxt)})
                            break
                    grp = [e for e in grp if e not in used]
                    used |= set(grp)
                    groups.append(grp)
                groups.append([e for e in cut if e not in used])
        elif e_n == 3 and sorted(ndeg.values()) == [1, 1, 1, 3]:
            self.cases.append("neighbourhood-star")
            leaves = sorted(v for v in nbrs if ndeg[v] == 1)
            groups = [cut_at(v) for v in leaves]
        else:
            raise StrategyError(f"no case applies: neighbourhood of {v0} has {e_n} edges, degrees {sorted(ndeg.values())}")

        groups = [g for g in groups if g]
        flat = sorted(e for g in groups for e in g)
        if flat != sorted(cut) or any(len(g) > 3 for g in groups):
            raise StrategyError(f"offer groups {groups} do not split the cut {cut} into turns")
        inner_sub = _Sub(sub.board, inner)
        return seq(
            [
                self._solver_phase(inner_sub, triangles(inner_sub.graph())),
                self._plan(_Sub(sub.board, sub.within(rest))),
                Groups(cut, groups),
            ],
            label=f"regular at {v0}",
        )


# -- core reduction --------------------------------------------------------------


InnerFactory = Callable[[Graph, list[int], int], WaiterStrategy]


def solver_inner(board: Graph, ids: list[int], q: int, pattern: Graph) -> WaiterStrategy:
    from ..goals import ContainsCopy, winning_sets

    from .waiters import SolverWaiter

    local, map_ids = restricted(board, ids)
    sets_local = winning_sets(ContainsCopy(pattern), local)
    sets = [sum(1 << map_ids[i] for i in range(local.e) if s >> i & 1) for s in sets_local]
    if sum(1 for _ in ids) > MAX_RELEVANT_EDGES and sets:
        raise StrategyError(f"component of {len(ids)} edges exceeds the solver limit")
    mask = sum(1 << e for e in ids)
    return SolverWaiter(SolverPolicy(sets, ResidualSolver(q, CW), restrict=mask))


def default_inner(pattern: Graph) -> InnerFactory:
    """Inner Waiter per core block: triangle bias-2 plan, the case dispatcher,
    or the solver, whichever applies first."""

    def make(board: Graph, ids: list[int], q: int) -> WaiterStrategy:
        local, _ = restricted(board, ids)
        if is_triangle(pattern) and q == 2 and max_density(local) <= 2:
            return K3Bias2Waiter(edge_ids=ids)
        if q == 1:
            from .dispatch import NoApplicableStrategy, waiter_dispatch

            try:
                return waiter_dispatch(local, pattern, q, edge_ids=ids)
            except (NoApplicableStrategy, PreconditionFailed):
                pass
        return solver_inner(board, ids, q, pattern)

    return make


def is_triangle(h: Graph) -> bool:
    return h.e == 3 and len(h.non_isolated()) == 3


class CoreReductionWaiter(PlanWaiter):
    """Win every block of the core, then undo the peeling in reverse.

    Triangles at bias at least two use the triangle core (offers of up to
    three edges); every other case uses the pattern core (offers of two
    private edges).  Whatever is left afterwards is offered arbitrarily.
    """

    name = "core_reduction"

    def __init__(self, pattern: Graph, inner: InnerFactory | None = None, edge_ids=None):
        super().__init__(edge_ids)
        self.pattern = pattern
        self.inner = inner or default_inner(pattern)
        self.trace = None
        self.blocks: list[list[int]] = []

    def _build(self, board, q, ids):
        local, map_ids = restricted(board, ids)
        if is_triangle(self.pattern) and q >= 2:
            trace = k3_core(local)
        else:
            trace = h_core(local, self.pattern)
        self.trace = trace
        core_ids = sorted(trace.core_edges)
        core_graph = local.edge_subgraph(core_ids)
        blocks = []
        for blk in biconnected_components(core_graph):
            blocks.append(sorted(map_ids[core_ids[i]] for i in blk))
        self.blocks = blocks
        phases: list[Phase | None] = [StrategyPhase(b, self.inner(board, b, q)) for b in blocks]
        replay = [[map_ids[e] for e in st.offer] for st in reversed(trace.removal_steps)]
        if any(len(g) > q + 1 for g in replay):
            raise StrategyError("a removal step needs more than q+1 edges at once")
        replay_edges = sorted(e for g in replay for e in g)
        if replay:
            phases.append(Groups(replay_edges, replay))
        covered = set(replay_edges) | {e for b in blocks for e in b}
        leftover = [e for e in ids if e not in covered]
        if leftover:
            phases.append(Arbitrary(leftover, size=q + 1))
        return seq(phases, label="core reduction")


def triangle_pattern() -> Graph:
    return make_complete(3)
