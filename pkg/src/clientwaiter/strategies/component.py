"""Waiter strategies for the large-component and long-path games on K_n.

Both run a matching stage that groups vertices, then continue on an
auxiliary complete graph whose vertices stand for Client's pieces.
"""

from __future__ import annotations

from ..game import CW, new_game, step
from ..goals import ComponentAtLeast
from ..graph import bits, make_complete
from .base import PreconditionFailed, ReplayWaiter, StrategyError
from .star import StarWaiter


def component_aux_bias(q: int) -> int:
    """Largest auxiliary bias whose offers expand to at most q+1 real edges."""
    return (q + 1) // 3 - 1


class AllAtOnceWaiter(ReplayWaiter):
    """Offers every free edge, in chunks of at most ``size``."""

    name = "all-at-once"

    def __init__(self, size: int):
        super().__init__()
        self.size = size

    def _start(self, board, q):
        self.free = list(range(board.e))

    def _plan(self):
        return tuple(self.free[: self.size])

    def _observe(self, offer, pick):
        gone = set(offer)
        self.free = [e for e in self.free if e not in gone]


class AuxiliaryGame:
    """Plays a nested strategy on a complete graph of super-vertices.

    ``real_edges(a, b)`` lists the free real edges joining super-vertices
    ``a`` and ``b``.  An auxiliary offer is played as the union of its real
    edges; when that union is empty the auxiliary turn is settled virtually
    by handing Client its first edge, which only enlarges Client's
    auxiliary graph.
    """

    def __init__(self, s: int, aux_q: int, strategy, real_edges, cap: int):
        self.board = make_complete(s)
        self.state = new_game(self.board, ComponentAtLeast(2), max(aux_q, 1), CW)
        self.strategy = strategy
        self.real_edges = real_edges
        self.cap = cap
        self.chunks: list[list[int]] = []
        self.aux_offer: tuple[int, ...] = ()
        self.owner_of_real: dict[int, int] = {}
        self.virtual_turns = 0

    def done(self) -> bool:
        return self.state.e_free == 0 and not self.chunks

    def next_offer(self, still_free) -> tuple[int, ...]:
        while self.chunks:
            chunk = [e for e in self.chunks[0] if still_free(e)]
            if chunk:
                return tuple(chunk)
            self.chunks.pop(0)
        while self.state.e_free:
            aux_off = tuple(self.strategy.offer(self.state))
            real: list[int] = []
            self.owner_of_real = {}
            for a in aux_off:
                u, v = self.board.edges[a]
                for e in self.real_edges(u, v):
                    self.owner_of_real[e] = a
                    real.append(e)
            if real:
                real.sort()
                self.aux_offer = aux_off
                self.chunks = [real[i : i + self.cap] for i in range(0, len(real), self.cap)]
                self._first_chunk = True
                return tuple(self.chunks[0])
            self.state = step(self.state, aux_off, aux_off[0])
            self.virtual_turns += 1
        return ()

    def observe(self, offer, pick) -> None:
        self.chunks.pop(0)
        if self._first_chunk:
            self.state = step(self.state, self.aux_offer, self.owner_of_real[pick])
            self._first_chunk = False


class ComponentWaiter(ReplayWaiter):
    """Three-stage Waiter for keeping Client's components small.

    Stage I offers ``E_F(T, U)`` for a greedy maximal ``T`` inside the
    unmatched set ``U``; Stage II attaches one isolated vertex to each
    ``y_i``; Stage III continues on an auxiliary ``K_s`` with bias
    ``(q+1)//3 - 1`` so each auxiliary offer fits one real turn.
    """

    name = "S_C"

    def __init__(self, check_precondition: bool = True):
        super().__init__()
        self.check_precondition = check_precondition

    def _start(self, board, q):
        n = board.n
        if self.check_precondition and q + 1 < n - 1:
            raise PreconditionFailed(f"needs q+1 >= n-1 (q={q}, n={n})")
        self.g = board
        self.q = q
        self.freeadj = list(board.nbr_mask)
        self.U = (1 << n) - 1
        self.X: list[int] = []
        self.Y: list[int] = []
        self.Z: dict[int, int] = {}
        self.T = 0
        self.client_deg = [0] * n
        self.stage = 1
        self.stage_of_turn: list[int] = []
        self.stage_two_index = 0
        self.aux: AuxiliaryGame | None = None
        self.aux_info: tuple[int, int, str] | None = None
        self.leftover: list[int] = []

    # -- helpers -------------------------------------------------------

    def _edges_from(self, tmask: int, within: int) -> list[int]:
        out = set()
        for v in bits(tmask):
            for u in bits(self.freeadj[v] & within):
                out.add(self.g.edge_id(u, v))
        return sorted(out)

    def _greedy_T(self, within_of) -> int:
        cap = self.q + 1
        T = 0
        total = 0
        for v in bits(self.U):
            add = (self.freeadj[v] & within_of(T) & ~T).bit_count()
            if total + add <= cap:
                T |= 1 << v
                total += add
        return T

    def _stage_one_offer(self):
        while self.U:
            T = self._greedy_T(lambda T: self.U)
            offer = self._edges_from(T, self.U)
            if offer:
                self.T = T
                return tuple(offer)
            self.leftover.extend(bits(T))
            self.U &= ~T
        return None

    def _component_sets(self) -> list[int]:
        comps = []
        for i, (x, y) in enumerate(zip(self.X, self.Y)):
            m = 1 << x | 1 << y
            if i in self.Z:
                m |= 1 << self.Z[i]
            comps.append(m)
        return comps

    def _start_aux(self):
        comps = self._component_sets()
        s = len(comps)
        aux_q = component_aux_bias(self.q)
        if s <= 2:
            strat, kind = AllAtOnceWaiter(max(aux_q, 0) + 1), "all"
        elif aux_q >= 1 and aux_q + 1 >= s - 1:
            strat, kind = ComponentWaiter(), "S_C"
        else:
            strat, kind = StarWaiter(offer_size=max(aux_q, 0) + 1), "star"
        self.aux_info = (s, aux_q, kind)

        def real_edges(a, b):
            return self._edges_from(comps[a], comps[b])

        self.aux = AuxiliaryGame(max(s, 1), aux_q, strat, real_edges, self.q + 1)

    # -- ReplayWaiter hooks ----------------------------------------------

    def _plan(self):
        if self.stage == 1:
            off = self._stage_one_offer()
            if off:
                return off
            self.stage = 2
        if self.stage == 2:
            while self.stage_two_index < len(self.Y):
                y = self.Y[self.stage_two_index]
                iso = sum(1 << v for v in range(self.g.n) if self.client_deg[v] == 0)
                off = self._edges_from(1 << y, iso)
                if off:
                    return tuple(off)
                self.stage_two_index += 1
            self.stage = 3
            self._start_aux()
        if self.stage == 3:
            off = self.aux.next_offer(self._is_free)
            if off:
                return off
            self.stage = 4
        rest = [e for e, (u, v) in enumerate(self.g.edges) if self.freeadj[u] >> v & 1]
        if rest:
            raise StrategyError(f"{len(rest)} free edges left after the auxiliary game")
        return ()

    def _is_free(self, eid: int) -> bool:
        u, v = self.g.edges[eid]
        return bool(self.freeadj[u] >> v & 1)

    def _observe(self, offer, pick):
        self.stage_of_turn.append(self.stage)
        for eid in offer:
            u, v = self.g.edges[eid]
            self.freeadj[u] &= ~(1 << v)
            self.freeadj[v] &= ~(1 << u)
        a, b = self.g.edges[pick]
        self.client_deg[a] += 1
        self.client_deg[b] += 1
        if self.stage == 1:
            in_t = [w for w in (a, b) if self.T >> w & 1]
            x = min(in_t)
            y = b if x == a else a
            self.X.append(x)
            self.Y.append(y)
            self.U &= ~(self.T | 1 << y)
        elif self.stage == 2:
            y = self.Y[self.stage_two_index]
            self.Z[self.stage_two_index] = b if a == y else a
            self.stage_two_index += 1
        elif self.stage == 3:
            self.aux.observe(offer, pick)


class PathWaiter(ReplayWaiter):
    """Two-stage Waiter for keeping Client's paths short.

    Stage I offers all free edges at a greedy maximal ``T`` inside ``U``,
    leaving Client a union of stars centred in ``Y``; Stage II continues on
    an auxiliary ``K_s`` over ``Y`` with the same bias.
    """

    name = "S_P"

    def __init__(self, check_precondition: bool = True):
        super().__init__()
        self.check_precondition = check_precondition

    def _start(self, board, q):
        n = board.n
        if self.check_precondition and q + 1 < n - 1:
            raise PreconditionFailed(f"needs q+1 >= n-1 (q={q}, n={n})")
        self.g = board
        self.q = q
        self.freeadj = list(board.nbr_mask)
        self.U = (1 << n) - 1
        self.X: list[int] = []
        self.Ylist: list[int] = []
        self.Y = 0
        self.T = 0
        self.stage = 1
        self.stage_of_turn: list[int] = []
        self.aux: AuxiliaryGame | None = None
        self.aux_info: tuple[int, int, str] | None = None

    def _greedy_T(self) -> int:
        cap = self.q + 1
        T = 0
        total = 0
        for v in bits(self.U):
            add = (self.freeadj[v] & ~T).bit_count()
            if total + add <= cap:
                T |= 1 << v
                total += add
        return T

    def _is_free(self, eid: int) -> bool:
        u, v = self.g.edges[eid]
        return bool(self.freeadj[u] >> v & 1)

    def _plan(self):
        if self.stage == 1:
            while self.U:
                T = self._greedy_T()
                off = set()
                for v in bits(T):
                    for u in bits(self.freeadj[v]):
                        off.add(self.g.edge_id(u, v))
                if off:
                    self.T = T
                    return tuple(sorted(off))
                self.U &= ~T
            self.stage = 2
            ys = self.Ylist
            s = len(ys)
            if s <= 2:
                strat, kind = AllAtOnceWaiter(self.q + 1), "all"
            else:
                strat, kind = PathWaiter(), "S_P"
            self.aux_info = (s, self.q, kind)

            def real_edges(a, b):
                u, v = ys[a], ys[b]
                return [self.g.edge_id(u, v)] if self.freeadj[u] >> v & 1 else []

            self.aux = AuxiliaryGame(max(s, 1), self.q, strat, real_edges, self.q + 1)
        if self.stage == 2:
            off = self.aux.next_offer(self._is_free)
            if off:
                return off
            self.stage = 3
        rest = [e for e, (u, v) in enumerate(self.g.edges) if self.freeadj[u] >> v & 1]
        if rest:
            raise StrategyError(f"{len(rest)} free edges left after the auxiliary game")
        return ()

    def _observe(self, offer, pick):
        self.stage_of_turn.append(self.stage)
        for eid in offer:
            u, v = self.g.edges[eid]
            self.freeadj[u] &= ~(1 << v)
            self.freeadj[v] &= ~(1 << u)
        if self.stage == 1:
            a, b = self.g.edges[pick]
            in_t = [w for w in (a, b) if self.T >> w & 1]
            x = min(in_t)
            y = b if x == a else a
            self.X.append(x)
            if not self.Y >> y & 1:
                self.Y |= 1 << y
                self.Ylist.append(y)
            self.U &= ~(self.T | 1 << y)
        elif self.stage == 2:
            self.aux.observe(offer, pick)
