"""Exact game solving, critical bias and exhaustive strategy verification.

The fast solver works on the *residual family*: for each minimal winning
set not yet touched by Waiter, the part Client still lacks.  Positions with
the same residual family are equivalent, so it serves as the memo key.

Client-Waiter: a free edge in no live winning set is dead and can be
ignored.  Waiter never gains by offering it (the extra Client option only
leaves a subfamily of another option's result) and never needs it as
padding since short offers are legal.  A residual of size one means Client
wins: that edge must be offered some day and Client takes it.

Waiter-Client: dead edges still matter as padding for the fixed offer size,
but only their number does, so the key is (family, dead count).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

from .game import CW, WC, GameRecord, GameState, Owner, Side, Variant, new_game, step, waiter_takes_rest, winner_for
from .goals import Goal, evaluate, winning_sets
from .graph import Graph, bits

MAX_RELEVANT_EDGES = 16
MAX_NODES = 5_000_000


class SolverBudgetExceeded(RuntimeError):
    pass


class NonMonotoneOutcome(AssertionError):
    pass


Family = frozenset  # of int bitmasks


def normalise(sets) -> Family:
    """Drop supersets; the empty set, if present, absorbs everything."""
    out: list[int] = []
    for s in sorted(set(sets), key=lambda x: (x.bit_count(), x)):
        if not any(t & s == t for t in out):
            out.append(s)
    return frozenset(out)


def union_of(fam) -> int:
    u = 0
    for s in fam:
        u |= s
    return u


def after_turn(fam: Family, offer: int, pick: int | None) -> Family:
    """Client takes edge ``pick`` (a bitmask, or None), Waiter the rest."""
    waiter = offer & ~(pick or 0)
    out = []
    for s in fam:
        if s & waiter:
            continue
        out.append(s & ~(pick or 0))
    return normalise(out)


def residual_family(sets: list[int], owner: bytes, restrict: int | None = None) -> Family:
    cmask = wmask = 0
    for i, o in enumerate(owner):
        if o == Owner.CLIENT:
            cmask |= 1 << i
        elif o == Owner.WAITER:
            wmask |= 1 << i
    out = []
    for s in sets:
        if restrict is not None and s & ~restrict:
            continue
        if s & wmask:
            continue
        out.append(s & ~cmask)
    return normalise(out)


def free_mask(owner: bytes) -> int:
    m = 0
    for i, o in enumerate(owner):
        if o == Owner.FREE:
            m |= 1 << i
    return m


class ResidualSolver:
    """Memoised perfect-play search for one bias and variant."""

    def __init__(self, q: int, variant: Variant, max_nodes: int = MAX_NODES):
        self.q = q
        self.variant = Variant.parse(variant)
        self.max_nodes = max_nodes
        self.memo: dict = {}
        self.nodes = 0

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise SolverBudgetExceeded(f"more than {self.max_nodes} positions")

    # -- Client-Waiter ---------------------------------------------------

    def _cw_offers(self, fam: Family) -> Iterator[int]:
        u = union_of(fam)
        edges = bits(u)
        pairs = [s for s in fam if s.bit_count() == 2]
        # most-shared edges first tends to find refutations early
        load = {e: sum(1 for s in fam if s >> e & 1) for e in edges}
        edges.sort(key=lambda e: (-load[e], e))
        for size in range(min(self.q + 1, len(edges)), 0, -1):
            for combo in combinations(edges, size):
                o = 0
                for e in combo:
                    o |= 1 << e
                # a two-edge residual split by the offer hands Client the win
                if any((p & o) and (p & o) != p for p in pairs):
                    continue
                yield o

    def cw_waiter_wins(self, fam: Family) -> bool:
        if not fam:
            return True
        if any(s.bit_count() <= 1 for s in fam):
            return False
        hit = self.memo.get(fam)
        if hit is not None:
            return hit
        self._tick()
        res = False
        for o in self._cw_offers(fam):
            if all(self.cw_waiter_wins(after_turn(fam, o, 1 << e)) for e in bits(o)):
                res = True
                break
        self.memo[fam] = res
        return res

    def cw_winning_offer(self, fam: Family) -> int | None:
        if not fam or any(s.bit_count() <= 1 for s in fam):
            return None
        for o in self._cw_offers(fam):
            if all(self.cw_waiter_wins(after_turn(fam, o, 1 << e)) for e in bits(o)):
                return o
        return None

    # -- Waiter-Client ---------------------------------------------------

    def _wc_moves(self, fam: Family, dead: int) -> Iterator[tuple[int, int]]:
        edges = bits(union_of(fam))
        q1 = self.q + 1
        for live in range(min(q1, len(edges)), -1, -1):
            pad = q1 - live
            if pad > dead:
                continue
            for combo in combinations(edges, live):
                o = 0
                for e in combo:
                    o |= 1 << e
                yield o, pad

    def _wc_children(self, fam: Family, dead: int, o: int, pad: int):
        free_after = len(bits(union_of(fam))) + dead - (self.q + 1)
        picks = [1 << e for e in bits(o)] + ([None] if pad else [])
        for p in picks:
            child = after_turn(fam, o, p)
            yield p, child, free_after - union_of(child).bit_count()

    def wc_waiter_wins(self, fam: Family, dead: int) -> bool:
        if 0 in fam:
            return True
        if not fam:
            return False
        free = union_of(fam).bit_count() + dead
        if free < self.q + 1:
            return False  # Waiter takes the rest; Client gains nothing more
        key = (fam, dead)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self._tick()
        res = False
        for o, pad in self._wc_moves(fam, dead):
            if all(self.wc_waiter_wins(c, d) for _, c, d in self._wc_children(fam, dead, o, pad)):
                res = True
                break
        self.memo[key] = res
        return res

    def wc_winning_offer(self, fam: Family, dead: int) -> tuple[int, int] | None:
        if 0 in fam or not fam or union_of(fam).bit_count() + dead < self.q + 1:
            return None
        for o, pad in self._wc_moves(fam, dead):
            if all(self.wc_waiter_wins(c, d) for _, c, d in self._wc_children(fam, dead, o, pad)):
                return o, pad
        return None

    def wc_client_pick(self, fam: Family, dead: int, o: int, pad: int) -> tuple[int | None] | None:
        """``(p,)`` for a pick keeping Client winning (edge bit, None for
        padding), or None when every pick loses."""
        for p, c, d in self._wc_children(fam, dead, o, pad):
            if not self.wc_waiter_wins(c, d):
                return (p,)
        return None

    # -- shared ----------------------------------------------------------

    def waiter_wins(self, fam: Family, dead: int = 0) -> bool:
        if self.variant is CW:
            return self.cw_waiter_wins(fam)
        return self.wc_waiter_wins(fam, dead)


@dataclass
class SolveResult:
    winner: Side
    nodes: int
    relevant_edges: int
    policy: list[tuple[str, tuple[int, ...]]] | None = field(default=None, repr=False)


def _check_budget(sets: list[int], max_edges: int) -> None:
    rel = union_of(sets).bit_count()
    if rel > max_edges:
        raise SolverBudgetExceeded(f"{rel} goal-relevant edges exceeds limit {max_edges}")


def solve(
    board: Graph,
    goal: Goal,
    q: int,
    variant: Variant | str,
    max_edges: int = MAX_RELEVANT_EDGES,
    max_nodes: int = MAX_NODES,
    want_policy: bool = False,
) -> SolveResult:
    """Winner under perfect play."""
    variant = Variant.parse(variant)
    state = new_game(board, goal, q, variant)
    sets = winning_sets(goal, board)
    _check_budget(sets, max_edges)
    fam = normalise(sets)
    rs = ResidualSolver(q, variant, max_nodes)
    dead = board.e - union_of(fam).bit_count()
    waiter = rs.waiter_wins(fam, dead)
    if variant is CW:
        winner = Side.WAITER if waiter else Side.CLIENT
    else:
        winner = Side.CLIENT if not waiter else Side.WAITER
    policy = None
    if want_policy and winner is Side.WAITER:
        policy = _waiter_policy_table(state, sets, rs)
    return SolveResult(winner, rs.nodes, union_of(fam).bit_count(), policy)


def _waiter_policy_table(state: GameState, sets: list[int], rs: ResidualSolver, limit: int = 10_000):
    """Winning Waiter offers on every position reachable against any Client."""
    policy = SolverPolicy(sets, rs)
    table: list[tuple[str, tuple[int, ...]]] = []
    stack = [state]
    seen = set()
    while stack and len(table) < limit:
        s = stack.pop()
        if s.owner in seen or s.e_free == 0:
            continue
        seen.add(s.owner)
        if s.waiter_must_take_rest():
            continue
        fam = residual_family(sets, s.owner)
        if not fam or 0 in fam:
            continue
        offer = policy.offer(s)
        table.append((s.ownership_string(), offer))
        for e in offer:
            stack.append(step(s, offer, e))
    return table


class SolverPolicy:
    """Perfect-play moves read off the residual solver.

    ``restrict`` (edge bitmask) limits attention to winning sets inside a
    sub-board; offers then only use free edges of that sub-board.
    """

    def __init__(self, sets: list[int], rs: ResidualSolver, restrict: int | None = None):
        self.sets = [s for s in sets if restrict is None or not s & ~restrict]
        self.rs = rs
        self.restrict = restrict

    def _free(self, state: GameState) -> int:
        f = free_mask(state.owner)
        return f & self.restrict if self.restrict is not None else f

    def family(self, state: GameState) -> Family:
        return residual_family(self.sets, state.owner)

    def waiter_wins(self, state: GameState) -> bool:
        fam = self.family(state)
        if self.rs.variant is CW:
            return self.rs.cw_waiter_wins(fam)
        return self.rs.wc_waiter_wins(fam, self._free(state).bit_count() - union_of(fam).bit_count())

    def offer(self, state: GameState) -> tuple[int, ...]:
        """Winning offer when one exists, else a legal fallback (lowest ids)."""
        fam = self.family(state)
        free = self._free(state)
        q1 = state.q + 1
        if self.rs.variant is CW:
            o = self.rs.cw_winning_offer(fam)
            if o is None:
                # lost or already decided: any legal offer, relevant edges first
                pool = bits(union_of(fam) & free) or bits(free)
                return tuple(pool[:q1])
            return tuple(bits(o))
        dead_mask = free & ~union_of(fam)
        found = self.rs.wc_winning_offer(fam, dead_mask.bit_count())
        if found is None:
            chosen = bits(free)[:q1]
            return tuple(chosen)
        o, pad = found
        return tuple(sorted(bits(o) + bits(dead_mask)[:pad]))

    def pick(self, state: GameState, offer) -> int:
        """Client's perfect reply (lowest id on ties or in lost positions)."""
        fam = self.family(state)
        o = 0
        for e in offer:
            o |= 1 << e
        if self.rs.variant is CW:
            for e in sorted(offer):
                if not self.rs.cw_waiter_wins(after_turn(fam, o, 1 << e)):
                    return e
            return min(offer)
        free = self._free(state)
        live_o = o & union_of(fam)
        pad_edges = [e for e in sorted(offer) if not (live_o >> e & 1)]
        found = self.rs.wc_client_pick(fam, free.bit_count() - union_of(fam).bit_count(), live_o, len(pad_edges))
        if found is None:
            return min(offer)
        (p,) = found
        return pad_edges[0] if p is None else p.bit_length() - 1


def solver_policy(board: Graph, goal: Goal, q: int, variant: Variant | str, restrict: int | None = None) -> SolverPolicy:
    sets = winning_sets(goal, board)
    return SolverPolicy(sets, ResidualSolver(q, Variant.parse(variant)), restrict)


# -- naive oracle -------------------------------------------------------------


def naive_solve(board: Graph, goal: Goal, q: int, variant: Variant | str) -> Side:
    """Plain game-tree search on ownership vectors via the referee.

    No memo, no dead-edge reduction, no offer pruning; only the goal
    evaluation on a given Client edge set is cached.
    """
    variant = Variant.parse(variant)
    start = new_game(board, goal, q, variant)
    held_cache: dict[bytes, bool] = {}

    def held(owner: bytes, allow_free: bool) -> bool:
        key = bytes(o if o != Owner.FREE else (Owner.CLIENT if allow_free else Owner.WAITER) for o in owner)
        if key not in held_cache:
            held_cache[key] = evaluate(goal, board.edge_subgraph(i for i, o in enumerate(key) if o == Owner.CLIENT))
        return held_cache[key]

    def client_wins(state: GameState) -> bool:
        if held(state.owner, False):
            return variant is CW
        if not held(state.owner, True):
            return variant is WC
        if state.waiter_must_take_rest():
            return client_wins(waiter_takes_rest(state))
        free = state.free_edges()
        sizes = range(1, state.q + 2) if variant is CW else [state.q + 1]
        for k in sizes:
            for offer in combinations(free, k):
                if not any(client_wins(step(state, offer, e)) for e in offer):
                    return False
        return True

    return Side.CLIENT if client_wins(start) else Side.WAITER


# -- critical bias ------------------------------------------------------------


def critical_bias(board: Graph, goal: Goal, q_max: int, variant: Variant | str = CW, **kw) -> int | None:
    """Largest ``q <= q_max`` at which Client wins; None when Client never does.

    Every bias up to ``q_max`` is solved and outcomes must flip at most once,
    from Client to Waiter in Client-Waiter; anything else raises.
    """
    variant = Variant.parse(variant)
    outcomes = [solve(board, goal, q, variant, **kw).winner for q in range(1, q_max + 1)]
    flips = sum(1 for a, b in zip(outcomes, outcomes[1:]) if a != b)
    if variant is CW and (flips > 1 or (flips == 1 and outcomes[0] is Side.WAITER)):
        raise NonMonotoneOutcome(f"outcomes not monotone in q: {[o.value for o in outcomes]}")
    client_qs = [q for q, w in enumerate(outcomes, start=1) if w is Side.CLIENT]
    return max(client_qs) if client_qs else None


# -- exhaustive verification --------------------------------------------------


@dataclass(frozen=True)
class Verified:
    positions: int


@dataclass(frozen=True)
class Counterexample:
    record: GameRecord

    def serialize(self) -> str:
        return self.record.serialize()


def verify_strategy(
    strategy,
    board: Graph,
    goal: Goal,
    q: int,
    variant: Variant | str,
    side: Side | str = Side.WAITER,
    max_positions: int = 2_000_000,
    memo_by_ownership: bool | None = None,
) -> Verified | Counterexample:
    """Play ``strategy`` against every legal opponent line.

    A Waiter strategy faces all Client picks, a Client strategy all Waiter
    offers.  Success means the strategy's side wins on every branch.  Lines
    are cut as soon as the goal is decided.  Positions are memoised by
    ownership only when the strategy declares ``history_free = True``.
    """
    variant = Variant.parse(variant)
    side = Side(side) if not isinstance(side, Side) else side
    start = new_game(board, goal, q, variant)
    if memo_by_ownership is None:
        memo_by_ownership = bool(getattr(strategy, "history_free", False))
    held_cache: dict[bytes, bool] = {}
    seen: set[bytes] = set()
    count = 0

    def status(state: GameState) -> bool | None:
        def held(allow_free):
            key = bytes(o if o != Owner.FREE else (Owner.CLIENT if allow_free else Owner.WAITER) for o in state.owner)
            if key not in held_cache:
                held_cache[key] = evaluate(goal, board.edge_subgraph(i for i, o in enumerate(key) if o == Owner.CLIENT))
            return held_cache[key]

        if held(False):
            return True
        if state.e_free == 0 or not held(True):
            return False
        return None

    def record(state: GameState, held_goal: bool) -> GameRecord:
        return GameRecord(start, state, winner_for(variant, held_goal), held_goal, True)

    def fail(state: GameState) -> GameRecord | None:
        """Counterexample below ``state`` or None."""
        nonlocal count
        st = status(state)
        if st is not None:
            won = winner_for(variant, st) is side
            return None if won else record(state, st)
        if state.waiter_must_take_rest():
            return fail(waiter_takes_rest(state))
        if memo_by_ownership:
            if state.owner in seen:
                return None
            seen.add(state.owner)
        count += 1
        if count > max_positions:
            raise SolverBudgetExceeded(f"verification exceeded {max_positions} positions")
        if side is Side.WAITER:
            offer = tuple(strategy.offer(state))
            for e in offer:
                bad = fail(step(state, offer, e))
                if bad:
                    return bad
            return None
        free = state.free_edges()
        sizes = range(1, q + 2) if variant is CW else [q + 1]
        for k in sizes:
            for offer in combinations(free, k):
                bad = fail(step(state, offer, strategy.pick(state, offer)))
                if bad:
                    return bad
        return None

    bad = fail(start)
    return Counterexample(bad) if bad else Verified(count)
