"""Referee for biased Client-Waiter and Waiter-Client games on edge sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable, Iterator

import numpy as np

from .goals import Goal, evaluate, validate_goal
from .graph import Graph


class Variant(str, Enum):
    CLIENT_WAITER = "cw"
    WAITER_CLIENT = "wc"

    @classmethod
    def parse(cls, text: "str | Variant") -> "Variant":
        if isinstance(text, Variant):
            return text
        t = text.strip().lower().replace("-", "").replace("_", "")
        if t in ("cw", "clientwaiter"):
            return cls.CLIENT_WAITER
        if t in ("wc", "waiterclient"):
            return cls.WAITER_CLIENT
        raise ValueError(f"unknown variant {text!r}")


CW = Variant.CLIENT_WAITER
WC = Variant.WAITER_CLIENT


class Owner(IntEnum):
    FREE = 0
    CLIENT = 1
    WAITER = 2


class Side(str, Enum):
    CLIENT = "Client"
    WAITER = "Waiter"


class IllegalOffer(ValueError):
    pass


class IllegalPick(ValueError):
    pass


@dataclass(frozen=True)
class Turn:
    offer: tuple[int, ...]
    pick: int | None  # None marks Waiter taking the last short batch in WC
    prev: "Turn | None" = field(repr=False, compare=False)
    index: int = 0

    def chain(self) -> list["Turn"]:
        out = []
        node: Turn | None = self
        while node is not None:
            out.append(node)
            node = node.prev
        return out[::-1]


@dataclass(frozen=True)
class GameState:
    board: Graph
    goal: Goal
    q: int
    variant: Variant
    owner: bytes
    last: Turn | None = None
    e_client: int = 0
    e_waiter: int = 0

    @property
    def e_free(self) -> int:
        return self.board.e - self.e_client - self.e_waiter

    @property
    def history(self) -> list[Turn]:
        return self.last.chain() if self.last is not None else []

    @property
    def turns(self) -> int:
        return self.last.index + 1 if self.last is not None else 0

    def is_free(self, eid: int) -> bool:
        return self.owner[eid] == Owner.FREE

    def edges_of(self, who: Owner) -> list[int]:
        return [i for i, o in enumerate(self.owner) if o == who]

    def free_edges(self) -> list[int]:
        return self.edges_of(Owner.FREE)

    def client_edges(self) -> list[int]:
        return self.edges_of(Owner.CLIENT)

    def waiter_edges(self) -> list[int]:
        return self.edges_of(Owner.WAITER)

    def free_incident(self, v: int) -> list[int]:
        own = self.owner
        return [eid for eid in self.board.incident[v] if own[eid] == Owner.FREE]

    def count_within(self, who: Owner, vmask: int) -> int:
        """``e_who(A)`` for the vertex bitmask ``A``."""
        return sum(1 for eid in self.board.edges_within(vmask) if self.owner[eid] == who)

    def count_between(self, who: Owner, amask: int, bmask: int) -> int:
        """``e_who(A, B)``."""
        return sum(1 for eid in self.board.edges_between(amask, bmask) if self.owner[eid] == who)

    def client_graph(self) -> Graph:
        return self.board.edge_subgraph(self.client_edges())

    def available_graph(self) -> Graph:
        """Client's edges plus every free edge."""
        return self.board.edge_subgraph(i for i, o in enumerate(self.owner) if o != Owner.WAITER)

    def ownership_string(self) -> str:
        return "".join("FCW"[o] for o in self.owner)

    def waiter_must_take_rest(self) -> bool:
        return self.variant is WC and 0 < self.e_free < self.q + 1

    def finished(self) -> bool:
        return self.e_free == 0


def new_game(board: Graph, goal: Goal, q: int, variant: Variant | str) -> GameState:
    if int(q) != q or q < 1:
        raise ValueError(f"bias must be a positive integer, got {q}")
    validate_goal(goal, board)
    return GameState(board, goal, int(q), Variant.parse(variant), bytes(board.e))


def check_offer(state: GameState, offer: Iterable[int]) -> tuple[int, ...]:
    off = tuple(offer)
    if not off:
        raise IllegalOffer("empty offer")
    if len(set(off)) != len(off):
        raise IllegalOffer(f"offer {off} repeats an edge")
    for eid in off:
        if not 0 <= eid < state.board.e:
            raise IllegalOffer(f"edge {eid} not on the board")
        if state.owner[eid] != Owner.FREE:
            raise IllegalOffer(f"edge {eid} is not free")
    q1 = state.q + 1
    if state.variant is CW:
        if len(off) > q1:
            raise IllegalOffer(f"offer of {len(off)} edges exceeds q+1={q1}")
    elif state.e_free >= q1 and len(off) != q1:
        raise IllegalOffer(f"Waiter-Client offers must have exactly q+1={q1} edges")
    elif state.e_free < q1:
        raise IllegalOffer("fewer than q+1 free edges remain; Waiter takes them all")
    return off


def step(state: GameState, offer: Iterable[int], pick: int) -> GameState:
    off = check_offer(state, offer)
    if pick not in off:
        raise IllegalPick(f"pick {pick} not in offer {off}")
    own = bytearray(state.owner)
    for eid in off:
        own[eid] = Owner.WAITER
    own[pick] = Owner.CLIENT
    idx = state.last.index + 1 if state.last else 0
    return GameState(
        state.board,
        state.goal,
        state.q,
        state.variant,
        bytes(own),
        Turn(off, pick, state.last, idx),
        state.e_client + 1,
        state.e_waiter + len(off) - 1,
    )


def waiter_takes_rest(state: GameState) -> GameState:
    if not state.waiter_must_take_rest():
        raise IllegalOffer("Waiter may only take the remainder in Waiter-Client with fewer than q+1 free edges")
    rest = tuple(state.free_edges())
    own = bytes(Owner.WAITER if o == Owner.FREE else o for o in state.owner)
    idx = state.last.index + 1 if state.last else 0
    return GameState(
        state.board, state.goal, state.q, state.variant, own, Turn(rest, None, state.last, idx),
        state.e_client, state.e_waiter + len(rest),
    )


def goal_status(state: GameState) -> bool | None:
    """True once Client holds the goal, False once it is out of reach."""
    if evaluate(state.goal, state.client_graph()):
        return True
    if state.e_free == 0 or not evaluate(state.goal, state.available_graph()):
        return False
    return None


def winner_for(variant: Variant, goal_held: bool) -> Side:
    client_wins = goal_held if variant is CW else not goal_held
    return Side.CLIENT if client_wins else Side.WAITER


@dataclass(frozen=True)
class GameRecord:
    initial: GameState = field(repr=False)
    final: GameState = field(repr=False)
    winner: Side
    goal_held: bool
    stopped_early: bool = False

    @property
    def history(self) -> list[Turn]:
        return self.final.history

    def serialize(self) -> str:
        return format_history(self.history)


def format_history(turns: Iterable[Turn]) -> str:
    lines = []
    for t in turns:
        offer = ",".join(map(str, t.offer))
        lines.append(f"WAITER_TAKES {offer}" if t.pick is None else f"OFFER {offer} PICK {t.pick}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_history(text: str) -> Iterator[tuple[tuple[int, ...], int | None]]:
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "WAITER_TAKES" and len(parts) == 2:
            yield tuple(int(x) for x in parts[1].split(",")), None
        elif parts[0] == "OFFER" and len(parts) == 4 and parts[2] == "PICK":
            yield tuple(int(x) for x in parts[1].split(",")), int(parts[3])
        else:
            raise ValueError(f"bad history line {line!r}")


def replay(initial: GameState, history: str | Iterable[tuple[tuple[int, ...], int | None]]) -> GameState:
    moves = parse_history(history) if isinstance(history, str) else history
    state = initial
    for offer, pick in moves:
        if pick is None:
            if tuple(sorted(offer)) != tuple(state.free_edges()):
                raise IllegalOffer("WAITER_TAKES must list exactly the remaining free edges")
            state = waiter_takes_rest(state)
        else:
            state = step(state, offer, pick)
    return state


def play(
    board: Graph,
    goal: Goal,
    q: int,
    variant: Variant | str,
    waiter,
    client,
    seed: int | None = None,
    early_stop: bool = True,
) -> GameRecord:
    """Drive a full game between two policies.

    ``waiter.offer(state)`` and ``client.pick(state, offer)`` are queried in
    turn; randomised policies are reseeded from ``seed`` first.  Illegal
    moves raise.  With ``early_stop`` the game ends as soon as the goal is
    held by Client or can no longer be reached.
    """
    state = new_game(board, goal, q, variant)
    ss = np.random.SeedSequence(seed)
    wseed, cseed = ss.spawn(2)
    if hasattr(waiter, "reset"):
        waiter.reset(np.random.default_rng(wseed))
    if hasattr(client, "reset"):
        client.reset(np.random.default_rng(cseed))
    initial = state
    stopped = False
    while state.e_free:
        if early_stop and goal_status(state) is not None:
            stopped = True
            break
        if state.waiter_must_take_rest():
            state = waiter_takes_rest(state)
            break
        offer = check_offer(state, waiter.offer(state))
        state = step(state, offer, client.pick(state, offer))
    held = evaluate(goal, state.client_graph())
    return GameRecord(initial, state, winner_for(state.variant, held), held, stopped)
