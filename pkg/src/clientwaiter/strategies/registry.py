"""String keys for strategies, as used by the CLI and experiment configs.

Keys are ``name`` or ``name:argument``; the argument names a family kind
for the potential strategies (``transversal:tree_outedges``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from ..graph import Graph
from .base import ArbitraryWaiter, ClientStrategy, WaiterStrategy
from .clients import AvoidPotentialClient, GreedyClient, RandomClient, RandomSubsetClient, SolverClient, TransversalPotentialClient
from .component import ComponentWaiter, PathWaiter
from .dispatch import waiter_dispatch
from .k3 import CoreReductionWaiter, K3Bias2Waiter
from .orientation import ForestWaiter, OrientationWaiter
from .star import StarWaiter
from .triangles import SafeOfferWaiter, ThreatClient
from .waiters import GreedyAntiWaiter, RandomWaiter, SolverWaiter


class UnknownStrategy(KeyError):
    pass


@dataclass
class StrategyContext:
    """What a strategy may need besides its key."""

    board: Graph
    q: int
    pattern: Graph | None = None
    family: Any = None
    family_source: Any = None  # board or tree a family kind is built on
    params: Any = None
    seed: int | None = None

    def family_for(self, kind: str | None):
        if self.family is not None and kind in (None, getattr(self.family, "kind", None)):
            return self.family
        if kind is None:
            if self.family is None:
                raise UnknownStrategy("strategy needs a family; give one as name:kind")
            return self.family
        from .criteria import StrategyParams, build_family

        params = self.params or StrategyParams(q=self.q)
        return build_family(kind, self.family_source or self.board, params, self.q)

    def need_pattern(self) -> Graph:
        if self.pattern is None:
            raise UnknownStrategy("strategy needs a pattern goal")
        return self.pattern


WAITERS: dict[str, Callable[[StrategyContext, str | None], WaiterStrategy]] = {
    "star": lambda c, a: StarWaiter(c.q),
    "S_C": lambda c, a: ComponentWaiter(),
    "S_P": lambda c, a: PathWaiter(),
    "random": lambda c, a: RandomWaiter(c.seed),
    "arbitrary": lambda c, a: ArbitraryWaiter(),
    "solver": lambda c, a: SolverWaiter(),
    "greedy_anti": lambda c, a: GreedyAntiWaiter(c.family_for(a), c.q),
    "orientation": lambda c, a: OrientationWaiter(c.need_pattern()),
    "forest": lambda c, a: ForestWaiter(c.need_pattern()),
    "k3_bias2": lambda c, a: K3Bias2Waiter(),
    "core": lambda c, a: CoreReductionWaiter(c.need_pattern()),
    "dispatch": lambda c, a: waiter_dispatch(c.board, c.need_pattern(), c.q),
    "safe_offer": lambda c, a: SafeOfferWaiter(),
}

CLIENTS: dict[str, Callable[[StrategyContext, str | None], ClientStrategy]] = {
    "random": lambda c, a: RandomClient(c.seed),
    "greedy": lambda c, a: GreedyClient(),
    "random_subset": lambda c, a: RandomSubsetClient(c.seed),
    "avoid": lambda c, a: AvoidPotentialClient(c.family_for(a), c.q),
    "transversal": lambda c, a: TransversalPotentialClient(c.family_for(a), c.q),
    "solver": lambda c, a: SolverClient(),
    "threat": lambda c, a: ThreatClient(),
}


def _split(key: str) -> tuple[str, str | None]:
    name, _, arg = key.partition(":")
    return name.strip(), (arg.strip() or None)


def make_waiter(key: str, ctx: StrategyContext) -> WaiterStrategy:
    name, arg = _split(key)
    if name not in WAITERS:
        raise UnknownStrategy(f"unknown waiter {key!r}; known: {', '.join(sorted(WAITERS))}")
    return WAITERS[name](ctx, arg)


def make_client(key: str, ctx: StrategyContext) -> ClientStrategy:
    name, arg = _split(key)
    if name not in CLIENTS:
        raise UnknownStrategy(f"unknown client {key!r}; known: {', '.join(sorted(CLIENTS))}")
    return CLIENTS[name](ctx, arg)
