"""Waiter and Client policies.

The ``waiter_*`` and ``client_*`` factories below are the stable entry
points; the classes live in the submodules.
"""

from __future__ import annotations

from ..graph import Graph
from .base import ArbitraryWaiter, ClientStrategy, PreconditionFailed, StrategyError, WaiterStrategy
from .clients import AvoidPotentialClient, GreedyClient, RandomClient, RandomSubsetClient, TransversalPotentialClient
from .component import ComponentWaiter, PathWaiter
from .criteria import StrategyParams, build_family, evaluate_criteria
from .dispatch import NoApplicableStrategy, waiter_dispatch
from .k3 import CoreReductionWaiter, K3Bias2Waiter
from .orientation import ForestWaiter, OrientationWaiter, SolverForestPairPolicy
from .star import StarWaiter, star_bound


def waiter_star(q: int | None = None) -> StarWaiter:
    return StarWaiter(q)


def waiter_component(q: int | None = None) -> ComponentWaiter:
    return ComponentWaiter()


def waiter_path(q: int | None = None) -> PathWaiter:
    return PathWaiter()


def waiter_orientation(g: Graph | None, pattern: Graph) -> OrientationWaiter:
    return OrientationWaiter(pattern)


def waiter_forest(g: Graph | None, pattern: Graph, subgame=SolverForestPairPolicy) -> ForestWaiter:
    return ForestWaiter(pattern, pair_policy=subgame)


def waiter_k3_bias2(g: Graph | None = None) -> K3Bias2Waiter:
    return K3Bias2Waiter()


def waiter_core_reduction(g: Graph | None, pattern: Graph, inner=None) -> CoreReductionWaiter:
    return CoreReductionWaiter(pattern, inner)


def client_random_subset(q: int | None = None, seed: int | None = None) -> RandomSubsetClient:
    return RandomSubsetClient(seed)


def client_avoid_potential(family, q: int) -> AvoidPotentialClient:
    return AvoidPotentialClient(family, q)


def client_transversal_potential(family, q: int) -> TransversalPotentialClient:
    return TransversalPotentialClient(family, q)


__all__ = [
    "ArbitraryWaiter",
    "ClientStrategy",
    "WaiterStrategy",
    "PreconditionFailed",
    "StrategyError",
    "NoApplicableStrategy",
    "GreedyClient",
    "RandomClient",
    "StrategyParams",
    "build_family",
    "evaluate_criteria",
    "star_bound",
    "waiter_star",
    "waiter_component",
    "waiter_path",
    "waiter_orientation",
    "waiter_forest",
    "waiter_k3_bias2",
    "waiter_core_reduction",
    "waiter_dispatch",
    "client_random_subset",
    "client_avoid_potential",
    "client_transversal_potential",
]
