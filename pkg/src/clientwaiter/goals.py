"""Monotone increasing goals and their minimal winning sets."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Union

from .families import ExplicitFamily, Family, minimal_sets
from .graph import Graph, make_path, make_star
from .paths import longest_path
from .structure import find_copies

WINNING_SET_LIMIT = 24  # board edges for generic subset enumeration


class MalformedGoal(ValueError):
    pass


@dataclass(frozen=True)
class FamilyGoal:
    """Client wins by fully claiming some member."""

    family: Family


@dataclass(frozen=True)
class ContainsCopy:
    pattern: Graph


@dataclass(frozen=True)
class ComponentAtLeast:
    vertices: int


@dataclass(frozen=True)
class PathAtLeast:
    edges: int


@dataclass(frozen=True)
class MaxDegreeAtLeast:
    degree: int


@dataclass(frozen=True)
class OutEdgeQuota:
    """Client needs ``quota`` edges out of every listed edge group."""

    quota: int
    groups: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class CutQuota:
    """Client needs at least ``need`` edges of each listed edge set."""

    cuts: tuple[tuple[tuple[int, ...], int], ...]


@dataclass(frozen=True)
class Transversal:
    """Client wins by claiming an edge of every member."""

    family: Family


Goal = Union[FamilyGoal, ContainsCopy, ComponentAtLeast, PathAtLeast, MaxDegreeAtLeast, OutEdgeQuota, CutQuota, Transversal]


def validate_goal(goal: Goal, board: Graph) -> None:
    def ids_ok(ids):
        return all(0 <= e < board.e for e in ids)

    if isinstance(goal, ContainsCopy):
        if goal.pattern.e == 0:
            raise MalformedGoal("pattern must have an edge")
    elif isinstance(goal, ComponentAtLeast):
        if goal.vertices < 2:
            raise MalformedGoal("component goal needs at least 2 vertices")
    elif isinstance(goal, PathAtLeast):
        if goal.edges < 1:
            raise MalformedGoal("path goal needs length at least 1")
    elif isinstance(goal, MaxDegreeAtLeast):
        if goal.degree < 1:
            raise MalformedGoal("degree goal needs degree at least 1")
    elif isinstance(goal, OutEdgeQuota):
        if goal.quota < 1 or not goal.groups:
            raise MalformedGoal("quota goal needs a positive quota and at least one group")
        if not all(ids_ok(g) for g in goal.groups):
            raise MalformedGoal("quota group references an edge not on the board")
    elif isinstance(goal, CutQuota):
        if not goal.cuts:
            raise MalformedGoal("cut goal needs at least one cut")
        for ids, need in goal.cuts:
            if need < 0 or not ids_ok(ids):
                raise MalformedGoal("cut references an edge not on the board or has a negative quota")
    elif isinstance(goal, (FamilyGoal, Transversal)):
        if isinstance(goal.family, ExplicitFamily) and not ids_ok(goal.family.ground()):
            raise MalformedGoal("family member references an edge not on the board")
    else:
        raise MalformedGoal(f"unknown goal {goal!r}")


def _root_ids(g: Graph) -> list[int]:
    return list(g.origin) if g.origin is not None else list(range(g.e))


def evaluate(goal: Goal, client: Graph) -> bool:
    """Does Client's graph satisfy the goal?

    ``client`` is an edge subgraph of the board, so ``client.origin`` maps
    its edges back to board ids (used by the id-based goals).
    """
    if isinstance(goal, ContainsCopy):
        return client.e >= goal.pattern.e and bool(find_copies(client, goal.pattern, limit=1))
    if isinstance(goal, ComponentAtLeast):
        return client.e >= goal.vertices - 1 and max(len(c) for c in client.components()) >= goal.vertices
    if isinstance(goal, PathAtLeast):
        return client.e >= goal.edges and longest_path(client).length >= goal.edges
    if isinstance(goal, MaxDegreeAtLeast):
        return client.max_degree() >= goal.degree
    ids = set(_root_ids(client))
    if isinstance(goal, OutEdgeQuota):
        return all(sum(1 for e in grp if e in ids) >= goal.quota for grp in goal.groups)
    if isinstance(goal, CutQuota):
        return all(sum(1 for e in cut if e in ids) >= need for cut, need in goal.cuts)
    if isinstance(goal, FamilyGoal):
        return goal.family.any_contained(ids)
    if isinstance(goal, Transversal):
        return goal.family.all_hit(ids)
    raise MalformedGoal(f"unknown goal {goal!r}")


def _copies_masks(board: Graph, pattern: Graph) -> list[int]:
    return [sum(1 << e for e in c) for c in find_copies(board, pattern)]


def _tree_masks(board: Graph, s: int) -> list[int]:
    # a minimal connected spread over s vertices is a tree with s - 1 edges
    from .forests import is_forest

    out = []
    for combo in combinations(range(board.e), s - 1):
        verts = {x for e in combo for x in board.edges[e]}
        if len(verts) == s and is_forest(board, combo):
            out.append(sum(1 << e for e in combo))
    return out


def _by_predicate(board: Graph, pred: Callable[[int], bool]) -> list[int]:
    if board.e > WINNING_SET_LIMIT:
        raise MalformedGoal(f"board with {board.e} edges too large for subset enumeration")
    found: list[int] = []
    for k in range(board.e + 1):
        for combo in combinations(range(board.e), k):
            mask = sum(1 << e for e in combo)
            if any(f & mask == f for f in found):
                continue
            if pred(mask):
                found.append(mask)
    return found


def winning_sets(goal: Goal, board: Graph) -> list[int]:
    """Inclusion-minimal edge sets (bitmasks) on which the goal holds."""
    validate_goal(goal, board)
    if isinstance(goal, ContainsCopy):
        return minimal_sets(_copies_masks(board, goal.pattern))
    if isinstance(goal, PathAtLeast):
        return minimal_sets(_copies_masks(board, make_path(goal.edges + 1)))
    if isinstance(goal, MaxDegreeAtLeast):
        return minimal_sets(_copies_masks(board, make_star(goal.degree)))
    if isinstance(goal, ComponentAtLeast):
        return minimal_sets(_tree_masks(board, goal.vertices))
    if isinstance(goal, FamilyGoal):
        mems = goal.family.members()
        if any(not m for m in mems):
            return [0]
        return minimal_sets(sum(1 << e for e in m) for m in mems)

    if isinstance(goal, Transversal):
        fam = [sum(1 << e for e in m) for m in goal.family.members()]
        return _by_predicate(board, lambda mask: all(f & mask for f in fam))
    if isinstance(goal, OutEdgeQuota):
        grp = [sum(1 << e for e in g) for g in goal.groups]
        return _by_predicate(board, lambda mask: all((g & mask).bit_count() >= goal.quota for g in grp))
    if isinstance(goal, CutQuota):
        cuts = [(sum(1 << e for e in c), need) for c, need in goal.cuts]
        return _by_predicate(board, lambda mask: all((c & mask).bit_count() >= need for c, need in cuts))
    raise MalformedGoal(f"unknown goal {goal!r}")
