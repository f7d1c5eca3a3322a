"""Families of edge subsets with potential-function queries.

Two shapes cover every family used here:

* :class:`ExplicitFamily` lists its members.
* :class:`BlockFamily` has as members all ``s``-element subsets of some
  edge blocks (one threshold per block).  Its potentials have binomial
  closed forms per block, so huge families stay cheap.  A subset arising
  from several blocks is counted once per block; that can only raise the
  potential sums, never lower them.

Potentials take ``owner`` (one byte per edge: 0 free, 1 Client, 2 Waiter)
and a ``mode``: ``"avoid"`` keeps members without Waiter edges (Client must
avoid owning one) and ``"hit"`` keeps members without Client edges (Client
must hit each one).  A surviving member weighs ``beta ** free_count``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb, exp, fsum, log
from typing import Iterable, Sequence

FREE, CLIENT, WAITER = 0, 1, 2
MEMBER_BUDGET = 200_000


class FamilyTooLarge(RuntimeError):
    pass


def _blocked(mode: str) -> int:
    if mode == "avoid":
        return WAITER
    if mode == "hit":
        return CLIENT
    raise ValueError(f"unknown potential mode {mode!r}")


def log_term(count: int, size: int, log_beta: float) -> float:
    return log(count) + size * log_beta


class Family:
    """Common interface; see module docstring for the potential semantics."""

    kind = "family"

    def member_sizes(self) -> Counter:
        raise NotImplementedError

    def members(self, budget: int = MEMBER_BUDGET) -> list[frozenset[int]]:
        raise NotImplementedError

    def any_contained(self, edges: Iterable[int]) -> bool:
        raise NotImplementedError

    def all_hit(self, edges: Iterable[int]) -> bool:
        raise NotImplementedError

    def potential(self, owner: Sequence[int], mode: str, beta: float) -> float:
        raise NotImplementedError

    def potential_delta(self, owner: Sequence[int], changes: dict[int, int], mode: str, beta: float) -> float:
        raise NotImplementedError

    def alive_count(self, owner: Sequence[int], mode: str) -> int:
        raise NotImplementedError

    def criterion_sum(self, beta: float) -> float:
        """``sum over members of beta ** |A|`` from the size histogram."""
        lb = log(beta)
        terms = [exp(log_term(c, s, lb)) for s, c in self.member_sizes().items() if c]
        return fsum(terms)


@dataclass(frozen=True, eq=False)
class ExplicitFamily(Family):
    sets: tuple[frozenset[int], ...]
    kind: str = "explicit"

    def __post_init__(self):
        norm = tuple(frozenset(s) for s in self.sets)
        if any(not s for s in norm):
            raise ValueError("explicit family members must be nonempty")
        object.__setattr__(self, "sets", norm)

    @cached_property
    def _index(self) -> dict[int, list[int]]:
        idx: dict[int, list[int]] = {}
        for i, s in enumerate(self.sets):
            for e in s:
                idx.setdefault(e, []).append(i)
        return idx

    def ground(self) -> frozenset[int]:
        return frozenset().union(*self.sets) if self.sets else frozenset()

    def member_sizes(self) -> Counter:
        return Counter(len(s) for s in self.sets)

    def members(self, budget: int = MEMBER_BUDGET) -> list[frozenset[int]]:
        return list(dict.fromkeys(self.sets))

    def any_contained(self, edges) -> bool:
        es = set(edges)
        return any(s <= es for s in self.sets)

    def all_hit(self, edges) -> bool:
        es = set(edges)
        return all(s & es for s in self.sets)

    def _weight(self, s, owner, blocked, beta, changes=None) -> float:
        free = 0
        for e in s:
            o = changes.get(e, owner[e]) if changes else owner[e]
            if o == blocked:
                return 0.0
            free += o == FREE
        return beta**free

    def potential(self, owner, mode, beta) -> float:
        b = _blocked(mode)
        return fsum(self._weight(s, owner, b, beta) for s in self.sets)

    def potential_delta(self, owner, changes, mode, beta) -> float:
        b = _blocked(mode)
        touched = {i for e in changes for i in self._index.get(e, ())}
        return fsum(
            self._weight(self.sets[i], owner, b, beta, changes) - self._weight(self.sets[i], owner, b, beta)
            for i in touched
        )

    def alive_count(self, owner, mode) -> int:
        b = _blocked(mode)
        return sum(1 for s in self.sets if all(owner[e] != b for e in s))


@dataclass(frozen=True, eq=False)
class BlockFamily(Family):
    """Members are the ``sizes[i]``-subsets of ``blocks[i]``.

    ``closed_form`` may replace the blocks with a size histogram when the
    blocks are too many to list; such a family only supports criterion sums.
    """

    blocks: tuple[tuple[int, ...], ...] | None
    sizes: tuple[int, ...] | None
    kind: str = "blocks"
    closed_form: Counter | None = field(default=None, repr=False)

    @cached_property
    def _index(self) -> dict[int, list[int]]:
        idx: dict[int, list[int]] = {}
        for i, blk in enumerate(self._blocks()):
            for e in blk:
                idx.setdefault(e, []).append(i)
        return idx

    def _blocks(self):
        if self.blocks is None:
            raise FamilyTooLarge(f"{self.kind}: blocks not materialised (closed form only)")
        return self.blocks

    def member_sizes(self) -> Counter:
        if self.closed_form is not None:
            return Counter(self.closed_form)
        out: Counter = Counter()
        for blk, s in zip(self._blocks(), self.sizes):
            if s <= len(blk):
                out[s] += comb(len(blk), s)
        return out

    def members(self, budget: int = MEMBER_BUDGET) -> list[frozenset[int]]:
        total = sum(self.member_sizes().values())
        if total > budget:
            raise FamilyTooLarge(f"{self.kind}: {total} members exceeds budget {budget}")
        seen: dict[frozenset[int], None] = {}
        for blk, s in zip(self._blocks(), self.sizes):
            for sub in combinations(blk, s):
                seen[frozenset(sub)] = None
        return list(seen)

    def any_contained(self, edges) -> bool:
        es = set(edges)
        return any(sum(1 for e in blk if e in es) >= s for blk, s in zip(self._blocks(), self.sizes))

    def all_hit(self, edges) -> bool:
        # every s-subset of a block is hit iff fewer than s block edges avoid the set
        es = set(edges)
        return all(sum(1 for e in blk if e not in es) < s for blk, s in zip(self._blocks(), self.sizes))

    @staticmethod
    def _block_weight(counts: Counter, s: int, mode: str, beta: float) -> float:
        # surviving members: j free edges plus s-j edges owned by the non-blocking side
        other = counts[CLIENT] if mode == "avoid" else counts[WAITER]
        f = counts[FREE]
        return fsum(comb(f, j) * comb(other, s - j) * beta**j for j in range(max(0, s - other), min(f, s) + 1))

    def _counts(self, i: int, owner, changes=None) -> Counter:
        c: Counter = Counter()
        for e in self.blocks[i]:
            c[changes.get(e, owner[e]) if changes else owner[e]] += 1
        return c

    def potential(self, owner, mode, beta) -> float:
        _blocked(mode)
        return fsum(self._block_weight(self._counts(i, owner), s, mode, beta) for i, s in enumerate(self.sizes))

    def potential_delta(self, owner, changes, mode, beta) -> float:
        _blocked(mode)
        touched = sorted({i for e in changes for i in self._index.get(e, ())})
        return fsum(
            self._block_weight(self._counts(i, owner, changes), self.sizes[i], mode, beta)
            - self._block_weight(self._counts(i, owner), self.sizes[i], mode, beta)
            for i in touched
        )

    def alive_count(self, owner, mode) -> int:
        return round(
            sum(self._block_weight(self._counts(i, owner), s, mode, 1.0) for i, s in enumerate(self.sizes))
        )


def minimal_sets(sets: Iterable[int]) -> list[int]:
    """Inclusion-minimal members of a collection of bitmasks."""
    out: list[int] = []
    for s in sorted(set(sets), key=lambda x: (x.bit_count(), x)):
        if not any(t & s == t for t in out):
            out.append(s)
    return out


def exact_criterion(sizes: Counter, base: Fraction) -> Fraction:
    """Exact ``sum count * base**(-size)`` for rational bases."""
    return sum((Fraction(c) / base**s for s, c in sizes.items()), Fraction(0))
