"""Longest paths, DFS path certification and k-set expansion checks."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb, floor

import numpy as np

from .graph import Graph, bits

EXACT_DP_LIMIT = 20
SUBSET_BUDGET = 200_000
KSET_PAIR_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PathResult:
    length: int  # edges
    path: tuple[int, ...]
    exact: bool


def is_path(g: Graph, path) -> bool:
    if len(set(path)) != len(path):
        return False
    return all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


def _tree_longest(g: Graph, comp: list[int]) -> tuple[int, ...]:
    def farthest(src):
        prev = {src: -1}
        order = [src]
        for x in order:
            for y in g.neighbors(x):
                if y not in prev:
                    prev[y] = x
                    order.append(y)
        end = order[-1]
        path = [end]
        while prev[path[-1]] != -1:
            path.append(prev[path[-1]])
        return path

    a = farthest(comp[0])[0]
    return tuple(farthest(a))


def _dp_longest(g: Graph, comp: list[int]) -> tuple[int, ...]:
    """Held-Karp style DP over (vertex set, endpoint)."""
    k = len(comp)
    pos = {v: i for i, v in enumerate(comp)}
    nb = [sum(1 << pos[u] for u in g.neighbors(v)) for v in comp]
    reach = [0] * (1 << k)  # bitmask of possible endpoints of a path on exactly this set
    for i in range(k):
        reach[1 << i] = 1 << i
    best_mask, best_end = 1, 0
    for mask in range(1, 1 << k):
        ends = reach[mask]
        if not ends:
            continue
        if mask.bit_count() > best_mask.bit_count():
            best_mask, best_end = mask, (ends & -ends).bit_length() - 1
        for e in bits(ends):
            ext = nb[e] & ~mask
            for y in bits(ext):
                reach[mask | 1 << y] |= 1 << y
    # walk back
    path = [best_end]
    mask = best_mask
    while mask.bit_count() > 1:
        cur = path[-1]
        rest = mask & ~(1 << cur)
        for y in bits(nb[cur] & rest):
            if reach[rest] >> y & 1:
                path.append(y)
                mask = rest
                break
        else:  # pragma: no cover - DP table is consistent by construction
            raise AssertionError("path reconstruction failed")
    return tuple(comp[i] for i in path)


def _search_longest(g: Graph, comp: list[int], node_budget: int) -> tuple[tuple[int, ...], bool]:
    best: list[int] = []
    nodes = 0
    exhausted = True
    nb = g.nbr_mask
    for s in comp:
        stack = [(s, 1 << s, [s])]
        while stack:
            v, used, path = stack.pop()
            nodes += 1
            if len(path) > len(best):
                best = path
                if len(best) == len(comp):
                    return tuple(best), True
            if nodes > node_budget:
                exhausted = False
                break
            for y in bits(nb[v] & ~used):
                stack.append((y, used | 1 << y, path + [y]))
        if not exhausted:
            break
    return tuple(best), exhausted


def longest_path(g: Graph, node_budget: int = 2_000_000, require_exact: bool = False) -> PathResult:
    """Longest simple path (in edges).

    Trees use the double-sweep diameter, components up to
    ``EXACT_DP_LIMIT`` vertices a subset DP; larger cyclic components fall
    back to a budgeted search whose result is a certified lower bound.
    """
    best: tuple[int, ...] = (0,) if g.n else ()
    exact = True
    for comp in g.components():
        if len(comp) <= len(best):
            continue
        ce = sum(g.degree(v) for v in comp) // 2
        if ce == len(comp) - 1:
            p = _tree_longest(g, comp)
        elif len(comp) <= EXACT_DP_LIMIT:
            p = _dp_longest(g, comp)
        else:
            p, ok = _search_longest(g, comp, node_budget)
            if not ok:
                if require_exact:
                    raise BudgetExceeded(f"component with {len(comp)} vertices exceeds search budget")
                exact = False
        if len(p) > len(best):
            best = p
    return PathResult(max(len(best) - 1, 0), best, exact)


# -- DFS certification of a long path -------------------------------------


class ConditionFailure(ValueError):
    def __init__(self, prop: int, witness: tuple[int, ...], detail: str):
        super().__init__(f"property {prop} fails: {detail} (witness {witness})")
        self.prop = prop
        self.witness = witness


@dataclass(frozen=True)
class CertifiedPath:
    path: tuple[int, ...]
    certified: bool  # False when some property was only sampled
    target: float  # gamma * n

    @property
    def length(self) -> int:
        return len(self.path) - 1


def _subsets_up_to(n: int, size: int):
    for k in range(1, size + 1):
        yield from combinations(range(n), k)


def _subset_count(n: int, size: int) -> int:
    return sum(comb(n, k) for k in range(1, size + 1))


def certified_long_path(
    g: Graph,
    eps: float,
    delta1: float,
    delta2: float,
    gamma: float,
    budget: int = SUBSET_BUDGET,
    samples: int = 20_000,
    seed: int = 0,
) -> CertifiedPath:
    """Check the four sparse-expansion properties, then extract a DFS path.

    Properties, for ``n = g.n``:
    1. ``e >= (1+eps) n``;
    2. ``|S| <= delta1 n`` implies ``e(S) < (1+eps)|S|``;
    3. ``|S| <= delta2 n`` implies ``e(S) < (1+eps/2)|S|``;
    4. ``|S| <= gamma n`` implies ``e(S, V-S) < eps*delta2*n/2``.
    Subset properties are exhaustive while the subset count is within
    ``budget``; beyond it random subsets are tried and the result is marked
    uncertified.
    """
    if not delta1 > delta2 > 0 or eps <= 0 or gamma <= 0:
        raise ValueError("need eps, gamma > 0 and delta1 > delta2 > 0")
    n = g.n
    if g.e < (1 + eps) * n:
        raise ConditionFailure(1, (), f"e={g.e} < (1+eps)n={(1 + eps) * n:g}")
    nb = g.nbr_mask
    cut_bound = eps * delta2 * n / 2

    def inside(s):
        mask = sum(1 << v for v in s)
        return sum((nb[v] & mask).bit_count() for v in s) // 2, mask

    checks = [
        (2, floor(delta1 * n), lambda s, e_in, cut: e_in >= (1 + eps) * len(s)),
        (3, floor(delta2 * n), lambda s, e_in, cut: e_in >= (1 + eps / 2) * len(s)),
        (4, floor(gamma * n), lambda s, e_in, cut: cut >= cut_bound),
    ]
    certified = True
    rng = np.random.default_rng(seed)
    for prop, size, bad in checks:
        if size < 1:
            continue
        if _subset_count(n, size) <= budget:
            candidates = _subsets_up_to(n, size)
        else:
            certified = False
            candidates = (
                tuple(sorted(rng.choice(n, size=int(rng.integers(1, size + 1)), replace=False).tolist()))
                for _ in range(samples)
            )
        for s in candidates:
            e_in, mask = inside(s)
            cut = sum(g.degree(v) for v in s) - 2 * e_in
            if bad(s, e_in, cut):
                raise ConditionFailure(prop, tuple(s), f"|S|={len(s)}, e(S)={e_in}, e(S,V-S)={cut}")

    path = _dfs_longest_stack(g)
    if not is_path(g, path):  # pragma: no cover - DFS stack is a path by construction
        raise AssertionError("DFS stack is not a path")
    # |U| > gamma n vertices gives at least floor(gamma n) edges
    if certified and len(path) - 1 < floor(gamma * n):
        raise AssertionError("certified instance produced a short DFS path")
    return CertifiedPath(path, certified, gamma * n)


def _dfs_longest_stack(g: Graph) -> tuple[int, ...]:
    """Run DFS (vertices in id order) and return the longest stack seen."""
    visited = [False] * g.n
    best: list[int] = []
    nbrs = [g.neighbors(v) for v in range(g.n)]
    for root in range(g.n):
        if visited[root]:
            continue
        visited[root] = True
        stack = [root]
        it = [0]
        while stack:
            if len(stack) > len(best):
                best = list(stack)
            v = stack[-1]
            i = it[-1]
            while i < len(nbrs[v]) and visited[nbrs[v][i]]:
                i += 1
            if i == len(nbrs[v]):
                stack.pop()
                it.pop()
                continue
            it[-1] = i + 1
            y = nbrs[v][i]
            visited[y] = True
            stack.append(y)
            it.append(0)
    return tuple(best)


# -- k-set expansion ----------------------------------------------------------


@dataclass(frozen=True)
class KSetResult:
    passed: bool
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None
    exact: bool


def ksets_expansion_check(
    g: Graph, k: int, budget: int = KSET_PAIR_BUDGET, sampled: bool = False, samples: int = 100_000, seed: int = 0
) -> KSetResult:
    """Does every pair of disjoint ``k``-sets have an edge between them?

    A failing set ``A`` is one whose non-neighbourhood outside ``A`` still
    has ``k`` vertices; those form ``B``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = g.n
    if 2 * k > n:
        return KSetResult(True, None, True)
    full = (1 << n) - 1
    nb = g.nbr_mask

    def test(a):
        amask = sum(1 << v for v in a)
        reach = 0
        for v in a:
            reach |= nb[v]
        far = full & ~amask & ~reach
        if far.bit_count() >= k:
            return (tuple(a), tuple(bits(far)[:k]))
        return None

    if comb(n, k) ** 2 <= budget:
        for a in combinations(range(n), k):
            w = test(a)
            if w:
                return KSetResult(False, w, True)
        return KSetResult(True, None, True)
    if not sampled:
        raise BudgetExceeded(f"C({n},{k})^2 exceeds {budget}; use sampled mode")
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        a = sorted(rng.choice(n, size=k, replace=False).tolist())
        w = test(a)
        if w:
            return KSetResult(False, w, False)
    return KSetResult(True, None, False)
