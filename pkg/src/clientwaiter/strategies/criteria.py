"""Parameter sets, winning-set families and potential criteria.

Each family is a :class:`BlockFamily`: its minimal members are the
``s``-subsets of certain edge blocks (vertex-set spans, cuts, out-edge
stars).  Families that are too large to list keep only a size histogram,
which is enough for the criterion sums.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil, comb, exp, floor, log

from ..families import MEMBER_BUDGET, BlockFamily, Family, FamilyTooLarge, exact_criterion
from ..graph import Graph, MaryTree

BLOCK_BUDGET = 200_000


class InvalidParameters(ValueError):
    pass


@dataclass(frozen=True)
class StrategyParams:
    """Named constants of the Client strategies, with their constraints.

    Use the ``for_*`` constructors to get derived defaults; ``problems()``
    lists violated constraints and construction raises on any of them.
    """

    q: int = 1
    eps: float | None = None
    delta: float | None = None
    delta1: float | None = None
    delta2: float | None = None
    theta: float | None = None
    gamma: float | None = None
    d: float | None = None
    k: int | None = None
    m: int | None = None
    checks: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        bad = self.problems()
        if bad:
            raise InvalidParameters("; ".join(bad))

    def problems(self) -> list[str]:
        out = []
        if self.q < 1:
            out.append("q must be positive")
        for name in ("eps", "delta", "delta1", "delta2", "theta", "gamma", "d"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                out.append(f"{name} must be positive")
        if "component" in self.checks:
            if not 0 < self.eps < 1:
                out.append("eps must lie in (0, 1)")
            elif abs(self.delta - self.eps / (1 - self.eps)) > 1e-12:
                out.append("delta != eps/(1-eps)")
            elif abs(self.theta - exp(-2.5 / self.delta - 1)) > 1e-15:
                out.append("theta != exp(-2.5/delta - 1)")
        if "path" in self.checks:
            if not self.delta1 > self.delta2:
                out.append("need delta1 > delta2")
            if abs(self.delta1 - exp(-3 / self.eps - 1)) > 1e-15:
                out.append("delta1 != exp(-3/eps - 1)")
        if "regular_cut" in self.checks:
            dd = self.d
            if not dd < 1 / (self.q + 1):
                out.append("need d < 1/(q+1)")
            elif not dd / (0.5 - dd) * (1 + log(2) - log(dd)) < 1 / (self.q + 1):
                out.append("need d/(1/2-d) (1 + ln 2 - ln d) < 1/(q+1)")
        if "tree" in self.checks and self.m != (self.k * (self.q + 1)) ** 2:
            out.append("m != (k(q+1))^2")
        return out

    @classmethod
    def for_component(cls, eps: float, q: int = 1) -> "StrategyParams":
        delta = eps / (1 - eps)
        return cls(q=q, eps=eps, delta=delta, theta=exp(-2.5 / delta - 1), checks=("component",))

    @classmethod
    def for_path(cls, eps: float, q: int = 1) -> "StrategyParams":
        d1 = exp(-3 / eps - 1)
        d2 = d1 * d1
        return cls(q=q, eps=eps, delta1=d1, delta2=d2, gamma=(eps * d2) ** 2, checks=("path",))

    @classmethod
    def for_cut_path(cls, eps: float, q: int = 1) -> "StrategyParams":
        """Disjoint-cut family: ``delta = 2 eps ln(1/eps)``."""
        return cls(q=q, eps=eps, delta=2 * eps * log(1 / eps))

    @classmethod
    def for_regular_cut(cls, q: int, k: int, eps: float, d: float | None = None) -> "StrategyParams":
        if d is None:
            d = largest_cut_density(q)
        return cls(q=q, eps=eps, d=d, k=k, checks=("regular_cut",))

    @classmethod
    def for_tree(cls, k: int, q: int = 1) -> "StrategyParams":
        return cls(q=q, k=k, m=(k * (q + 1)) ** 2, checks=("tree",))

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None and k != "checks"}


def largest_cut_density(q: int, shrink: float = 0.999) -> float:
    """A density ``d`` meeting both cut-quota constraints (bisection on the
    second, which is increasing in ``d`` on ``(0, 1/(q+1))``)."""
    target = 1 / (q + 1)

    def lhs(x):
        return x / (0.5 - x) * (1 + log(2) - log(x))

    lo, hi = 1e-12, min(target, 0.49)
    for _ in range(200):
        mid = (lo + hi) / 2
        if lhs(mid) < target:
            lo = mid
        else:
            hi = mid
    return lo * shrink


# -- block enumeration -----------------------------------------------------------


def _span_blocks(board: Graph, max_vertices: int, size_of, min_vertices: int = 2):
    """(edge block, size) for every vertex set up to ``max_vertices``."""
    verts = board.non_isolated()
    blocks, sizes = [], []
    count = 0
    for i in range(min_vertices, max_vertices + 1):
        s = size_of(i)
        if s > comb(i, 2):
            continue  # no i-vertex graph has that many edges
        for vs in combinations(verts, i):
            count += 1
            if count > BLOCK_BUDGET:
                raise FamilyTooLarge(f"more than {BLOCK_BUDGET} vertex sets")
            mask = sum(1 << v for v in vs)
            blk = tuple(board.edges_within(mask))
            if len(blk) >= s:
                blocks.append(blk)
                sizes.append(s)
    return blocks, sizes


def _cut_blocks(board: Graph, max_side: int, size_of, min_side: int = 1):
    verts = board.non_isolated()
    allmask = sum(1 << v for v in verts)
    blocks, sizes = [], []
    count = 0
    for i in range(min_side, max_side + 1):
        for vs in combinations(verts, i):
            count += 1
            if count > BLOCK_BUDGET:
                raise FamilyTooLarge(f"more than {BLOCK_BUDGET} vertex sets")
            mask = sum(1 << v for v in vs)
            blk = tuple(board.edges_between(mask, allmask & ~mask))
            s = size_of(i)
            if len(blk) >= s:
                blocks.append(blk)
                sizes.append(s)
    return blocks, sizes


def _pair_blocks(board: Graph, t: int, size_of):
    """Blocks E(A, B) over unordered pairs of disjoint t-sets."""
    verts = board.non_isolated()
    blocks, sizes = [], []
    count = 0
    for a in combinations(verts, t):
        amask = sum(1 << v for v in a)
        rest = [v for v in verts if v not in a]
        for b in combinations(rest, t):
            if b < a:
                continue  # each unordered pair once
            count += 1
            if count > BLOCK_BUDGET:
                raise FamilyTooLarge(f"more than {BLOCK_BUDGET} set pairs")
            bmask = sum(1 << v for v in b)
            blk = tuple(board.edges_between(amask, bmask))
            blocks.append(blk)
            sizes.append(size_of(len(blk)))
    return blocks, sizes


def _is_complete(board: Graph) -> bool:
    v = len(board.non_isolated())
    return board.e == v * (v - 1) // 2


def build_family(kind: str, board: Graph | MaryTree, params: StrategyParams, q: int | None = None) -> BlockFamily:
    """Family of minimal winning sets of the given kind.

    sparse_component
        ``ceil((1+delta) i)`` edges inside some ``i``-vertex set, ``i <= theta n``.
    path_triple
        the union of two such span families (``delta1``/``1+eps`` and
        ``delta2``/``1+eps/2``) and the cut family: ``ceil(eps delta2 n / 2)``
        edges leaving a set of at most ``gamma n`` vertices.
    disjoint_cut
        all of ``E(A, B)`` for disjoint ``A``, ``B`` of size ``delta n``.
    regular_cut
        ``e(U1, U2) - floor(d eps^2 n^2 / k^2 * p)`` edges of ``E(U1, U2)``
        for disjoint ``U1``, ``U2`` of size ``eps n / k`` (``p`` is the
        board's edge density).
    tree_outedges
        ``m - k + 1`` of the child edges of an internal tree vertex.
    """
    q = params.q if q is None else q
    if kind == "tree_outedges":
        if not isinstance(board, MaryTree):
            raise TypeError("tree_outedges needs a MaryTree board")
        s = board.m - params.k + 1
        if s < 1:
            raise InvalidParameters("m - k + 1 must be positive")
        hist = Counter({s: len(board.internal) * comb(board.m, s)})
        if len(board.internal) > BLOCK_BUDGET:
            return BlockFamily(None, None, kind, hist)
        blocks = tuple(tuple(board.out_edges[x]) for x in board.internal)
        return BlockFamily(blocks, (s,) * len(blocks), kind)
    g = board.graph if isinstance(board, MaryTree) else board
    n = len(g.non_isolated())
    if kind == "sparse_component":
        lim = floor(params.theta * n + 1e-9)
        blocks, sizes = _span_blocks(g, lim, lambda i: ceil((1 + params.delta) * i - 1e-12))
        return BlockFamily(tuple(blocks), tuple(sizes), kind)
    if kind == "path_triple":
        b1, s1 = _span_blocks(g, floor(params.delta1 * n + 1e-9), lambda i: ceil((1 + params.eps) * i - 1e-12))
        b2, s2 = _span_blocks(g, floor(params.delta2 * n + 1e-9), lambda i: ceil((1 + params.eps / 2) * i - 1e-12))
        need = ceil(params.eps * params.delta2 * n / 2 - 1e-12)
        b3, s3 = _cut_blocks(g, floor(params.gamma * n + 1e-9), lambda i: need)
        return BlockFamily(tuple(b1 + b2 + b3), tuple(s1 + s2 + s3), kind)
    if kind == "disjoint_cut":
        t = max(1, round(params.delta * n))
        if 2 * t > n:
            raise InvalidParameters("two disjoint sets of size delta n do not fit")
        if _is_complete(g):
            pairs = comb(n, t) * comb(n - t, t) // 2
            if pairs > BLOCK_BUDGET:
                return BlockFamily(None, None, kind, Counter({t * t: pairs}))
        blocks, sizes = _pair_blocks(g, t, lambda e: e)
        return BlockFamily(tuple(blocks), tuple(sizes), kind)
    if kind == "regular_cut":
        k = params.k
        t = max(1, round(params.eps * n / k))
        if 2 * t > n:
            raise InvalidParameters("two disjoint sets of size eps n / k do not fit")
        p = g.e / comb(n, 2) if n >= 2 else 0.0
        slack = floor(params.d * p * (params.eps * n / k) ** 2 + 1e-9)
        if _is_complete(g):
            pairs = comb(n, t) * comb(n - t, t) // 2
            if pairs > BLOCK_BUDGET:
                return BlockFamily(None, None, kind, Counter({max(0, t * t - slack): pairs}))
        blocks, sizes = _pair_blocks(g, t, lambda e: max(0, e - slack))
        return BlockFamily(tuple(blocks), tuple(sizes), kind)
    raise ValueError(f"unknown family kind {kind!r}")


# -- criteria -----------------------------------------------------------------------


@dataclass(frozen=True)
class Criteria:
    phi_ES: float  # sum (q+1)^-|A|
    phi_T: float  # sum exp(-|A|/(q+1))
    phi_W: float  # sum 2^-|A|
    members: int

    def avoid_holds(self) -> bool:
        return self.phi_ES < 1

    def random_subset_holds(self) -> bool:
        return self.phi_ES < 0.5

    def transversal_holds(self) -> bool:
        return self.phi_T < 1

    def waiter_holds(self) -> bool:
        return self.phi_W < 0.5


def evaluate_criteria(family: Family, q: int) -> Criteria:
    """All three potential sums, from the family's size histogram."""
    sizes = family.member_sizes()
    return Criteria(
        family.criterion_sum(1 / (q + 1)),
        family.criterion_sum(exp(-1 / (q + 1))),
        family.criterion_sum(0.5),
        sum(sizes.values()),
    )


def exact_es(family: Family, q: int) -> Fraction:
    return exact_criterion(family.member_sizes(), Fraction(q + 1))


def tree_condition(k: int, q: int, m: int | None = None) -> tuple[float, float]:
    """Both sides of ``(k-1)(q+1)(1 + 2 ln m - ln(k-1)) < m - k``."""
    m = (k * (q + 1)) ** 2 if m is None else m
    return (k - 1) * (q + 1) * (1 + 2 * log(m) - log(k - 1)), float(m - k)


def tree_bound(k: int, q: int, m: int | None = None) -> float:
    """The closed-form upper bound ``(e m^2/(k-1))^(k-1) exp(-(m-k)/(q+1))``."""
    m = (k * (q + 1)) ** 2 if m is None else m
    return exp((k - 1) * (1 + 2 * log(m) - log(k - 1)) - (m - k) / (q + 1))


def path_pairs_family(tree: Graph, k: int) -> BlockFamily:
    """Edge sets of all ``k``-edge paths in a tree, one member per path."""
    from ..structure import find_copies
    from ..graph import make_path

    copies = find_copies(tree, make_path(k + 1))
    blocks = tuple(tuple(sorted(c)) for c in copies)
    return BlockFamily(blocks, tuple(len(b) for b in blocks), "tree_paths")


__all__ = [
    "StrategyParams",
    "InvalidParameters",
    "build_family",
    "evaluate_criteria",
    "Criteria",
    "exact_es",
    "tree_condition",
    "tree_bound",
    "largest_cut_density",
    "path_pairs_family",
    "MEMBER_BUDGET",
]
