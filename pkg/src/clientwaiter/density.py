"""Exact density measures: d, d2, m, m2, m', m'', arboricity.

Every maximum here is attained on an induced subgraph, so it is enough to
know, for each vertex count ``k``, the largest number of edges spanned by
``k`` vertices.  For small graphs that table is built exhaustively with a
vectorised subset DP; for larger graphs ``m`` and ``ar`` fall back to a
parametric max-flow (Goldberg's construction iterated Dinkelbach-style),
which is exact as well.  All results are :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

import numpy as np

from .graph import Graph

EXHAUSTIVE_LIMIT = 18
FLOW_SWITCH = 20


class SizeLimitExceeded(ValueError):
    pass


@dataclass(frozen=True)
class DensityReport:
    d: Fraction
    d2: Fraction
    m: Fraction
    m2: Fraction | None
    m_prime: Fraction | None
    m_dprime: Fraction | None
    ar: Fraction

    def as_dict(self) -> dict[str, str]:
        return {k: ("" if v is None else str(v)) for k, v in self.__dict__.items()}


def _subset_edge_counts(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Edge count and size of every vertex subset, indexed by bitmask."""
    n = g.n
    ecount = np.zeros(1 << n, dtype=np.int32)
    size = np.zeros(1 << n, dtype=np.int8)
    low_nbrs = [[u for u in range(i) if g.nbr_mask[i] >> u & 1] for i in range(n)]
    for i in range(n):
        half = 1 << i
        r = np.arange(half, dtype=np.int64)
        add = np.zeros(half, dtype=np.int32)
        for u in low_nbrs[i]:
            add += ((r >> u) & 1).astype(np.int32)
        ecount[half : 2 * half] = ecount[:half] + add
        size[half : 2 * half] = size[:half] + 1
    return ecount, size


def max_edges_by_size(g: Graph, limit: int = FLOW_SWITCH) -> list[int]:
    """``out[k]`` = max edges spanned by ``k`` vertices, ``k = 0..n``.

    Isolated vertices are stripped before enumeration; ``limit`` bounds the
    number of remaining vertices.
    """
    core, _ = g.compact()
    if core.n > limit:
        raise SizeLimitExceeded(f"{core.n} non-isolated vertices exceeds exhaustive limit {limit}")
    out = [0] * (g.n + 1)
    if core.n:
        ecount, size = _subset_edge_counts(core)
        best = np.full(core.n + 1, -1, dtype=np.int64)
        np.maximum.at(best, size.astype(np.int64), ecount.astype(np.int64))
        out[: core.n + 1] = [int(x) for x in best]
    for k in range(core.n + 1, g.n + 1):
        out[k] = g.e
    return out


def _best(table: list[int], lo: int, num_shift: int, den_shift: int) -> Fraction | None:
    vals = [Fraction(table[k] + num_shift, k + den_shift) for k in range(lo, len(table))]
    return max(vals) if vals else None


def d(g: Graph) -> Fraction:
    return Fraction(g.e, g.n) if g.n else Fraction(0)


def d2(g: Graph) -> Fraction:
    return Fraction(g.e - 1, g.n - 2) if g.n > 2 else Fraction(0)


def max_density(g: Graph) -> Fraction:
    """m(G) = max e'/v' over subgraphs."""
    if g.e == 0:
        return Fraction(0)
    core, _ = g.compact()
    if core.n <= FLOW_SWITCH:
        return _best(max_edges_by_size(core), 1, 0, 0)
    return _flow_max_density(core)


def arboricity(g: Graph) -> Fraction:
    """ar(G) = max e'/(v'-1) over subgraphs with at least two vertices."""
    if g.e == 0:
        return Fraction(0)
    core, _ = g.compact()
    if core.n <= FLOW_SWITCH:
        return _best(max_edges_by_size(core), 2, 0, -1)
    return _flow_arboricity(core)


def density_report(g: Graph, limit: int = EXHAUSTIVE_LIMIT, partial: bool = False) -> DensityReport:
    """All measures at once.

    ``m2``, ``m_prime`` and ``m_dprime`` need the exhaustive table; past
    ``limit`` non-isolated vertices they raise unless ``partial`` is set, in
    which case they are reported as ``None``.
    """
    core, _ = g.compact()
    if core.n <= limit:
        table = max_edges_by_size(g, limit=max(limit, FLOW_SWITCH))
        m = _best(table, 1, 0, 0) if g.n else Fraction(0)
        m2 = max(Fraction(0), _best(table, 3, -1, -2) or Fraction(0))
        mp = _best(table, 1, -1, 0) if g.n else None
        mdp = _best(table, 3, 1, -2) or Fraction(0)
        ar = max(Fraction(0), _best(table, 2, 0, -1) or Fraction(0))
        return DensityReport(d(g), d2(g), m, m2, mp, mdp, ar)
    if not partial:
        raise SizeLimitExceeded(f"{core.n} non-isolated vertices exceeds exhaustive limit {limit}")
    return DensityReport(d(g), d2(g), max_density(g), None, None, None, arboricity(g))


def m2(g: Graph) -> Fraction:
    return density_report(g).m2


def is_balanced(g: Graph) -> bool:
    return d(g) == max_density(g)


def is_strictly_balanced(g: Graph) -> bool:
    table = max_edges_by_size(g, limit=EXHAUSTIVE_LIMIT)
    m = d(g)
    if m != _best(table, 1, 0, 0):
        return False
    return all(Fraction(table[k], k) < m for k in range(1, g.n))


def is_2balanced(g: Graph) -> bool:
    return d2(g) == density_report(g).m2


def is_strictly_2balanced(g: Graph) -> bool:
    """Every proper subgraph has 2-density strictly below m2(G)."""
    rep = density_report(g)
    if d2(g) != rep.m2:
        return False
    table = max_edges_by_size(g, limit=EXHAUSTIVE_LIMIT)
    for k in range(0, g.n):
        val = Fraction(table[k] - 1, k - 2) if k > 2 else Fraction(0)
        if val >= rep.m2:
            return False
    # same vertex set, one edge fewer
    return g.e == 0 or (g.n <= 2) or Fraction(g.e - 2, g.n - 2) < rep.m2


# -- flow based exact maxima ---------------------------------------------


def _closure_cut(g: Graph, a: int, b: int, forced: int | None = None) -> tuple[int, set[int]]:
    """Maximise ``b*e(S) - a*|S \\ {forced}|``; return (value, S)."""
    import networkx as nx

    net = nx.DiGraph()
    for i, (u, v) in enumerate(g.edges):
        node = ("e", i)
        net.add_edge("s", node, capacity=b)
        net.add_edge(node, ("v", u))
        net.add_edge(node, ("v", v))
    for v in range(g.n):
        if v == forced:
            net.add_edge("s", ("v", v))
        else:
            net.add_edge(("v", v), "t", capacity=a)
    net.add_node("t")
    cut, (src, _) = nx.minimum_cut(net, "s", "t")
    verts = {x[1] for x in src if isinstance(x, tuple) and x[0] == "v"}
    if forced is not None:
        verts.add(forced)
    value = b * g.e - cut
    return value, verts


def _flow_max_density(g: Graph) -> Fraction:
    best = Fraction(g.e, g.n)
    while True:
        value, verts = _closure_cut(g, best.numerator, best.denominator)
        if value <= 0 or not verts:
            return best
        mask = sum(1 << v for v in verts)
        cand = Fraction(len(g.edges_within(mask)), len(verts))
        if cand <= best:
            return best
        best = cand


def _flow_arboricity(g: Graph) -> Fraction:
    best = Fraction(g.e, g.n - 1)
    improved = True
    while improved:
        improved = False
        for r in range(g.n):
            value, verts = _closure_cut(g, best.numerator, best.denominator, forced=r)
            if value > 0 and len(verts) >= 2:
                mask = sum(1 << v for v in verts)
                cand = Fraction(len(g.edges_within(mask)), len(verts) - 1)
                if cand > best:
                    best = cand
                    improved = True
                    break
    return best


def ceil_fraction(x: Fraction) -> int:
    return ceil(x)
