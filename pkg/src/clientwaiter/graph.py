"""Undirected simple graphs with dense, stable edge identifiers.

Vertices are ``0..n-1``; edges are stored as sorted pairs ``(u, v)`` with
``u < v`` and identified by their position in :attr:`Graph.edges`.  Edge
subgraphs get fresh dense ids and remember the ids they came from in
:attr:`Graph.origin`, so results computed on a piece can be mapped back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MAX_VERTICES = 1_000_000


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    origin: tuple[int, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("negative vertex count")
        seen = set()
        norm = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise GraphError(f"parallel edge ({u}, {v})")
            seen.add((u, v))
            norm.append((u, v))
        object.__setattr__(self, "edges", tuple(norm))
        if self.origin is not None and len(self.origin) != len(norm):
            raise GraphError("origin map length differs from edge count")

    # -- basic queries -------------------------------------------------

    @property
    def e(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {uv: i for i, uv in enumerate(self.edges)}

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for i, (u, v) in enumerate(self.edges):
            inc[u].append(i)
            inc[v].append(i)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def nbr_mask(self) -> tuple[int, ...]:
        """Neighbourhood of every vertex as an int bitmask."""
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    def neighbors(self, v: int) -> list[int]:
        m = self.nbr_mask[v]
        return [u for u in range(self.n) if m >> u & 1]

    def degree(self, v: int) -> int:
        return len(self.incident[v])

    def degrees(self) -> list[int]:
        return [len(x) for x in self.incident]

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def edge_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return self.edge_index[(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.edge_index

    def other(self, eid: int, v: int) -> int:
        a, b = self.edges[eid]
        return b if a == v else a

    def edges_within(self, vmask: int) -> list[int]:
        """Ids of edges with both endpoints in the vertex bitmask."""
        return [i for i, (u, v) in enumerate(self.edges) if vmask >> u & 1 and vmask >> v & 1]

    def edges_between(self, amask: int, bmask: int) -> list[int]:
        """Ids of edges meeting both vertex sets (E(A, B) in the usual sense)."""
        out = []
        for i, (u, v) in enumerate(self.edges):
            ua, ub = amask >> u & 1, bmask >> u & 1
            va, vb = amask >> v & 1, bmask >> v & 1
            if (ua and vb) or (ub and va):
                out.append(i)
        return out

    def non_isolated(self) -> list[int]:
        return [v for v in range(self.n) if self.incident[v]]

    # -- derived graphs -------------------------------------------------

    def edge_subgraph(self, eids: Iterable[int]) -> "Graph":
        """Same vertex set, the given edges, renumbered densely."""
        ids = sorted(set(eids))
        root = self.origin
        origin = tuple(root[i] for i in ids) if root is not None else tuple(ids)
        return Graph(self.n, tuple(self.edges[i] for i in ids), origin)

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph relabelled to ``0..len(vertices)-1``."""
        pos = {v: i for i, v in enumerate(vertices)}
        ids = [i for i, (u, v) in enumerate(self.edges) if u in pos and v in pos]
        root = self.origin
        origin = tuple(root[i] for i in ids) if root is not None else tuple(ids)
        return Graph(len(vertices), tuple((pos[self.edges[i][0]], pos[self.edges[i][1]]) for i in ids), origin)

    def compact(self) -> tuple["Graph", list[int]]:
        """Drop isolated vertices; return the graph and new->old vertex map."""
        keep = self.non_isolated()
        return self.induced(keep), keep

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Vertex ``v`` becomes ``perm[v]``; edge ids are re-sorted."""
        return Graph(self.n, tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in self.edges)))

    def remove_vertex(self, v: int) -> "Graph":
        return self.edge_subgraph(i for i in range(self.e) if v not in self.edges[i])

    def components(self) -> list[list[int]]:
        """Connected components (vertex lists), isolated vertices included."""
        seen = [False] * self.n
        comps = []
        nb = self.nbr_mask
        for s in range(self.n):
            if seen[s]:
                continue
            comp, stack = [], [s]
            seen[s] = True
            while stack:
                x = stack.pop()
                comp.append(x)
                m = nb[x]
                while m:
                    low = m & -m
                    y = low.bit_length() - 1
                    m ^= low
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len([c for c in self.components()]) <= 1

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and set(self.edges) == set(other.edges)

    def __hash__(self):
        return hash((self.n, frozenset(self.edges)))

    def __repr__(self):
        return f"Graph(n={self.n}, e={self.e})"


# -- generators ---------------------------------------------------------


def _check_size(n: int) -> None:
    if n < 1:
        raise GraphError("need at least one vertex")
    if n > MAX_VERTICES:
        raise GraphError(f"vertex count {n} exceeds limit {MAX_VERTICES}")


def make_complete(n: int) -> Graph:
    _check_size(n)
    return Graph(n, tuple(combinations(range(n), 2)))


def make_empty(n: int) -> Graph:
    _check_size(n)
    return Graph(n, ())


def make_path(n: int) -> Graph:
    """Path on ``n`` vertices (``n - 1`` edges)."""
    _check_size(n)
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def make_cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)) + ((0, n - 1),))


def make_star(k: int) -> Graph:
    """Star with ``k`` edges, centre 0."""
    return Graph(k + 1, tuple((0, i) for i in range(1, k + 1)))


def make_gnp(n: int, p: float, seed: int | np.random.Generator | None = None) -> Graph:
    """Binomial random graph: every pair independently with probability ``p``."""
    _check_size(n)
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"p={p} outside [0, 1]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return Graph(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist())))


@dataclass(frozen=True)
class MaryTree:
    """Complete ``m``-ary tree of height ``k`` rooted at vertex 0.

    ``out_edges[x]`` lists the child edges of internal vertex ``x``.
    """

    graph: Graph
    m: int
    k: int
    internal: tuple[int, ...]
    out_edges: dict[int, tuple[int, ...]]
    depth: tuple[int, ...]


def make_mary_tree(m: int, k: int, max_vertices: int = 200_000) -> MaryTree:
    if m < 1 or k < 1:
        raise GraphError("m and k must be positive")
    count = k + 1 if m == 1 else (m ** (k + 1) - 1) // (m - 1)
    if count > max_vertices:
        raise GraphError(f"tree T({m},{k}) has {count} vertices, limit {max_vertices}")
    edges = []
    depth = [0]
    out: dict[int, list[int]] = {}
    frontier = [0]
    for level in range(1, k + 1):
        nxt = []
        for x in frontier:
            out[x] = []
            for _ in range(m):
                child = len(depth)
                depth.append(level)
                out[x].append(len(edges))
                edges.append((x, child))
                nxt.append(child)
        frontier = nxt
    g = Graph(len(depth), tuple(edges))
    return MaryTree(g, m, k, tuple(sorted(out)), {x: tuple(v) for x, v in out.items()}, tuple(depth))


_NAMED = re.compile(r"^(K|C|P|S|E)(\d+)(-e)?$")


def named_graph(name: str) -> Graph:
    """Parse short names: ``K6``, ``K5-e``, ``C4``, ``P4`` (4 vertices),
    ``S3`` (star with 3 edges), ``E5`` (edgeless), ``K1,3`` style bipartite."""
    s = name.strip()
    m = re.match(r"^K(\d+),(\d+)$", s)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        return Graph(a + b, tuple((i, a + j) for i in range(a) for j in range(b)))
    m = _NAMED.match(s)
    if not m:
        raise GraphError(f"unknown graph name {name!r}")
    kind, size, minus = m.group(1), int(m.group(2)), m.group(3)
    g = {"K": make_complete, "C": make_cycle, "P": make_path, "S": make_star, "E": make_empty}[kind](size)
    if minus:
        if g.e == 0:
            raise GraphError(f"{name}: no edge to remove")
        g = g.edge_subgraph(range(1, g.e))
        g = Graph(g.n, g.edges)
    return g


# -- file format ---------------------------------------------------------


def read_graph(path: str | Path) -> Graph:
    """Read ``n m`` then ``m`` lines ``u v`` (0-based)."""
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphError(f"{path}: empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphError(f"{path}: header must be 'n m'")
    n, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise GraphError(f"{path}: header says {m} edges, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"{path}: bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph(n, tuple(edges))


def format_graph(g: Graph) -> str:
    return "\n".join([f"{g.n} {g.e}"] + [f"{u} {v}" for u, v in g.edges]) + "\n"


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


def popcount(x: int) -> int:
    return x.bit_count()


def bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out
