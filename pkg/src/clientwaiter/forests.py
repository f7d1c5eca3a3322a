"""Forest decompositions and bounded out-degree orientations."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import ceil

from .density import max_density
from .graph import Graph


class MatchingFailed(RuntimeError):
    """No orientation with the requested out-degree bound exists."""


@dataclass(frozen=True)
class Orientation:
    source: tuple[int, ...]  # source vertex of each edge id
    max_outdeg: int

    def out_edges(self, g: Graph) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(g.n)]
        for eid, s in enumerate(self.source):
            out[s].append(eid)
        return out

    def outdegrees(self, n: int) -> list[int]:
        deg = [0] * n
        for s in self.source:
            deg[s] += 1
        return deg


@dataclass(frozen=True)
class ForestDecomposition:
    assignment: tuple[int, ...]  # forest index of each edge id
    f: int

    def forests(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.f)]
        for eid, i in enumerate(self.assignment):
            out[i].append(eid)
        return out


def is_forest(g: Graph, eids) -> bool:
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in eids:
        a, b = (find(x) for x in g.edges[i])
        if a == b:
            return False
        parent[a] = b
    return True


def hall_orientation(g: Graph, k: int) -> Orientation:
    """Orient every edge so each vertex is the source of at most ``k`` edges.

    Edges are matched to ``k`` copies of their endpoints (augmenting paths);
    an edge matched to a copy of ``v`` is oriented out of ``v``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    load = [0] * g.n
    owner: list[int] = [-1] * g.e
    users: list[list[int]] = [[] for _ in range(g.n)]

    for start in range(g.e):
        # BFS over edges: an edge can move to its other endpoint if that one has room
        prev: dict[int, tuple[int, int]] = {start: (-1, -1)}
        queue = deque([start])
        found = None
        while queue and found is None:
            eid = queue.popleft()
            for v in g.edges[eid]:
                if v == owner[eid]:
                    continue
                if load[v] < k:
                    found = (eid, v)
                    break
                for other in users[v]:
                    if other not in prev:
                        prev[other] = (eid, v)
                        queue.append(other)
        if found is None:
            raise MatchingFailed(f"no orientation with out-degree <= {k} (m(G) > {k})")
        eid, v = found
        while eid != -1:
            old = owner[eid]
            if old != -1:
                users[old].remove(eid)
                load[old] -= 1
            owner[eid] = v
            users[v].append(eid)
            load[v] += 1
            # the predecessor takes the slot just vacated at `old`
            eid, v = prev[eid]
    return Orientation(tuple(owner), max(load, default=0))


def density_orientation(g: Graph) -> Orientation:
    """Orientation with out-degree at most ceil(m(G))."""
    return hall_orientation(g, max(1, ceil(max_density(g))))


def nash_williams(g: Graph) -> ForestDecomposition:
    """Partition E(G) into the minimum number of forests.

    Matroid partition by augmenting paths: an edge that closes a cycle in
    every forest displaces a cycle edge, which is then re-homed, along a
    shortest exchange sequence.  A new forest is opened only when no such
    sequence exists, so the final count is the minimum (= ceil(ar(G))).
    """
    forests: list[set[int]] = []
    where: list[int] = [-1] * g.e

    def tree_path(fi: int, u: int, v: int) -> list[int] | None:
        # edges of forest fi on the u-v path, or None if disconnected
        adj: dict[int, list[tuple[int, int]]] = {}
        for eid in forests[fi]:
            a, b = g.edges[eid]
            adj.setdefault(a, []).append((b, eid))
            adj.setdefault(b, []).append((a, eid))
        back: dict[int, tuple[int, int]] = {u: (-1, -1)}
        stack = [u]
        while stack:
            x = stack.pop()
            if x == v:
                break
            for y, eid in adj.get(x, ()):
                if y not in back:
                    back[y] = (x, eid)
                    stack.append(y)
        if v not in back:
            return None
        path = []
        x = v
        while x != u:
            x, eid = back[x]
            path.append(eid)
        return path

    for new in range(g.e):
        # BFS over edges; prev[x] = (y, fi) means y moves into forest fi replacing x
        prev: dict[int, tuple[int, int]] = {new: (-1, -1)}
        queue = deque([new])
        sink = None
        while queue and sink is None:
            x = queue.popleft()
            u, v = g.edges[x]
            for fi in range(len(forests)):
                if fi == where[x]:
                    continue
                path = tree_path(fi, u, v)
                if path is None:
                    sink = (x, fi)
                    break
                for y in path:
                    if y not in prev:
                        prev[y] = (x, fi)
                        queue.append(y)
        if sink is None:
            forests.append({new})
            where[new] = len(forests) - 1
            continue
        x, fi = sink
        while True:
            old = where[x]
            if old != -1:
                forests[old].discard(x)
            forests[fi].add(x)
            where[x] = fi
            y, fj = prev[x]
            if y == -1:
                break
            # y enters forest `old` replacing x
            x, fi = y, old
    return ForestDecomposition(tuple(where), len(forests))
