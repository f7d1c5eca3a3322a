"""Pattern copies, triangle edge classes, H-cores, K3-cores and core growth."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .graph import Graph

PATTERN_LIMIT = 8


class PatternTooLarge(ValueError):
    pass


class NotCoveredByTriangles(ValueError):
    pass


EdgeSet = frozenset[int]


def _key(s) -> tuple[int, ...]:
    return tuple(sorted(s))


# -- blocks and copies ----------------------------------------------------


def biconnected_components(g: Graph) -> list[frozenset[int]]:
    """Edge-id sets of the blocks of ``g`` (bridges are singleton blocks)."""
    import networkx as nx

    nxg = g.to_networkx()
    out = []
    for comp in nx.biconnected_component_edges(nxg):
        out.append(frozenset(g.edge_id(u, v) for u, v in comp))
    return sorted(out, key=_key)


def triangles(g: Graph) -> list[EdgeSet]:
    """All triangles as edge-id triples, sorted lexicographically."""
    nb = g.nbr_mask
    out = []
    for eid, (u, v) in enumerate(g.edges):
        common = nb[u] & nb[v] & ~((1 << (v + 1)) - 1)
        while common:
            low = common & -common
            w = low.bit_length() - 1
            common ^= low
            out.append(frozenset((eid, g.edge_id(u, w), g.edge_id(v, w))))
    return sorted(out, key=_key)


def triangle_vertices(g: Graph, t: EdgeSet) -> tuple[int, ...]:
    return tuple(sorted({x for eid in t for x in g.edges[eid]}))


def find_copies(g: Graph, h: Graph, limit: int | None = None) -> list[EdgeSet]:
    """Edge sets of all (not necessarily induced) copies of ``h`` in ``g``."""
    hc, _ = h.compact()
    if hc.n > PATTERN_LIMIT:
        raise PatternTooLarge(f"pattern has {hc.n} vertices, limit {PATTERN_LIMIT}")
    if hc.e == 0:
        return []
    if hc.n == 3 and hc.e == 3:
        tri = triangles(g)
        return tri[:limit] if limit is not None else tri
    if hc.e == 1:
        out = [frozenset((i,)) for i in range(g.e)]
        return out[:limit] if limit is not None else out
    from networkx.algorithms.isomorphism import GraphMatcher

    gm = GraphMatcher(g.to_networkx(), hc.to_networkx())
    seen: set[EdgeSet] = set()
    out = []
    for mapping in gm.subgraph_monomorphisms_iter():
        inv = {hv: gv for gv, hv in mapping.items()}
        es = frozenset(g.edge_id(inv[a], inv[b]) for a, b in hc.edges)
        if es not in seen:
            seen.add(es)
            out.append(es)
            if limit is not None and len(out) >= limit:
                break
    return sorted(out, key=_key)


# -- triangle classification ----------------------------------------------


class EdgeClass(str, Enum):
    FREE = "free"
    OPEN = "open"
    HALF_OPEN = "half-open"
    CLOSED = "closed"

    @classmethod
    def from_count(cls, c: int) -> "EdgeClass":
        return (cls.FREE, cls.OPEN, cls.HALF_OPEN)[c] if c < 3 else cls.CLOSED


def triangle_counts(g: Graph) -> list[int]:
    counts = [0] * g.e
    for t in triangles(g):
        for eid in t:
            counts[eid] += 1
    return counts


def classify_edges_triangles(g: Graph) -> list[EdgeClass]:
    return [EdgeClass.from_count(c) for c in triangle_counts(g)]


# -- cores -----------------------------------------------------------------


@dataclass(frozen=True)
class RemovalStep:
    kind: str  # "copy", "over-open-triangle" or "half-open-pair"
    copies: tuple[EdgeSet, ...]
    offer: tuple[int, ...]  # edges Waiter offers together when replaying


@dataclass(frozen=True)
class CoreTrace:
    core_edges: frozenset[int]
    core: Graph = field(repr=False)
    removal_steps: tuple[RemovalStep, ...] = ()
    copies: tuple[EdgeSet, ...] = field(default=(), repr=False)  # surviving pattern copies


class _CopyIndex:
    """Alive copies per edge, with lexicographic sweep order."""

    def __init__(self, copies: list[EdgeSet]):
        self.order = sorted(set(copies), key=_key)
        self.alive = set(self.order)
        self.by_edge: dict[int, set[EdgeSet]] = {}
        for c in self.order:
            for eid in c:
                self.by_edge.setdefault(eid, set()).add(c)

    def count(self, eid: int) -> int:
        return len(self.by_edge.get(eid, ()))

    def remove(self, c: EdgeSet) -> None:
        self.alive.discard(c)
        for eid in c:
            self.by_edge[eid].discard(c)

    def edges(self) -> frozenset[int]:
        return frozenset(e for e, s in self.by_edge.items() if s)


def h_core(g: Graph, h: Graph) -> CoreTrace:
    """Repeatedly discard copies of ``h`` owning two edges no other copy uses."""
    idx = _CopyIndex(find_copies(g, h))
    steps = []
    changed = True
    while changed:
        changed = False
        for c in idx.order:
            if c not in idx.alive:
                continue
            private = sorted(e for e in c if idx.count(e) == 1)
            if len(private) >= 2:
                idx.remove(c)
                steps.append(RemovalStep("copy", (c,), tuple(private[:2])))
                changed = True
    core_edges = idx.edges()
    return CoreTrace(core_edges, g.edge_subgraph(core_edges), tuple(steps), tuple(c for c in idx.order if c in idx.alive))


def k3_core(g: Graph) -> CoreTrace:
    """Fixed point of the triangle-peeling process.

    Each sweep visits alive triangles in lexicographic edge-id order and
    removes a triangle with more than one open edge, or a pair of
    triangles sharing a half-open edge when both have an open edge.
    """
    idx = _CopyIndex(triangles(g))
    steps = []
    changed = True
    while changed:
        changed = False
        for t in idx.order:
            if t not in idx.alive:
                continue
            opens = sorted(e for e in t if idx.count(e) == 1)
            if len(opens) > 1:
                idx.remove(t)
                steps.append(RemovalStep("over-open-triangle", (t,), tuple(opens[:2])))
                changed = True
                continue
            if len(opens) != 1:
                continue
            for h in sorted(e for e in t if idx.count(e) == 2):
                (other,) = idx.by_edge[h] - {t}
                other_opens = sorted(e for e in other if idx.count(e) == 1)
                if other_opens:
                    idx.remove(t)
                    idx.remove(other)
                    steps.append(RemovalStep("half-open-pair", (t, other), (h, opens[0], other_opens[0])))
                    changed = True
                    break
    core_edges = idx.edges()
    return CoreTrace(core_edges, g.edge_subgraph(core_edges), tuple(steps), tuple(t for t in idx.order if t in idx.alive))


def is_h_core(g: Graph, h: Graph) -> bool:
    """Check the two defining properties of an H-core on ``g`` itself."""
    copies = find_copies(g, h)
    count = [0] * g.e
    for c in copies:
        for eid in c:
            count[eid] += 1
    if any(c == 0 for c in count):
        return False
    return all(sum(1 for eid in c if count[eid] == 1) <= 1 for c in copies)


def is_k3_core(g: Graph) -> bool:
    """Check the three defining properties of a K3-core on ``g`` itself."""
    tri = triangles(g)
    count = triangle_counts(g)
    if any(c == 0 for c in count):
        return False
    if any(sum(1 for e in t if count[e] == 1) > 1 for t in tri):
        return False
    for eid in range(g.e):
        if count[eid] == 2:
            ts = [t for t in tri if eid in t]
            if not any(all(count[x] != 1 for x in t) for t in ts):
                return False
    return True


# -- core growth -------------------------------------------------------------


@dataclass(frozen=True)
class GrowthTrace:
    triangles: tuple[tuple[int, int, int], ...]  # vertex triples T_0..T_l
    tags: tuple[str, ...]  # tag of T_i for i >= 1 ("regular" / "degenerate")
    reg: tuple[int, ...]  # reg(i), i = 1..l
    deg: tuple[int, ...]
    fully_open: tuple[int, ...]  # f(i), incrementally maintained
    fully_open_recomputed: tuple[int, ...]

    def bound_holds(self) -> list[bool]:
        """f(i) >= reg(i)/2 - 3 deg(i) at every step."""
        return [2 * f >= r - 6 * d for f, r, d in zip(self.fully_open, self.reg, self.deg)]


def grow_core_trace(comp: Graph) -> GrowthTrace:
    """Rebuild a block of a K3-core by attaching triangles one at a time."""
    all_tri = triangles(comp)
    if not all_tri:
        raise NotCoveredByTriangles("component has no triangles")
    target = frozenset(range(comp.e))
    if frozenset().union(*all_tri) != target:
        raise NotCoveredByTriangles("some edge lies in no triangle")
    tri_by_edge: dict[int, list[EdgeSet]] = {}
    for t in all_tri:
        for eid in t:
            tri_by_edge.setdefault(eid, []).append(t)

    hat: set[int] = set()
    hat_vertices: set[int] = set()
    cnt = [0] * comp.e  # triangles of G' inside hat, per edge
    inside: set[EdgeSet] = set()

    def add(t: EdgeSet) -> None:
        new_edges = t - hat
        hat.update(t)
        for eid in new_edges:
            for s in tri_by_edge[eid]:
                if s not in inside and s <= hat:
                    inside.add(s)
                    for x in s:
                        cnt[x] += 1
        for eid in t:
            hat_vertices.update(comp.edges[eid])

    def opens(t: EdgeSet) -> list[int]:
        return sorted(e for e in t if cnt[e] == 1)

    def half_opens(t: EdgeSet) -> list[int]:
        return sorted(e for e in t if cnt[e] == 2)

    def other_inside(t: EdgeSet, eid: int) -> EdgeSet:
        (o,) = [s for s in tri_by_edge[eid] if s in inside and s != t]
        return o

    def unproblematic(t: EdgeSet) -> bool:
        op = opens(t)
        if len(op) >= 2:
            return True
        if len(op) == 1:
            return any(opens(other_inside(t, h)) for h in half_opens(t))
        return False

    def outside_with(eids) -> list[EdgeSet]:
        found = {s for e in eids for s in tri_by_edge[e] if s not in inside}
        return sorted(found, key=_key)

    seq = [all_tri[0]]
    add(all_tri[0])
    tags: list[str] = []
    reg: list[int] = []
    deg: list[int] = []
    touch: dict[int, int] = {}
    tri_at: dict[int, list[int]] = {}
    fo: set[int] = set()
    f_inc: list[int] = []
    f_scratch: list[int] = []

    def verts(t: EdgeSet) -> tuple[int, ...]:
        return triangle_vertices(comp, t)

    for v in verts(seq[0]):
        touch[v] = 1
        tri_at.setdefault(v, []).append(0)

    while hat != target:
        k = len(seq)
        pick = None
        cand = [i for i in range(k) if unproblematic(seq[i])]
        if cand:
            tl = seq[cand[0]]
            ext = outside_with(opens(tl))
            if ext:
                pick = ext[0]
            else:
                hs = half_opens(tl)
                good = [h for h in hs if opens(other_inside(tl, h))]
                choice = (good or hs)[:1]
                if not choice:
                    raise NotCoveredByTriangles("unproblematic triangle cannot be extended")
                e = choice[0]
                ext = outside_with([e])
                if ext:
                    pick = ext[0]
                else:
                    other = other_inside(tl, e)
                    ext = outside_with(opens(other))
                    if not ext:
                        raise NotCoveredByTriangles("input is not a K3-core block")
                    pick = ext[0]
        else:
            ext = sorted(
                {s for s in all_tri if s not in inside and s & hat},
                key=_key,
            )
            if not ext:
                raise NotCoveredByTriangles("triangles do not connect the component")
            pick = ext[0]
        vs = verts(pick)
        regular = any(v not in hat_vertices for v in vs)
        tags.append("regular" if regular else "degenerate")
        reg.append((reg[-1] if reg else 0) + int(regular))
        deg.append((deg[-1] if deg else 0) + int(not regular))
        seq.append(pick)
        add(pick)
        # incremental fully-open bookkeeping
        for v in vs:
            touch[v] = touch.get(v, 0) + 1
            tri_at.setdefault(v, []).append(k)
        for v in vs:
            for i in tri_at[v]:
                if i in fo and not any(touch[x] == 1 for x in verts(seq[i])):
                    fo.discard(i)
        if any(touch[v] == 1 for v in vs):
            fo.add(k)
        f_inc.append(len(fo))
        f_scratch.append(sum(1 for i in range(1, k + 1) if any(touch[x] == 1 for x in verts(seq[i]))))

    return GrowthTrace(
        tuple(verts(t) for t in seq),
        tuple(tags),
        tuple(reg),
        tuple(deg),
        tuple(f_inc),
        tuple(f_scratch),
    )
