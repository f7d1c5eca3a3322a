"""Regenerate the frozen catalogue of connected graphs with at most eight
vertices and maximum density at most 2.

Run ``python3 tests/catalog.py`` to rewrite ``tests/data/m2_connected_le8.g6``.
Eight-vertex graphs are grown from all seven-vertex graphs of density at
most 2 (maximum density is inherited by subgraphs, so every eight-vertex
member minus its last vertex appears there), then deduplicated up to
isomorphism.
"""

from __future__ import annotations

from itertools import combinations
from pathlib import Path

import networkx as nx
from networkx.generators.atlas import graph_atlas_g

from clientwaiter.density import max_density
from clientwaiter.graph import Graph

CATALOG = Path(__file__).parent / "data" / "m2_connected_le8.g6"


def to_graph(h: nx.Graph) -> Graph:
    h = nx.convert_node_labels_to_integers(h)
    return Graph(h.number_of_nodes(), tuple(h.edges()))


def small_graphs() -> list[nx.Graph]:
    """Connected graphs on 1..7 vertices with m <= 2."""
    return [
        h for h in graph_atlas_g()
        if h.number_of_nodes() >= 1 and nx.is_connected(h) and max_density(to_graph(h)) <= 2
    ]


def eight_vertex_graphs() -> list[nx.Graph]:
    base = [h for h in graph_atlas_g() if h.number_of_nodes() == 7 and max_density(to_graph(h)) <= 2]
    buckets: dict[str, list[nx.Graph]] = {}
    for h in base:
        for r in range(1, 8):
            for nbrs in combinations(range(7), r):
                g = h.copy()
                g.add_edges_from((7, s) for s in nbrs)
                if not nx.is_connected(g) or max_density(to_graph(g)) > 2:
                    continue
                key = nx.weisfeiler_lehman_graph_hash(g, iterations=3)
                seen = buckets.setdefault(key, [])
                if not any(nx.is_isomorphic(g, k) for k in seen):
                    seen.append(g)
    return [g for lst in buckets.values() for g in lst]


def load_catalog() -> list[Graph]:
    return [to_graph(nx.from_graph6_bytes(line.encode())) for line in CATALOG.read_text().split()]


def main() -> None:
    graphs = small_graphs() + eight_vertex_graphs()
    CATALOG.parent.mkdir(parents=True, exist_ok=True)
    CATALOG.write_text("".join(nx.to_graph6_bytes(g, header=False).decode() for g in graphs))
    print(f"{len(graphs)} graphs written to {CATALOG}")


if __name__ == "__main__":
    main()
