"""Hypothesis generators for small graphs."""

from hypothesis import strategies as st

from clientwaiter.graph import Graph


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 8, min_p: float = 0.0):
    """Graphs on ``min_n..max_n`` vertices; ``min_p`` raises the edge density."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    p = draw(st.floats(min_p, 1.0)) if min_p else 0.5
    rolls = draw(st.lists(st.floats(0.0, 1.0), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, tuple(pr for pr, r in zip(pairs, rolls) if r < p))
