import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from crsf.graph import Multigraph  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def small_graphs(draw, max_n=5, max_extra=4, loops=True):
    """Connected multigraphs: a random tree plus parallel edges, extra
    edges and self-loops."""
    n = draw(st.integers(2, max_n))
    edges = []
    for v in range(1, n):
        edges.append((v, draw(st.integers(0, v - 1))))
    k = draw(st.integers(1, max_extra))
    for _ in range(k):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 1)) if loops else draw(
            st.integers(0, n - 1).filter(lambda x: x != u))
        edges.append((u, v))
    return Multigraph(range(n), [(i, u, v) for i, (u, v) in enumerate(edges)])
