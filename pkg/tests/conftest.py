import sys
from pathlib import Path

import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def small_graphs(draw, max_vertices=5, max_edges=7, loops=True):
    """Multigraphs with parallel edges and (optionally) loops."""
    from rcmodel.graph import Graph

    n = draw(st.integers(1, max_vertices))
    m = draw(st.integers(0, max_edges))
    ends = st.integers(0, n - 1)
    edges = draw(st.lists(st.tuples(ends, ends), min_size=m, max_size=m))
    if not loops:
        edges = [(u, v) for u, v in edges if u != v]
    return Graph(n, tuple(edges))


unit_open = st.floats(0.02, 0.98)
cluster_weight = st.floats(0.1, 6.0)


def pytest_terminal_summary(terminalreporter):
    import report

    if report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in report.LINES:
            terminalreporter.write_line(line)
