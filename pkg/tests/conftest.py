import itertools

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rocgraph.graph import build_graph

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def small_graphs(draw, max_n=8, min_n=1):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return build_graph(n, chosen)


@pytest.fixture
def k4():
    return build_graph(4, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 3)])


@pytest.fixture
def c5():
    return build_graph(5, [(i, (i + 1) % 5) for i in range(5)])
