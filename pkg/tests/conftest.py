import pytest
from hypothesis import HealthCheck, settings

from pasplearn.parsing import parse_interpretations, parse_program

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

EXAMPLE_GRAPH = """\
0.2::edge(1,2).
0.3::edge(2,4).
0.9::edge(1,3).
path(X,Y) :- connected(X,Z), path(Z,Y).
path(X,Y) :- connected(X,Y).
connected(X,Y) :- edge(X,Y), not nconnected(X,Y).
nconnected(X,Y) :- edge(X,Y), not connected(X,Y).
"""


@pytest.fixture
def graph_program():
    """Three-edge reachability program: exact bounds known by hand."""
    return parse_program(EXAMPLE_GRAPH)


@pytest.fixture
def learnable_graph_program():
    return parse_program(
        EXAMPLE_GRAPH.replace("0.2::", "learnable(0.5)::")
        .replace("0.3::", "learnable(0.5)::")
        .replace("0.9::", "learnable(0.5)::")
    )


@pytest.fixture
def graph_interpretations():
    return parse_interpretations("path(1,3), not path(1,4).\npath(1,4).\n")
