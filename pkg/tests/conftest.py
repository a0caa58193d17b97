import itertools
from typing import List, Optional, Sequence

import pytest
from hypothesis import assume, strategies as st

from app.models.graph import DirectedMultigraph
from app.services.ext_service import ExtService
from app.services.extension_service import ExtensionService
from app.services.graph_service import GraphService
from app.services.linalg_service import LinalgService
from app.utils.formats import parse_extension, parse_graph

INTRO_GRAPH_TEXT = """\
# w1 has a loop and feeds the cycle w2 <-> w3
vertex w1
vertex w2
vertex w3
edge e0 w1 w1
edge e1 w1 w2
edge e2 w2 w3
edge e3 w3 w2
"""

E1_TEXT = INTRO_GRAPH_TEXT + """\
sink v0
addedge f1 w1 v0
addedge f2 w2 v0
addedge f3 w3 v0
addedge f4 w3 v0
"""

E2_TEXT = INTRO_GRAPH_TEXT + """\
sink v0
addedge f1 w1 v0
addedge f2 w3 v0
"""


def graph_from_matrix(rows: Sequence[Sequence[int]]) -> DirectedMultigraph:
    """Graph on w1..wn with rows[i][j] parallel edges wi -> wj"""
    vertices = [f"w{i + 1}" for i in range(len(rows))]
    edges = []
    for i, row in enumerate(rows):
        for j, count in enumerate(row):
            edges += [(vertices[i], vertices[j])] * count
    return DirectedMultigraph.build(vertices, edges)


def cuntz_graph(n: int) -> DirectedMultigraph:
    """One vertex with n loops; its algebra is O_n"""
    return graph_from_matrix([[n]])


def _canonical(rows: Sequence[Sequence[int]]):
    """Smallest adjacency tuple over the relabelings that keep vertices sorted by (loops, out, in)"""
    n = len(rows)
    invariant = [(rows[i][i], sum(rows[i]), sum(row[i] for row in rows)) for i in range(n)]
    order = sorted(range(n), key=invariant.__getitem__)
    ties = [list(group) for _, group in itertools.groupby(order, key=invariant.__getitem__)]
    best = None
    for parts in itertools.product(*(itertools.permutations(group) for group in ties)):
        p = [i for part in parts for i in part]
        key = tuple(rows[p[i]][p[j]] for i in range(n) for j in range(n))
        if best is None or key < best:
            best = key
    return tuple(invariant[i] for i in order), best


def small_graphs(
    max_vertices: int = 3,
    max_parallel: int = 2,
    max_loops: Optional[int] = None,
    min_vertices: int = 1,
) -> List[DirectedMultigraph]:
    """Every no-sink Condition (L) multigraph up to isomorphism.

    max_parallel caps the edges between two distinct vertices, max_loops the
    loops at one vertex (defaults to max_parallel).
    """
    if max_loops is None:
        max_loops = max_parallel
    graph_service = GraphService()
    found, seen = [], set()
    for n in range(min_vertices, max_vertices + 1):
        # rows without an edge out would make a sink
        candidates = [
            [
                row
                for row in itertools.product(
                    *(range(max_loops + 1) if j == i else range(max_parallel + 1) for j in range(n))
                )
                if any(row)
            ]
            for i in range(n)
        ]
        for rows in itertools.product(*candidates):
            key = _canonical(rows)
            if key in seen:
                continue
            seen.add(key)
            graph = graph_from_matrix(rows)
            if graph_service.satisfies_condition_L(graph):
                found.append(graph)
    return found


@st.composite
def hypothesis_graphs(draw, max_vertices: int = 6, max_parallel: int = 2):
    """Random graphs with no sinks satisfying Condition (L)"""
    n = draw(st.integers(min_value=1, max_value=max_vertices))
    rows = draw(
        st.lists(
            st.lists(st.integers(min_value=0, max_value=max_parallel), min_size=n, max_size=n).filter(any),
            min_size=n,
            max_size=n,
        )
    )
    graph = graph_from_matrix(rows)
    assume(GraphService().satisfies_condition_L(graph))
    return graph


@pytest.fixture
def graph_service():
    return GraphService()


@pytest.fixture
def linalg_service():
    return LinalgService()


@pytest.fixture
def extension_service(graph_service, linalg_service):
    return ExtensionService(graph_service, linalg_service)


@pytest.fixture
def ext_service(graph_service, linalg_service, extension_service):
    return ExtService(graph_service, linalg_service, extension_service)


@pytest.fixture
def intro_graph():
    return parse_graph(INTRO_GRAPH_TEXT)


@pytest.fixture
def e1():
    return parse_extension(E1_TEXT)


@pytest.fixture
def e2():
    return parse_extension(E2_TEXT)


@pytest.fixture
def exit_graph():
    """2-cycle u <-> w with an extra edge u -> w, so the cycle has an exit"""
    return DirectedMultigraph.build(["u", "w"], [("u", "w"), ("w", "u"), ("u", "w")])
