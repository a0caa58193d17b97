import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from app.config import Config
from app.models.extension import OneSinkExtension
from app.models.graph import DirectedMultigraph, Edge
from app.services.ext_service import ExtService
from app.services.extension_service import ExtensionService
from app.services.graph_service import GraphService
from app.services.linalg_service import LinalgService
from app.utils.exceptions import HypothesisViolated, InputMismatch
from tests.conftest import cuntz_graph, hypothesis_graphs

graph_service = GraphService()
linalg_service = LinalgService()
extension_service = ExtensionService(graph_service, linalg_service)
ext_service = ExtService(graph_service, linalg_service, extension_service)

corpus_settings = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])


@st.composite
def extensions(draw, base_strategy=hypothesis_graphs(max_vertices=4)):
    """Random 1-sink extensions: added vertices h0..hk in topological order, hk the sink"""
    base: DirectedMultigraph = draw(base_strategy)
    k = draw(st.integers(min_value=0, max_value=3))
    added = [f"h{i}" for i in range(k + 1)]
    edges = []
    # every added vertex except the sink moves on to the next one
    for i in range(k):
        edges.append((added[i], added[i + 1]))
    for source in list(base.vertices) + added[:-1]:
        start = added.index(source) + 1 if source in added else 0
        targets = draw(st.lists(st.sampled_from(added[start:]), max_size=3))
        edges += [(source, target) for target in targets]
    return OneSinkExtension(
        base=base,
        added_vertices=tuple(added),
        added_edges=tuple(Edge(id=f"f{n}", source=s, range=r) for n, (s, r) in enumerate(edges)),
        sink=added[-1],
    )


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_ext_of_cuntz_algebras(n):
    group = ext_service.ext_group(cuntz_graph(n))
    assert group.vertex_presentation.invariant_factors == (() if n == 2 else (n - 1,))
    assert group.vertex_presentation.free_rank == 0
    assert group.describe() == ("0" if n == 2 else f"Z/{n - 1}")
    assert group.hypotheses_hold


def test_ext_needs_the_hypotheses(intro_graph):
    with pytest.raises(HypothesisViolated) as info:
        ext_service.ext_group(intro_graph)
    assert info.value.exit_code == 3
    assert "Condition (L) fails" in info.value.detail


def test_forced_ext_of_intro_graph(intro_graph, caplog):
    fresh = ExtService(graph_service, linalg_service, extension_service)
    group = fresh.ext_group(intro_graph, force=True)
    assert group.describe() == "Z"
    assert group.edge_presentation.describe() == "Z"
    assert not group.hypotheses_hold
    assert any("Condition (L) fails" in record.message for record in caplog.records)


def test_ext_groups_are_cached(exit_graph):
    assert ext_service.ext_group(exit_graph) is ext_service.ext_group(exit_graph)


def test_ext_group_cache_is_bounded(monkeypatch):
    monkeypatch.setattr(Config, "CACHE_SIZE", 2)
    service = ExtService(graph_service, linalg_service, extension_service)
    first = service.ext_group(cuntz_graph(2))
    for n in range(3, 7):
        service.ext_group(cuntz_graph(n))
    assert service._cached_group.cache_info().currsize == 2
    assert service.ext_group(cuntz_graph(2)) is not first
    assert service.ext_group(cuntz_graph(2)) == first


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(hypothesis_graphs(max_vertices=8, max_parallel=1), st.randoms(use_true_random=False))
def test_vertex_and_edge_presentations_agree(graph, rng):
    group = ext_service.ext_group(graph)
    assert group.vertex_presentation.same_group(group.edge_presentation)

    for _ in range(100):
        edge_class = group.edge_class([rng.randint(-4, 4) for _ in graph.edges])
        vertex_class = group.vertex_class([rng.randint(-4, 4) for _ in graph.vertices])
        assert ext_service.induced_R_bar(group, ext_service.induced_S_bar(group, edge_class)) == edge_class
        assert ext_service.induced_S_bar(group, ext_service.induced_R_bar(group, vertex_class)) == vertex_class


def test_induced_maps_reject_foreign_classes(exit_graph):
    group = ext_service.ext_group(exit_graph)
    with pytest.raises(InputMismatch):
        ext_service.induced_S_bar(group, group.vertex_class((1, 0)))
    with pytest.raises(InputMismatch):
        ext_service.induced_R_bar(group, group.edge_class((1, 0, 0)))


def test_wojciech_vectors_of_the_intro_extensions(e1, e2):
    assert ext_service.wojciech_vector(e1).entries == (1, 1, 2)
    assert ext_service.wojciech_vector(e2).entries == (1, 0, 1)
    assert ext_service.wojciech_vector(e1)["w3"] == 2
    total = ext_service.sum_extensions(e1, e2)
    assert ext_service.wojciech_vector(total).entries == (2, 1, 3)


def test_wojciech_class_sum_on_intro_graph(e1, e2):
    total = ext_service.sum_extensions(e1, e2)
    first = ext_service.wojciech_class(e1, force=True)
    second = ext_service.wojciech_class(e2, force=True)
    assert ext_service.wojciech_class(total, force=True).element == first.element + second.element
    assert first.essential and second.essential
    assert not first.hypotheses_hold


def test_wojciech_counts_paths_through_the_added_part(exit_graph):
    extension = OneSinkExtension(
        base=exit_graph,
        added_vertices=("h", "v0"),
        added_edges=(
            Edge(id="a", source="u", range="h"),
            Edge(id="b", source="h", range="v0"),
            Edge(id="c", source="h", range="v0"),
            Edge(id="d", source="w", range="v0"),
            Edge(id="g", source="u", range="v0"),
        ),
        sink="v0",
    )
    assert ext_service.wojciech_vector(extension).entries == (3, 1)
    assert ext_service.paths_to_sink(extension, "u") == [("a", "b"), ("a", "c"), ("g",)]
    assert ext_service.edge_class_vector(extension) == (1, 3, 1)


def test_wojciech_class_of_non_essential_extension_is_flagged(exit_graph, caplog):
    extension = extension_service.simple_extension(exit_graph, (0, 0))
    wclass = ext_service.wojciech_class(extension)
    assert not wclass.essential
    assert wclass.element.is_zero()
    assert any("not essential" in record.message for record in caplog.records)


@corpus_settings
@given(extensions())
def test_wojciech_vector_matches_path_enumeration(extension):
    omega = ext_service.wojciech_vector(extension)
    for w in extension.base.vertices:
        assert omega[w] == len(ext_service.paths_to_sink(extension, w))


@corpus_settings
@given(extensions())
def test_edge_class_identity(extension):
    x = ext_service.edge_class_vector(extension)
    omega = ext_service.wojciech_vector(extension).entries
    S = graph_service.source_matrix(extension.base)
    shifted = graph_service.vertex_matrix(extension.base).minus_identity()
    assert tuple(a - b for a, b in zip(S.apply(x), omega)) == shifted.apply(omega)


@corpus_settings
@given(extensions())
def test_source_map_sends_edge_class_to_wojciech_class(extension):
    group = ext_service.ext_group(extension.base)
    assert ext_service.induced_S_bar(group, ext_service.edge_class(extension)) == (
        ext_service.wojciech_class(extension).element
    )


@corpus_settings
@given(extensions(), st.data())
def test_sum_is_additive(first, data):
    x = data.draw(st.lists(st.integers(0, 3), min_size=len(first.base.vertices), max_size=len(first.base.vertices)))
    second = extension_service.simple_extension(first.base, x)
    total = ext_service.sum_extensions(first, second)
    assert ext_service.wojciech_class(total).element == (
        ext_service.wojciech_class(first).element + ext_service.wojciech_class(second).element
    )


def test_sum_needs_the_same_base(e1, exit_graph):
    other = extension_service.simple_extension(exit_graph, (1, 1))
    with pytest.raises(InputMismatch):
        ext_service.sum_extensions(e1, other)


def test_sum_is_associative(e1, e2):
    left = ext_service.sum_extensions(ext_service.sum_extensions(e1, e2), e1)
    right = ext_service.sum_extensions(e1, ext_service.sum_extensions(e2, e1))
    assert ext_service.wojciech_vector(left) == ext_service.wojciech_vector(right)
    assert ext_service.wojciech_vector(left).entries == (3, 2, 5)


def test_invalid_extension_is_rejected(exit_graph):
    looping = OneSinkExtension(
        base=exit_graph,
        added_vertices=("a", "b", "v0"),
        added_edges=(
            Edge(id="x", source="u", range="a"),
            Edge(id="y", source="a", range="b"),
            Edge(id="z", source="b", range="a"),
            Edge(id="q", source="b", range="v0"),
        ),
        sink="v0",
    )
    with pytest.raises(InputMismatch):
        ext_service.wojciech_vector(looping)
