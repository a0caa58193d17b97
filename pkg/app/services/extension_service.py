import logging
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from app.config import Config
from app.models.extension import (
    EssentializingVector,
    OneSinkExtension,
    ValidationReport,
    Violation,
)
from app.models.graph import DirectedMultigraph, Edge
from app.services.graph_service import GraphService
from app.services.linalg_service import LinalgService
from app.utils.exceptions import (
    HypothesisViolated,
    InputMismatch,
    InternalAssertionFailed,
)

logger = logging.getLogger(__name__)

DEFAULT_SINK = "v0"


class ExtensionService:
    """1-sink extensions: validation, construction and essentialization"""

    def __init__(self, graph_service: GraphService, linalg_service: LinalgService):
        self.graph_service = graph_service
        self.linalg_service = linalg_service
        self._cached_positive_vector = lru_cache(maxsize=Config.CACHE_SIZE)(self._positive_vector)

    def validate(self, extension: OneSinkExtension) -> ValidationReport:
        """Check the four defining conditions of a 1-sink extension"""
        whole = extension.graph
        added = set(extension.added_vertices)
        violations: List[Violation] = []

        for h in extension.added_vertices:
            if not whole.in_edges[h]:
                violations.append(Violation(condition=1, message=f"added vertex {h} is a source"))
        added_sinks = [h for h in extension.added_vertices if not whole.out_edges[h]]
        if added_sinks != [extension.sink]:
            violations.append(
                Violation(
                    condition=1,
                    message=f"added part must contain exactly the sink {extension.sink}, found sinks {added_sinks}",
                )
            )

        subgraph = nx.MultiDiGraph()
        subgraph.add_nodes_from(extension.added_vertices)
        subgraph.add_edges_from(
            (e.source, e.range) for e in extension.added_edges if e.source in added and e.range in added
        )
        if not nx.is_directed_acyclic_graph(subgraph):
            cycle = nx.find_cycle(subgraph)
            shown = " -> ".join(step[0] for step in cycle)
            violations.append(Violation(condition=2, message=f"loop inside the added part through {shown}"))

        for edge in extension.added_edges:
            if edge.range not in added:
                violations.append(
                    Violation(condition=3, message=f"added edge {edge.id} ends at base vertex {edge.range}")
                )

        for w in self.graph_service.sinks(extension.base):
            if whole.out_edges[w]:
                violations.append(Violation(condition=4, message=f"base sink {w} emits edges in the extension"))

        return ValidationReport(violations=tuple(violations))

    def require_structure(self, extension: OneSinkExtension) -> ValidationReport:
        """Fail on conditions (2)-(4); condition (1) only warns, as the zero-vector extension violates it"""
        report = self.validate(extension)
        blocking = [v for v in report.violations if v.condition != 1]
        if blocking:
            raise InputMismatch("Invalid 1-sink extension: " + "; ".join(f"({v.condition}) {v.message}" for v in blocking))
        for violation in report.violations:
            logger.warning(f"1-sink extension violates condition (1): {violation.message}")
        return report

    def is_essential(self, extension: OneSinkExtension) -> bool:
        """Every base vertex reaches the sink"""
        self.require_structure(extension)
        feeding = nx.ancestors(self.graph_service.to_networkx(extension.graph), extension.sink)
        return all(v in feeding for v in extension.base.vertices)

    def boundary_vertices(self, extension: OneSinkExtension) -> List[str]:
        """Base vertices that emit an edge into the added part"""
        emitting = {e.source for e in extension.added_edges}
        return [v for v in extension.base.vertices if v in emitting]

    def simple_extension(
        self, graph: DirectedMultigraph, x: Sequence[int], sink: str = DEFAULT_SINK
    ) -> OneSinkExtension:
        """One added vertex v0 with x(w) parallel edges w -> v0"""
        if len(x) != len(graph.vertices):
            raise InputMismatch(f"Vector has {len(x)} entries, graph has {len(graph.vertices)} vertices")
        if any(value < 0 for value in x):
            raise InputMismatch(f"Simple extensions need a nonnegative vector, got {tuple(x)}")
        if not any(x):
            logger.warning("Simple extension of the zero vector: the sink is a source and condition (1) fails")

        sink = self._fresh_vertex(graph, sink)
        taken = set(graph.edge_index)
        added_edges = []
        for w, count in zip(graph.vertices, x):
            for i in range(1, int(count) + 1):
                edge_id = self._fresh_edge_id(taken, f"{w}_{sink}_{i}")
                added_edges.append(Edge(id=edge_id, source=w, range=sink))
        return OneSinkExtension(
            base=graph,
            added_vertices=(sink,),
            added_edges=tuple(added_edges),
            sink=sink,
        )

    def add_sink_at(self, graph: DirectedMultigraph, v: str) -> OneSinkExtension:
        """Simple extension with a single edge v -> v0"""
        return self.simple_extension(graph, graph.delta(v))

    def require_hypotheses(self, graph: DirectedMultigraph) -> None:
        violations = self.graph_service.hypothesis_violations(graph)
        if violations:
            raise HypothesisViolated(violations)

    def essentializing_vector(self, graph: DirectedMultigraph) -> EssentializingVector:
        """n with (A−I)n ≥ 0 such that every vertex reaches a coordinate where (A−I)n ≥ 1.

        For a finite graph every vertex feeds into a loop, so the all-ones vector
        works: (A−I)·1 is the out-degree minus one, positive wherever a loop exits.
        """
        self.require_hypotheses(graph)
        shifted = self.graph_service.vertex_matrix(graph).minus_identity()
        n = (1,) * len(graph.vertices)
        image = shifted.apply(n)

        if any(value < 0 for value in image):
            raise InternalAssertionFailed(f"(A−I)n has a negative entry: {image}")
        positive = {v for v, value in zip(graph.vertices, image) if value >= 1}
        for v in graph.vertices:
            if not positive.intersection(self.graph_service.reachable_set(graph, v)):
                raise InternalAssertionFailed(f"vertex {v} reaches no coordinate where (A−I)n ≥ 1")
        return EssentializingVector(vertices=graph.vertices, entries=n, image=image)

    def positive_vector_at(self, graph: DirectedMultigraph, v: str) -> Tuple[int, ...]:
        """n ≥ 0 with (A−I)n ≥ 0 and ((A−I)n)(v) ≥ 1"""
        return self._cached_positive_vector(graph, v)

    def _positive_vector(self, graph: DirectedMultigraph, v: str) -> Tuple[int, ...]:
        self.require_hypotheses(graph)
        index = graph.index_of(v)
        vertex_matrix = self.graph_service.vertex_matrix(graph)

        if vertex_matrix[index, index] >= 2:
            n = graph.delta(v)
        else:
            n = self._walk_weights(graph, v)

        image = vertex_matrix.minus_identity().apply(n)
        if any(value < 0 for value in image) or image[index] < 1:
            raise InternalAssertionFailed(f"positive vector at {v} fails its certificate: n={n}, (A−I)n={image}")
        return n

    def _walk_weights(self, graph: DirectedMultigraph, v: str) -> Tuple[int, ...]:
        """Weights 2 along the walk from v up to the first exit of the loop it falls into"""
        leaving = sorted((e for e in graph.out_edges[v] if e.range != v), key=lambda e: e.id)
        if not leaving:
            raise InternalAssertionFailed(f"vertex {v} has no edge to another vertex")

        walk: List[Edge] = [leaving[0]]
        first_seen: Dict[str, int] = {v: 0}
        while True:
            here = walk[-1].range
            if here in first_seen:
                loop_start = first_seen[here]
                break
            first_seen[here] = len(walk)
            walk.append(min(graph.out_edges[here], key=lambda e: e.id))

        exit_position = None
        for position in range(loop_start, len(walk)):
            on_loop = walk[position]
            others = [e for e in graph.out_edges[on_loop.source] if e.id != on_loop.id]
            if others:
                exit_position = position
                logger.debug(f"walk from {v}: loop exit at {on_loop.source} via {min(e.id for e in others)}")
                break
        if exit_position is None:
            raise InternalAssertionFailed(f"loop reached from {v} has no exit")

        doubled = {walk[i].source for i in range(1, exit_position + 1)}
        return tuple(2 if w in doubled else 1 for w in graph.vertices)

    def essential_extension_for_nonneg(self, graph: DirectedMultigraph, x: Sequence[int]) -> OneSinkExtension:
        """Essential extension with Wojciech vector x + (A−I)n, n the essentializing vector"""
        if len(x) != len(graph.vertices):
            raise InputMismatch(f"Vector has {len(x)} entries, graph has {len(graph.vertices)} vertices")
        if any(value < 0 for value in x):
            raise InputMismatch(f"Expected a nonnegative vector, got {tuple(x)}")
        n = self.essentializing_vector(graph)
        omega = tuple(a + b for a, b in zip(x, n.image))
        extension = self.simple_extension(graph, omega)
        if not self.is_essential(extension):
            raise InternalAssertionFailed(f"extension with Wojciech vector {omega} is not essential")
        return extension

    def essential_extension_for_class(self, graph: DirectedMultigraph, x: Sequence[int]) -> OneSinkExtension:
        """Essential extension whose Wojciech vector is ≥ 1 everywhere and lies in the class of x"""
        if len(x) != len(graph.vertices):
            raise InputMismatch(f"Vector has {len(x)} entries, graph has {len(graph.vertices)} vertices")
        self.require_hypotheses(graph)
        shifted = self.graph_service.vertex_matrix(graph).minus_identity()

        total = [0] * len(graph.vertices)
        for v, coefficient in zip(graph.vertices, x):
            n_v = self.positive_vector_at(graph, v)
            weight = abs(int(coefficient)) + 1
            total = [t + weight * a for t, a in zip(total, n_v)]

        omega = tuple(int(a) + b for a, b in zip(x, shifted.apply(total)))
        if any(value < 1 for value in omega):
            raise InternalAssertionFailed(f"Wojciech vector {omega} has an entry below 1")
        logger.info(f"Essential representative for {tuple(x)}: Wojciech vector {omega}")
        return self.simple_extension(graph, omega)

    def ladder_graph(self, m: int) -> DirectedMultigraph:
        """w_1 … w_m, a loop at each w_i and two edges each way between neighbours"""
        if m < 1:
            raise InputMismatch(f"Ladder length must be at least 1, got {m}")
        vertices = [f"w{i}" for i in range(1, m + 1)]
        edges = []
        for i in range(1, m + 1):
            edges.append((f"loop{i}", f"w{i}", f"w{i}"))
            if i < m:
                edges.append((f"up{i}a", f"w{i}", f"w{i + 1}"))
                edges.append((f"up{i}b", f"w{i}", f"w{i + 1}"))
                edges.append((f"down{i}a", f"w{i + 1}", f"w{i}"))
                edges.append((f"down{i}b", f"w{i + 1}", f"w{i}"))
        return DirectedMultigraph.build(vertices, edges)

    def obstruction_check(self, m: int, j: int, graph: Optional[DirectedMultigraph] = None) -> bool:
        """True iff δ_{w_j} is not in the image of A−I for the ladder of length m"""
        if not 1 <= j <= m:
            raise InputMismatch(f"Vertex index {j} outside 1..{m}")
        graph = graph or self.ladder_graph(m)
        shifted = self.graph_service.vertex_matrix(graph).minus_identity()
        return self.linalg_service.solve_in_image(shifted, graph.delta(f"w{j}")) is None

    @staticmethod
    def _fresh_vertex(graph: DirectedMultigraph, wanted: str) -> str:
        candidate, k = wanted, 1
        while candidate in graph.vertex_index:
            candidate = f"{wanted}_{k}"
            k += 1
        return candidate

    @staticmethod
    def _fresh_edge_id(taken: set, wanted: str) -> str:
        candidate, k = wanted, 1
        while candidate in taken:
            candidate = f"{wanted}_{k}"
            k += 1
        taken.add(candidate)
        return candidate
