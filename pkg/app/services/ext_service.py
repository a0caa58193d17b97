import logging
from functools import lru_cache
from typing import Dict, List, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict

from app.config import Config
from app.models.extension import OneSinkExtension, WojciechVector
from app.models.graph import DirectedMultigraph
from app.models.matrix import IntMatrix
from app.services.extension_service import ExtensionService
from app.services.graph_service import GraphService
from app.services.linalg_service import CokerElement, CokernelPresentation, LinalgService
from app.utils.exceptions import HypothesisViolated, InputMismatch, InternalAssertionFailed

logger = logging.getLogger(__name__)


class ExtGroup(BaseModel):
    """Ext(C*(G)) presented as coker(A_G − I), alongside coker(B_G − I)"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    graph: DirectedMultigraph
    vertex_presentation: CokernelPresentation
    edge_presentation: CokernelPresentation
    source_matrix: IntMatrix
    range_matrix: IntMatrix
    hypotheses_hold: bool = True

    def describe(self) -> str:
        return self.vertex_presentation.describe()

    def vertex_class(self, vector) -> CokerElement:
        return self.vertex_presentation.element(vector)

    def edge_class(self, vector) -> CokerElement:
        return self.edge_presentation.element(vector)


class WojciechClass(BaseModel):
    """[ω_E] in coker(A_G − I) together with the flags the computation depends on"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vector: WojciechVector
    element: CokerElement
    essential: bool
    hypotheses_hold: bool


class ExtService:
    """Ext groups of graph algebras and the Wojciech class calculus"""

    def __init__(
        self,
        graph_service: GraphService,
        linalg_service: LinalgService,
        extension_service: ExtensionService,
    ):
        self.graph_service = graph_service
        self.linalg_service = linalg_service
        self.extension_service = extension_service
        self._cached_group = lru_cache(maxsize=Config.CACHE_SIZE)(self._compute_group)

    def ext_group(self, graph: DirectedMultigraph, force: bool = False) -> ExtGroup:
        """Both cokernel presentations of Ext(C*(G)).

        Raises HypothesisViolated when G has sinks or fails Condition (L), unless
        force is set, in which case the presentations are computed anyway.
        """
        return self._cached_group(graph, force)

    def _compute_group(self, graph: DirectedMultigraph, force: bool) -> ExtGroup:
        violations = self.graph_service.hypothesis_violations(graph)
        if violations and not force:
            raise HypothesisViolated(violations)
        for violation in violations:
            logger.warning(f"Computing cokernels although {violation}")

        vertex_presentation = self.linalg_service.cokernel(self.graph_service.vertex_matrix(graph).minus_identity())
        edge_presentation = self.linalg_service.cokernel(self.graph_service.edge_matrix(graph).minus_identity())
        if not vertex_presentation.same_group(edge_presentation):
            raise InternalAssertionFailed(
                f"coker(A−I) = {vertex_presentation.describe()} but coker(B−I) = {edge_presentation.describe()}"
            )

        group = ExtGroup(
            graph=graph,
            vertex_presentation=vertex_presentation,
            edge_presentation=edge_presentation,
            source_matrix=self.graph_service.source_matrix(graph),
            range_matrix=self.graph_service.range_matrix(graph),
            hypotheses_hold=not violations,
        )
        logger.info(f"Ext(C*(G)) = {group.describe()} for a graph with {len(graph.vertices)} vertices and {len(graph.edges)} edges")
        return group

    def induced_S_bar(self, group: ExtGroup, element: CokerElement) -> CokerElement:
        """coker(B_G − I) -> coker(A_G − I), [u] ↦ [S_G u]"""
        if element.presentation.matrix != group.edge_presentation.matrix:
            raise InputMismatch("Class does not belong to coker(B_G − I) of this graph")
        return group.vertex_class(group.source_matrix.apply(element.representative))

    def induced_R_bar(self, group: ExtGroup, element: CokerElement) -> CokerElement:
        """coker(A_G − I) -> coker(B_G − I), [y] ↦ [R_G y]"""
        if element.presentation.matrix != group.vertex_presentation.matrix:
            raise InputMismatch("Class does not belong to coker(A_G − I) of this graph")
        return group.edge_class(group.range_matrix.apply(element.representative))

    def _path_counts(self, extension: OneSinkExtension) -> Dict[str, int]:
        """Number of paths from each added vertex to the sink (the sink counts its empty path)"""
        self.extension_service.require_structure(extension)
        dag = nx.MultiDiGraph()
        dag.add_nodes_from(extension.added_vertices)
        dag.add_edges_from((e.source, e.range) for e in extension.added_edges if e.source in dag)

        counts: Dict[str, int] = {}
        for h in reversed(list(nx.topological_sort(dag))):
            if h == extension.sink:
                counts[h] = 1
            else:
                counts[h] = sum(counts[e.range] for e in extension.added_out_edges[h])
        return counts

    def wojciech_vector(self, extension: OneSinkExtension) -> WojciechVector:
        """ω_E(w) = number of paths from w to v0 whose edges are all added edges"""
        counts = self._path_counts(extension)
        entries = tuple(
            sum(counts[e.range] for e in extension.added_out_edges[w]) for w in extension.base.vertices
        )
        return WojciechVector(vertices=extension.base.vertices, entries=entries)

    def paths_to_sink(self, extension: OneSinkExtension, w: str) -> List[Tuple[str, ...]]:
        """Explicit list of the paths counted by ω_E(w), as edge-id tuples"""
        extension.graph.require_vertex(w)
        self.extension_service.require_structure(extension)
        found: List[Tuple[str, ...]] = []
        stack = [(w, ())]
        while stack:
            here, path = stack.pop()
            if path and here == extension.sink:
                found.append(path)
                continue
            for edge in reversed(extension.added_out_edges[here]):
                stack.append((edge.range, path + (edge.id,)))
        return found

    def wojciech_class(self, extension: OneSinkExtension, force: bool = False) -> WojciechClass:
        """[ω_E] in coker(A_G − I); non-essential extensions are flagged, not rejected"""
        group = self.ext_group(extension.base, force=force)
        vector = self.wojciech_vector(extension)
        essential = self.extension_service.is_essential(extension)
        if not essential:
            logger.warning(f"Extension with Wojciech vector {vector.entries} is not essential")
        return WojciechClass(
            vector=vector,
            element=group.vertex_class(vector.entries),
            essential=essential,
            hypotheses_hold=group.hypotheses_hold,
        )

    def edge_class_vector(self, extension: OneSinkExtension) -> Tuple[int, ...]:
        """x(e) = ω_E(r(e)) for each base edge e"""
        omega = self.wojciech_vector(extension)
        index = extension.base.vertex_index
        return tuple(omega.entries[index[e.range]] for e in extension.base.edges)

    def edge_class(self, extension: OneSinkExtension, force: bool = False) -> CokerElement:
        """[x] in coker(B_G − I) for x = edge_class_vector(E); S̄ maps it to [ω_E]"""
        group = self.ext_group(extension.base, force=force)
        return group.edge_class(self.edge_class_vector(extension))

    def sum_extensions(self, first: OneSinkExtension, second: OneSinkExtension) -> OneSinkExtension:
        """Simple extension whose Wojciech vector is ω_{E1} + ω_{E2}"""
        if first.base != second.base:
            raise InputMismatch("Extensions have different base graphs")
        total = tuple(
            a + b for a, b in zip(self.wojciech_vector(first).entries, self.wojciech_vector(second).entries)
        )
        logger.info(f"Sum of extensions has Wojciech vector {total}")
        return self.extension_service.simple_extension(first.base, total)
