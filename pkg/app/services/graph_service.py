import logging
from typing import List, Set

import networkx as nx

from app.models.graph import DirectedMultigraph
from app.models.matrix import IntMatrix

logger = logging.getLogger(__name__)


class GraphService:
    """Structural predicates and incidence matrices of finite directed multigraphs"""

    def to_networkx(self, graph: DirectedMultigraph) -> nx.MultiDiGraph:
        """MultiDiGraph with one keyed edge per graph edge"""
        nx_graph = nx.MultiDiGraph()
        nx_graph.add_nodes_from(graph.vertices)
        for edge in graph.edges:
            nx_graph.add_edge(edge.source, edge.range, key=edge.id)
        return nx_graph

    def vertex_matrix(self, graph: DirectedMultigraph) -> IntMatrix:
        """A_G(v, w) = number of edges from v to w"""
        n = len(graph.vertices)
        counts = [[0] * n for _ in range(n)]
        index = graph.vertex_index
        for edge in graph.edges:
            counts[index[edge.source]][index[edge.range]] += 1
        return IntMatrix(n, n, counts)

    def edge_matrix(self, graph: DirectedMultigraph) -> IntMatrix:
        """B_G(e, f) = 1 iff r(e) = s(f)"""
        m = len(graph.edges)
        return IntMatrix(
            m,
            m,
            [[1 if e.range == f.source else 0 for f in graph.edges] for e in graph.edges],
        )

    def source_matrix(self, graph: DirectedMultigraph) -> IntMatrix:
        """S_G(v, e) = 1 iff s(e) = v; vertices × edges"""
        return IntMatrix(
            len(graph.vertices),
            len(graph.edges),
            [[1 if e.source == v else 0 for e in graph.edges] for v in graph.vertices],
        )

    def range_matrix(self, graph: DirectedMultigraph) -> IntMatrix:
        """R_G(e, v) = 1 iff r(e) = v; edges × vertices"""
        return IntMatrix(
            len(graph.edges),
            len(graph.vertices),
            [[1 if e.range == v else 0 for v in graph.vertices] for e in graph.edges],
        )

    def reaches_strict(self, graph: DirectedMultigraph, v: str, w: str) -> bool:
        """True iff a path of length ≥ 1 runs from v to w"""
        graph.require_vertex(v)
        graph.require_vertex(w)
        nx_graph = self.to_networkx(graph)
        for successor in nx_graph.successors(v):
            if successor == w or w in nx.descendants(nx_graph, successor):
                return True
        return False

    def reaches(self, graph: DirectedMultigraph, v: str, w: str) -> bool:
        """Reflexive reachability: v = w, or a path runs from v to w"""
        graph.require_vertex(v)
        graph.require_vertex(w)
        if v == w:
            return True
        return w in nx.descendants(self.to_networkx(graph), v)

    def reachable_set(self, graph: DirectedMultigraph, v: str) -> Set[str]:
        """Every w with reaches(v, w), v included"""
        graph.require_vertex(v)
        return nx.descendants(self.to_networkx(graph), v) | {v}

    def sinks(self, graph: DirectedMultigraph) -> List[str]:
        return [v for v in graph.vertices if not graph.out_edges[v]]

    def sources(self, graph: DirectedMultigraph) -> List[str]:
        return [v for v in graph.vertices if not graph.in_edges[v]]

    def exitless_cycles(self, graph: DirectedMultigraph) -> List[List[str]]:
        """Vertex sets of the cycles that have no exit.

        A cycle has no exit exactly when its strongly connected component is
        cyclic and each of its vertices emits a single edge, so one pass over
        the SCC decomposition finds them all.
        """
        nx_graph = self.to_networkx(graph)
        found = []
        for component in nx.strongly_connected_components(nx_graph):
            members = [v for v in graph.vertices if v in component]
            cyclic = len(members) > 1 or nx_graph.has_edge(members[0], members[0])
            if cyclic and all(len(graph.out_edges[v]) == 1 for v in members):
                found.append(members)
        found.sort(key=lambda members: graph.vertex_index[members[0]])
        return found

    def satisfies_condition_L(self, graph: DirectedMultigraph) -> bool:
        """Every loop has an exit"""
        return not self.exitless_cycles(graph)

    def is_transitive(self, graph: DirectedMultigraph) -> bool:
        """Every vertex reaches every other vertex"""
        if len(graph.vertices) <= 1:
            return True
        return nx.is_strongly_connected(self.to_networkx(graph))

    def hypothesis_violations(self, graph: DirectedMultigraph) -> List[str]:
        """Unmet hypotheses of the Ext computation: no sinks and Condition (L)"""
        violations = []
        sinks = self.sinks(graph)
        if sinks:
            violations.append(f"graph has sinks ({', '.join(sinks)})")
        cycles = self.exitless_cycles(graph)
        if cycles:
            shown = ", ".join("{" + " ".join(c) + "}" for c in cycles)
            violations.append(f"Condition (L) fails (loop without exit on {shown})")
        return violations
