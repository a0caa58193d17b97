from functools import cached_property
from typing import Dict, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.utils.exceptions import InputMismatch, UnknownVertex


class Edge(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    source: str
    range: str


class DirectedMultigraph(BaseModel):
    """Finite directed multigraph G = (G^0, G^1, r, s).

    Vertex and edge order is the declaration order and fixes the row/column
    indexing of every matrix built from the graph.
    """

    model_config = ConfigDict(frozen=True)

    vertices: Tuple[str, ...] = ()
    edges: Tuple[Edge, ...] = ()

    @model_validator(mode="after")
    def _check_structure(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertex ids must be unique")
        edge_ids = [edge.id for edge in self.edges]
        if len(set(edge_ids)) != len(edge_ids):
            raise ValueError("edge ids must be unique")
        declared = set(self.vertices)
        for edge in self.edges:
            if edge.source not in declared or edge.range not in declared:
                raise ValueError(f"edge {edge.id} joins undeclared vertices {edge.source}->{edge.range}")
        return self

    @classmethod
    def build(cls, vertices: Sequence[str], edges: Sequence[Tuple]) -> "DirectedMultigraph":
        """Build from (source, range) pairs or (id, source, range) triples.

        Pairs get generated ids "e<k>", counting up and skipping the ids of triples.
        """
        declared = {item[0] for item in edges if len(item) == 3}
        built, k = [], 0
        for item in edges:
            if len(item) == 2:
                while f"e{k}" in declared:
                    k += 1
                built.append(Edge(id=f"e{k}", source=item[0], range=item[1]))
                k += 1
            else:
                built.append(Edge(id=item[0], source=item[1], range=item[2]))
        return cls(vertices=tuple(vertices), edges=tuple(built))

    @cached_property
    def vertex_index(self) -> Dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> Dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def edges_by_id(self) -> Dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def out_edges(self) -> Dict[str, Tuple[Edge, ...]]:
        """Edges leaving each vertex, in declaration order"""
        grouped: Dict[str, List[Edge]] = {v: [] for v in self.vertices}
        for edge in self.edges:
            grouped[edge.source].append(edge)
        return {v: tuple(es) for v, es in grouped.items()}

    @cached_property
    def in_edges(self) -> Dict[str, Tuple[Edge, ...]]:
        grouped: Dict[str, List[Edge]] = {v: [] for v in self.vertices}
        for edge in self.edges:
            grouped[edge.range].append(edge)
        return {v: tuple(es) for v, es in grouped.items()}

    def index_of(self, vertex: str) -> int:
        try:
            return self.vertex_index[vertex]
        except KeyError:
            raise UnknownVertex(vertex)

    def require_vertex(self, vertex: str) -> None:
        self.index_of(vertex)

    def delta(self, vertex: str) -> Tuple[int, ...]:
        """Indicator vector of a vertex"""
        index = self.index_of(vertex)
        return tuple(1 if i == index else 0 for i in range(len(self.vertices)))

    def make_path(self, edge_ids: Sequence[str]) -> "Path":
        """Validate that the edges compose and return the path"""
        if not edge_ids:
            raise InputMismatch("A path needs at least one edge")
        for edge_id in edge_ids:
            if edge_id not in self.edges_by_id:
                raise InputMismatch(f"Unknown edge: {edge_id}")
        for first, second in zip(edge_ids, edge_ids[1:]):
            if self.edges_by_id[first].range != self.edges_by_id[second].source:
                raise InputMismatch(f"Edges {first} and {second} do not compose")
        return Path(edges=tuple(edge_ids))


class Path(BaseModel):
    """Nonempty sequence of composable edges; build through DirectedMultigraph.make_path"""

    model_config = ConfigDict(frozen=True)

    edges: Tuple[str, ...] = Field(min_length=1)

    @property
    def length(self) -> int:
        return len(self.edges)
