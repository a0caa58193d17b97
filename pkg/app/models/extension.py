from functools import cached_property
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.graph import DirectedMultigraph, Edge


class OneSinkExtension(BaseModel):
    """A graph E containing the base graph G plus a finite added part H with sink v0.

    Only the structural shape is enforced here (ids unique, endpoints declared,
    sink inside H). The four defining conditions are checked by
    ExtensionService.validate so that invalid extensions can still be reported.
    """

    model_config = ConfigDict(frozen=True)

    base: DirectedMultigraph
    added_vertices: Tuple[str, ...]
    added_edges: Tuple[Edge, ...] = ()
    sink: str

    @model_validator(mode="after")
    def _check_shape(self):
        base_vertices = set(self.base.vertices)
        if len(set(self.added_vertices)) != len(self.added_vertices):
            raise ValueError("added vertex ids must be unique")
        clash = base_vertices.intersection(self.added_vertices)
        if clash:
            raise ValueError(f"added vertices already in the base graph: {sorted(clash)}")
        edge_ids = [e.id for e in self.base.edges] + [e.id for e in self.added_edges]
        if len(set(edge_ids)) != len(edge_ids):
            raise ValueError("edge ids must be unique across base and added edges")
        declared = base_vertices.union(self.added_vertices)
        for edge in self.added_edges:
            if edge.source not in declared or edge.range not in declared:
                raise ValueError(f"added edge {edge.id} joins undeclared vertices {edge.source}->{edge.range}")
        if self.sink not in self.added_vertices:
            raise ValueError(f"sink {self.sink} is not an added vertex")
        return self

    @cached_property
    def graph(self) -> DirectedMultigraph:
        """The whole graph E"""
        return DirectedMultigraph(
            vertices=self.base.vertices + self.added_vertices,
            edges=self.base.edges + self.added_edges,
        )

    @cached_property
    def added_out_edges(self):
        grouped = {v: [] for v in self.graph.vertices}
        for edge in self.added_edges:
            grouped[edge.source].append(edge)
        return {v: tuple(es) for v, es in grouped.items()}


class WojciechVector(BaseModel):
    """Per base vertex w, the number of paths from w to the sink using only added edges"""

    model_config = ConfigDict(frozen=True)

    vertices: Tuple[str, ...]
    entries: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_entries(self):
        if len(self.entries) != len(self.vertices):
            raise ValueError("one entry per base vertex is required")
        if any(x < 0 for x in self.entries):
            raise ValueError("Wojciech vector entries are nonnegative")
        return self

    def __getitem__(self, vertex: str) -> int:
        return self.entries[self.vertices.index(vertex)]


class EssentializingVector(BaseModel):
    """Vector n with (A_G − I)n ≥ 0 reaching a positive coordinate from every vertex"""

    model_config = ConfigDict(frozen=True)

    vertices: Tuple[str, ...]
    entries: Tuple[int, ...]
    image: Tuple[int, ...] = Field(description="(A_G − I)·n")


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    condition: int
    message: str


class ValidationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    violations: Tuple[Violation, ...] = ()

    @property
    def is_valid(self) -> bool:
        return not self.violations

    @property
    def conditions(self) -> List[int]:
        return sorted({v.condition for v in self.violations})
