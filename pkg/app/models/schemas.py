from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field


class EdgeDocument(BaseModel):
    id: Optional[str] = None
    source: str
    range: str


class GraphDocument(BaseModel):
    vertices: List[str] = []
    edges: List[Union[EdgeDocument, List[str]]] = []


class ExtensionDocument(BaseModel):
    base: GraphDocument
    added_vertices: List[str]
    added_edges: List[Union[EdgeDocument, List[str]]] = []
    sink: str


class RunConfig(BaseModel):
    command: str
    inputs: List[str] = []
    output_format: str = "text"
    output: Optional[str] = None
    verbosity: int = 0
    jobs: int = 1
    force: bool = False
    options: Dict[str, Any] = {}


class GroupDescription(BaseModel):
    description: str
    invariant_factors: List[int]
    free_rank: int


class ExtResult(BaseModel):
    vertices: int
    edges: int
    hypotheses_hold: bool
    vertex_cokernel: GroupDescription
    edge_cokernel: GroupDescription


class WojciechResult(BaseModel):
    wojciech_vector: List[int]
    class_coordinates: List[int]
    is_zero: bool
    order: Optional[int] = Field(None, description="None when the class has infinite order")
    essential: bool
    hypotheses_hold: bool
    boundary_vertices: List[str]
    group: GroupDescription


class SumResult(BaseModel):
    wojciech_vector: List[int]
    summands: List[List[int]]
    output: Optional[str] = None


class EssentializeResult(BaseModel):
    vector: List[int]
    wojciech_vector: List[int]
    minimum_entry: int
    essential: bool
    same_class: bool
    output: Optional[str] = None


class ObstructionResult(BaseModel):
    vertex: str
    outside_image: bool
    class_order: Optional[int] = None


class CounterexampleResult(BaseModel):
    m: int
    transitive: bool
    condition_L: bool
    sinks: List[str]
    all_entries_even: bool
    group: GroupDescription
    obstructions: List[ObstructionResult]


class SnfResult(BaseModel):
    rows: int
    cols: int
    U: List[List[int]]
    S: List[List[int]]
    V: List[List[int]]
    invariant_factors: List[int]
    free_rank: int
    files: Dict[str, str] = {}


class ValidateResult(BaseModel):
    valid: bool
    violations: List[Dict[str, Any]]
    essential: Optional[bool] = None


class CheckResult(BaseModel):
    vertices: int
    edges: int
    sinks: List[str]
    sources: List[str]
    condition_L: bool
    exitless_cycles: List[List[str]]
    transitive: bool
    hypotheses_hold: bool
    essentializing_vector: Optional[List[int]] = None


class RunDocument(BaseModel):
    """One self-describing document per processed input"""

    command: str
    input: Optional[str] = None
    input_sha256: Optional[str] = None
    exit_code: int = 0
    error: Optional[str] = None
    result: Optional[Dict[str, Any]] = None
    text: Optional[str] = Field(None, exclude=True)
    dot: Optional[str] = Field(None, exclude=True)


class CommandOutput(BaseModel):
    """What a command produced for one input: the structured result and its renderings"""

    result: Dict[str, Any]
    text: str
    dot: Optional[str] = None
