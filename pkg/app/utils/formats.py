"""Readers and writers for graph, extension and matrix files.

Graph text format::

    # comment
    vertex w1
    edge e1 w1 w2        # "edge w1 w2" gets the id e<k>

Extension text format: a graph block followed by ``sink``, ``addvertex`` and
``addedge`` lines. The structured format is one JSON or YAML document.
"""
import json
import os
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import yaml
from pydantic import ValidationError

from app.models.extension import OneSinkExtension
from app.models.graph import DirectedMultigraph, Edge
from app.models.matrix import IntMatrix
from app.models.schemas import EdgeDocument, ExtensionDocument, GraphDocument
from app.utils.exceptions import InputMismatch, ParseError


def _lines(text: str) -> Iterable[Tuple[int, List[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            yield number, tokens


def is_structured(text: str) -> bool:
    """JSON or YAML mapping rather than the line format"""
    for _, tokens in _lines(text):
        head = tokens[0]
        return head.startswith("{") or head.endswith(":")
    return False


# (id or None, source, range)
EdgeEntry = Tuple[Optional[str], str, str]


class _AutoIds:
    """Hands out e0, e1, ... skipping every id the file declares explicitly"""

    def __init__(self, entries: Iterable[EdgeEntry]):
        self.declared = {edge_id for edge_id, _, _ in entries if edge_id is not None}
        self.k = 0

    def take(self) -> str:
        while f"e{self.k}" in self.declared:
            self.k += 1
        edge_id = f"e{self.k}"
        self.k += 1
        return edge_id

    def edges(self, entries: Iterable[EdgeEntry]) -> Tuple[Edge, ...]:
        return tuple(
            Edge(id=edge_id if edge_id is not None else self.take(), source=source, range=target)
            for edge_id, source, target in entries
        )


def _edge_entry(item: Union[EdgeDocument, List[str]]) -> EdgeEntry:
    if isinstance(item, EdgeDocument):
        return item.id, item.source, item.range
    if len(item) == 2:
        return None, item[0], item[1]
    if len(item) == 3:
        return item[0], item[1], item[2]
    raise ParseError(f"Edge entry {item} needs [source, range] or [id, source, range]")


def _load_structured(text: str, name: str) -> dict:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ParseError(f"{name}: not a valid JSON/YAML document: {e}")
    if not isinstance(data, dict):
        raise ParseError(f"{name}: expected a mapping at the top level")
    return data


def parse_graph(text: str, name: str = "<input>") -> DirectedMultigraph:
    """Read a graph from the line format or a structured document"""
    try:
        if is_structured(text):
            document = GraphDocument.model_validate(_load_structured(text, name))
            entries = [_edge_entry(item) for item in document.edges]
            return DirectedMultigraph(vertices=tuple(document.vertices), edges=_AutoIds(entries).edges(entries))

        vertices, entries, rest = _parse_graph_lines(text, name)
        if rest:
            number, tokens = rest[0]
            raise ParseError(f"{name}:{number}: unexpected '{tokens[0]}' in a graph file")
        return DirectedMultigraph(vertices=tuple(vertices), edges=_AutoIds(entries).edges(entries))
    except ValidationError as e:
        raise ParseError(f"{name}: invalid graph: {e.errors()[0]['msg']}")


def _parse_graph_lines(text: str, name: str):
    """Graph block of a line-format file: vertices, edge entries and the unconsumed lines"""
    vertices: List[str] = []
    entries: List[EdgeEntry] = []
    rest = []
    for number, tokens in _lines(text):
        keyword = tokens[0]
        if keyword == "vertex":
            if len(tokens) != 2:
                raise ParseError(f"{name}:{number}: expected 'vertex <id>'")
            vertices.append(tokens[1])
        elif keyword == "edge":
            if len(tokens) == 3:
                entries.append((None, tokens[1], tokens[2]))
            elif len(tokens) == 4:
                entries.append((tokens[1], tokens[2], tokens[3]))
            else:
                raise ParseError(f"{name}:{number}: expected 'edge [<id>] <source> <range>'")
        else:
            rest.append((number, tokens))
    return vertices, entries, rest


def parse_extension(text: str, name: str = "<input>") -> OneSinkExtension:
    """Read a 1-sink extension from the line format or a structured document"""
    try:
        if is_structured(text):
            document = ExtensionDocument.model_validate(_load_structured(text, name))
            base_entries = [_edge_entry(item) for item in document.base.edges]
            added_entries = [_edge_entry(item) for item in document.added_edges]
            ids = _AutoIds(base_entries + added_entries)
            base = DirectedMultigraph(vertices=tuple(document.base.vertices), edges=ids.edges(base_entries))
            return OneSinkExtension(
                base=base,
                added_vertices=tuple(document.added_vertices),
                added_edges=ids.edges(added_entries),
                sink=document.sink,
            )

        vertices, base_entries, rest = _parse_graph_lines(text, name)
        added_vertices: List[str] = []
        added_entries: List[EdgeEntry] = []
        sink = None
        for number, tokens in rest:
            keyword = tokens[0]
            if keyword == "sink" and len(tokens) == 2:
                if sink is not None:
                    raise ParseError(f"{name}:{number}: sink declared twice")
                sink = tokens[1]
            elif keyword == "addvertex" and len(tokens) == 2:
                added_vertices.append(tokens[1])
            elif keyword == "addedge" and len(tokens) == 3:
                added_entries.append((None, tokens[1], tokens[2]))
            elif keyword == "addedge" and len(tokens) == 4:
                added_entries.append((tokens[1], tokens[2], tokens[3]))
            else:
                raise ParseError(f"{name}:{number}: cannot read '{' '.join(tokens)}'")
        if sink is None:
            raise ParseError(f"{name}: missing 'sink <id>' line")
        if sink not in added_vertices:
            added_vertices.append(sink)

        ids = _AutoIds(base_entries + added_entries)
        try:
            base = DirectedMultigraph(vertices=tuple(vertices), edges=ids.edges(base_entries))
        except ValidationError as e:
            raise ParseError(f"{name}: invalid graph: {e.errors()[0]['msg']}")
        return OneSinkExtension(
            base=base,
            added_vertices=tuple(added_vertices),
            added_edges=ids.edges(added_entries),
            sink=sink,
        )
    except ValidationError as e:
        raise ParseError(f"{name}: invalid extension: {e.errors()[0]['msg']}")


def _token(value: str, what: str) -> str:
    """A vertex or edge id as one token of the line format"""
    if not value or "#" in value or any(c.isspace() for c in value):
        raise InputMismatch(f"{what} '{value}' cannot be written in the line format; use a .json or .yaml file")
    return value


def format_graph(graph: DirectedMultigraph) -> str:
    lines = [f"vertex {_token(v, 'vertex')}" for v in graph.vertices]
    lines += [f"edge {_token(e.id, 'edge id')} {e.source} {e.range}" for e in graph.edges]
    return "\n".join(lines) + "\n"


def format_extension(extension: OneSinkExtension) -> str:
    lines = [format_graph(extension.base).rstrip("\n"), f"sink {_token(extension.sink, 'vertex')}"]
    lines += [f"addvertex {_token(h, 'vertex')}" for h in extension.added_vertices if h != extension.sink]
    lines += [f"addedge {_token(e.id, 'edge id')} {e.source} {e.range}" for e in extension.added_edges]
    return "\n".join(line for line in lines if line) + "\n"


def graph_document(graph: DirectedMultigraph) -> dict:
    return {
        "vertices": list(graph.vertices),
        "edges": [{"id": e.id, "source": e.source, "range": e.range} for e in graph.edges],
    }


def extension_document(extension: OneSinkExtension) -> dict:
    return {
        "base": graph_document(extension.base),
        "added_vertices": list(extension.added_vertices),
        "added_edges": [{"id": e.id, "source": e.source, "range": e.range} for e in extension.added_edges],
        "sink": extension.sink,
    }


def serialize(item: Union[DirectedMultigraph, OneSinkExtension], path: str) -> str:
    """Contents of a graph or extension file; the suffix of path picks JSON, YAML or the line format"""
    suffix = os.path.splitext(path)[1].lower()
    if isinstance(item, OneSinkExtension):
        document, line_format = extension_document, format_extension
    else:
        document, line_format = graph_document, format_graph
    if suffix == ".json":
        return dump_json(document(item))
    if suffix in (".yaml", ".yml"):
        return yaml.safe_dump(document(item), sort_keys=False)
    return line_format(item)


def dump_json(document) -> str:
    """Deterministic JSON: sorted keys, fixed separators"""
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _dot_id(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(item: Union[DirectedMultigraph, OneSinkExtension], name: str = "G") -> str:
    """Graphviz DOT; added vertices and edges of an extension are drawn dashed in red"""
    if isinstance(item, OneSinkExtension):
        graph, added_vertices, added_edges = item.base, item.added_vertices, item.added_edges
    else:
        graph, added_vertices, added_edges = item, (), ()

    lines = [f"digraph {_dot_id(name)} {{"]
    lines += [f"  {_dot_id(v)};" for v in graph.vertices]
    for h in added_vertices:
        lines.append(f"  {_dot_id(h)} [style=dashed, color=red];")
    for e in graph.edges:
        lines.append(f"  {_dot_id(e.source)} -> {_dot_id(e.range)} [label={_dot_id(e.id)}];")
    for e in added_edges:
        lines.append(f"  {_dot_id(e.source)} -> {_dot_id(e.range)} [label={_dot_id(e.id)}, style=dashed, color=red];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, name: str = "<input>") -> IntMatrix:
    """First line 'rows cols', then rows of space-separated integers"""
    lines = list(_lines(text))
    if not lines:
        raise ParseError(f"{name}: empty matrix file")
    number, header = lines[0]
    try:
        rows, cols = (int(token) for token in header)
    except ValueError:
        raise ParseError(f"{name}:{number}: expected 'rows cols'")
    if rows < 0 or cols < 0:
        raise ParseError(f"{name}:{number}: negative matrix shape")
    body = lines[1:]
    if cols == 0:
        return IntMatrix.zeros(rows, 0)
    if len(body) != rows:
        raise ParseError(f"{name}: expected {rows} rows, found {len(body)}")
    entries = []
    for number, tokens in body:
        if len(tokens) != cols:
            raise ParseError(f"{name}:{number}: expected {cols} entries, found {len(tokens)}")
        try:
            entries.append([int(token) for token in tokens])
        except ValueError:
            raise ParseError(f"{name}:{number}: non-integer entry")
    return IntMatrix(rows, cols, entries)


def format_matrix(matrix: IntMatrix) -> str:
    lines = [f"{matrix.rows} {matrix.cols}"]
    lines += [" ".join(str(x) for x in matrix.row(i)) for i in range(matrix.rows) if matrix.cols]
    return "\n".join(lines) + "\n"


def parse_vector(text: str, length: Optional[int] = None) -> Tuple[int, ...]:
    """Comma-separated integers in vertex declaration order"""
    text = text.strip().strip("()")
    try:
        vector = tuple(int(token) for token in text.split(",")) if text else ()
    except ValueError:
        raise ParseError(f"Cannot read vector '{text}': expected comma-separated integers")
    if length is not None and len(vector) != length:
        raise ParseError(f"Vector has {len(vector)} entries, expected {length}")
    return vector


def format_vector(vector: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in vector) + ")"
