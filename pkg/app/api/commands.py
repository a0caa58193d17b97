import logging
import os
from typing import Optional, Sequence

from app.models.graph import DirectedMultigraph
from app.models.schemas import (
    CheckResult,
    CommandOutput,
    CounterexampleResult,
    EssentializeResult,
    ExtResult,
    GroupDescription,
    ObstructionResult,
    RunConfig,
    SnfResult,
    SumResult,
    ValidateResult,
    WojciechResult,
)
from app.services.ext_service import ExtService
from app.services.extension_service import ExtensionService
from app.services.graph_service import GraphService
from app.services.linalg_service import CokernelPresentation, LinalgService
from app.utils.exceptions import InternalAssertionFailed
from app.utils.formats import (
    format_matrix,
    format_vector,
    parse_extension,
    parse_graph,
    parse_matrix,
    parse_vector,
    serialize,
    to_dot,
)
from app.utils.output_writer import OutputWriter

logger = logging.getLogger(__name__)

# These will be injected during startup
graph_service: GraphService = None
linalg_service: LinalgService = None
extension_service: ExtensionService = None
ext_service: ExtService = None
output_writer: OutputWriter = None


def set_services(
    g_service: GraphService,
    l_service: LinalgService,
    x_service: ExtensionService,
    e_service: ExtService,
    writer: OutputWriter,
):
    """Set service instances"""
    global graph_service, linalg_service, extension_service, ext_service, output_writer
    graph_service = g_service
    linalg_service = l_service
    extension_service = x_service
    ext_service = e_service
    output_writer = writer


def _group(presentation: CokernelPresentation) -> GroupDescription:
    return GroupDescription(
        description=presentation.describe(),
        invariant_factors=list(presentation.invariant_factors),
        free_rank=presentation.free_rank,
    )


def ext(text: str, name: str, config: RunConfig) -> CommandOutput:
    """Ext(C*(G)) as coker(A−I) and coker(B−I)"""
    graph = parse_graph(text, name)
    group = ext_service.ext_group(graph, force=config.force)
    result = ExtResult(
        vertices=len(graph.vertices),
        edges=len(graph.edges),
        hypotheses_hold=group.hypotheses_hold,
        vertex_cokernel=_group(group.vertex_presentation),
        edge_cokernel=_group(group.edge_presentation),
    )
    lines = [
        f"coker(A-I) = {group.vertex_presentation.describe()}",
        f"coker(B-I) = {group.edge_presentation.describe()}",
        f"Ext(C*(G)) = {group.describe()}",
    ]
    if not group.hypotheses_hold:
        lines.append("warning: hypotheses of the Ext computation do not hold (--force)")
    return CommandOutput(result=result.model_dump(), text="\n".join(lines), dot=to_dot(graph))


def wojciech(text: str, name: str, config: RunConfig) -> CommandOutput:
    """Wojciech vector of an extension and its class in coker(A−I)"""
    extension = parse_extension(text, name)
    # The class is combinatorial, so unmet hypotheses are reported rather than fatal.
    wclass = ext_service.wojciech_class(extension, force=True)
    presentation = wclass.element.presentation
    result = WojciechResult(
        wojciech_vector=list(wclass.vector.entries),
        class_coordinates=list(wclass.element.coordinates()),
        is_zero=wclass.element.is_zero(),
        order=wclass.element.order(),
        essential=wclass.essential,
        hypotheses_hold=wclass.hypotheses_hold,
        boundary_vertices=extension_service.boundary_vertices(extension),
        group=_group(presentation),
    )
    lines = [
        f"{format_vector(result.wojciech_vector)}, {'essential' if result.essential else 'non-essential'}",
        f"class in coker(A-I) = {presentation.describe()}: {'zero' if result.is_zero else 'nonzero'}"
        f" (coordinates {format_vector(result.class_coordinates)})",
    ]
    if not result.essential:
        lines.append("warning: non-essential extension; the class is computed from the Wojciech vector alone")
    if not result.hypotheses_hold:
        lines.append("warning: base graph violates the hypotheses of the Ext computation")
    if config.verbosity >= 1:
        for w in extension.base.vertices:
            for path in ext_service.paths_to_sink(extension, w):
                lines.append(f"  path {w} -> {extension.sink}: {' '.join(path)}")
    return CommandOutput(result=result.model_dump(), text="\n".join(lines), dot=to_dot(extension))


def sum_files(texts: Sequence[str], names: Sequence[str], config: RunConfig) -> CommandOutput:
    """Simple extension whose Wojciech vector is the sum of the inputs'"""
    extensions = [parse_extension(text, name) for text, name in zip(texts, names)]
    total = extensions[0]
    for extension in extensions[1:]:
        total = ext_service.sum_extensions(total, extension)
    omega = ext_service.wojciech_vector(total).entries

    path = output_writer.resolve(config.output, "sum.ext")
    output_writer.write(path, serialize(total, path))
    result = SumResult(
        wojciech_vector=list(omega),
        summands=[list(ext_service.wojciech_vector(e).entries) for e in extensions],
        output=path,
    )
    text = f"sum Wojciech vector {format_vector(omega)} = " + " + ".join(format_vector(s) for s in result.summands)
    return CommandOutput(result=result.model_dump(), text=text, dot=to_dot(total))


def essentialize(text: str, name: str, config: RunConfig) -> CommandOutput:
    """Essential extension in the class of the given vector"""
    graph = parse_graph(text, name)
    x = parse_vector(config.options.get("vector", ""), len(graph.vertices))
    extension = extension_service.essential_extension_for_class(graph, x)
    omega = ext_service.wojciech_vector(extension).entries
    shifted = graph_service.vertex_matrix(graph).minus_identity()
    same_class = linalg_service.coker_equal(shifted, omega, x)
    essential = extension_service.is_essential(extension)
    if not (same_class and essential and min(omega) >= 1):
        raise InternalAssertionFailed(f"essential representative {omega} fails its certificate")

    base_name = os.path.splitext(os.path.basename(name))[0] or "graph"
    path = output_writer.resolve(config.output, f"{base_name}.essential.ext")
    output_writer.write(path, serialize(extension, path))
    result = EssentializeResult(
        vector=list(x),
        wojciech_vector=list(omega),
        minimum_entry=min(omega),
        essential=essential,
        same_class=same_class,
        output=path,
    )
    lines = [
        f"Wojciech vector {format_vector(omega)} (every entry >= {result.minimum_entry})",
        f"essential: {essential}",
        f"[omega_E] = [{format_vector(x)}] in coker(A-I): {same_class}",
    ]
    return CommandOutput(result=result.model_dump(), text="\n".join(lines), dot=to_dot(extension))


def counterexample(m: int, config: RunConfig) -> CommandOutput:
    """Ladder truncation of length m and the even-image obstruction at every w_j"""
    graph = extension_service.ladder_graph(m)
    shifted = graph_service.vertex_matrix(graph).minus_identity()
    presentation = linalg_service.cokernel(shifted)
    all_even = all(shifted[i, j] % 2 == 0 for i in range(shifted.rows) for j in range(shifted.cols))

    obstructions = []
    for j in range(1, m + 1):
        vertex = f"w{j}"
        outside = linalg_service.solve_with(presentation.decomposition, graph.delta(vertex)) is None
        obstructions.append(
            ObstructionResult(
                vertex=vertex,
                outside_image=outside,
                class_order=presentation.element(graph.delta(vertex)).order(),
            )
        )
    result = CounterexampleResult(
        m=m,
        transitive=graph_service.is_transitive(graph),
        condition_L=graph_service.satisfies_condition_L(graph),
        sinks=graph_service.sinks(graph),
        all_entries_even=all_even,
        group=_group(presentation),
        obstructions=obstructions,
    )
    lines = [
        f"ladder graph with {m} vertices: transitive={result.transitive}, "
        f"condition (L)={result.condition_L}, sinks={result.sinks or 'none'}",
        f"every entry of A-I is even: {all_even}",
        f"coker(A-I) = {presentation.describe()}",
    ]
    for item in obstructions:
        verdict = "not in im(A-I)" if item.outside_image else "in im(A-I)"
        order = "infinite" if item.class_order is None else str(item.class_order)
        lines.append(f"  delta_{item.vertex} {verdict}; class order {order}")
    held = sum(1 for item in obstructions if item.outside_image)
    lines.append(f"{held}/{m} obstructions hold")
    return CommandOutput(result=result.model_dump(), text="\n".join(lines), dot=to_dot(graph, name=f"ladder{m}"))


def snf(text: str, name: str, config: RunConfig) -> CommandOutput:
    """Smith normal form U·M·V = S, verified, then written as three matrix files.

    With -o the files go to that directory, otherwise to the output directory;
    they are named after the input, e.g. m.txt gives m.U.txt, m.S.txt and m.V.txt.
    """
    matrix = parse_matrix(text, name)
    presentation = linalg_service.cokernel(matrix)
    decomposition = presentation.decomposition
    decomposition.verify()

    writer = OutputWriter(config.output) if config.output else output_writer
    base_name = os.path.splitext(os.path.basename(name))[0] or "matrix"
    files = {}
    for part, factor in (("U", decomposition.U), ("S", decomposition.S), ("V", decomposition.V)):
        path = writer.resolve(None, f"{base_name}.{part}.txt")
        files[part] = writer.write(path, format_matrix(factor))

    result = SnfResult(
        rows=matrix.rows,
        cols=matrix.cols,
        U=decomposition.U.to_lists(),
        S=decomposition.S.to_lists(),
        V=decomposition.V.to_lists(),
        invariant_factors=list(presentation.invariant_factors),
        free_rank=presentation.free_rank,
        files=files,
    )
    lines = [f"coker = {presentation.describe()}"]
    lines += [f"{part}: {path}" for part, path in files.items()]
    return CommandOutput(result=result.model_dump(), text="\n".join(lines))


def validate(text: str, name: str, config: RunConfig) -> CommandOutput:
    """Report which defining conditions of a 1-sink extension fail"""
    extension = parse_extension(text, name)
    report = extension_service.validate(extension)
    essential: Optional[bool] = None
    if not any(v.condition != 1 for v in report.violations):
        essential = extension_service.is_essential(extension)
    result = ValidateResult(
        valid=report.is_valid,
        violations=[v.model_dump() for v in report.violations],
        essential=essential,
    )
    lines = ["valid 1-sink extension" if report.is_valid else "invalid 1-sink extension"]
    lines += [f"  condition ({v.condition}): {v.message}" for v in report.violations]
    if essential is not None:
        lines.append(f"essential: {essential}")
    return CommandOutput(result=result.model_dump(), text="\n".join(lines), dot=to_dot(extension))


def check(text: str, name: str, config: RunConfig) -> CommandOutput:
    """Structural report: sinks, sources, Condition (L), transitivity"""
    graph = parse_graph(text, name)
    violations = graph_service.hypothesis_violations(graph)
    essentializing = None
    if not violations:
        essentializing = list(extension_service.essentializing_vector(graph).entries)
    result = CheckResult(
        vertices=len(graph.vertices),
        edges=len(graph.edges),
        sinks=graph_service.sinks(graph),
        sources=graph_service.sources(graph),
        condition_L=graph_service.satisfies_condition_L(graph),
        exitless_cycles=graph_service.exitless_cycles(graph),
        transitive=graph_service.is_transitive(graph),
        hypotheses_hold=not violations,
        essentializing_vector=essentializing,
    )
    lines = [
        f"sinks: {', '.join(result.sinks) or 'none'}",
        f"sources: {', '.join(result.sources) or 'none'}",
        f"condition (L): {result.condition_L}",
        f"transitive: {result.transitive}",
        f"hypotheses hold: {result.hypotheses_hold}",
    ]
    lines += [f"  {v}" for v in violations]
    if essentializing is not None:
        lines.append(f"essentializing vector: {format_vector(essentializing)}")
    return CommandOutput(result=result.model_dump(), text="\n".join(lines), dot=to_dot(graph))


def generate(kind: str, config: RunConfig, text: Optional[str] = None, name: Optional[str] = None) -> CommandOutput:
    """Write the ladder truncation or a graph with a sink added at one vertex"""
    if kind == "ladder":
        m = int(config.options["m"])
        item = extension_service.ladder_graph(m)
        default_name = f"ladder{m}.graph"
        summary = {"kind": kind, "m": m, "vertices": len(item.vertices), "edges": len(item.edges)}
    else:
        graph: DirectedMultigraph = parse_graph(text, name)
        vertex = config.options["vertex"]
        item = extension_service.add_sink_at(graph, vertex)
        default_name = f"sink_at_{vertex}.ext"
        summary = {"kind": kind, "vertex": vertex, "essential": extension_service.is_essential(item)}

    path = output_writer.resolve(config.output, default_name)
    output_writer.write(path, serialize(item, path))
    summary["output"] = path
    return CommandOutput(result=summary, text=f"wrote {path}", dot=to_dot(item))
