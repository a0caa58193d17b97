"""Main entry point for the graphext command-line tool."""
import argparse
import asyncio
import hashlib
import logging
import re
import sys
from functools import partial
from typing import List, Optional

from app.api import commands
from app.config import Config
from app.models.schemas import RunConfig, RunDocument
from app.services.batch_service import BatchService
from app.services.ext_service import ExtService
from app.services.extension_service import ExtensionService
from app.services.graph_service import GraphService
from app.services.linalg_service import LinalgService
from app.utils.exceptions import GraphExtError, ParseError
from app.utils.formats import dump_json
from app.utils.output_writer import OutputWriter

logger = logging.getLogger(__name__)

# Commands that take any number of input files and process each one on its own
BATCH_COMMANDS = {
    "ext": commands.ext,
    "wojciech": commands.wojciech,
    "snf": commands.snf,
    "validate": commands.validate,
    "check": commands.check,
}

NEGATIVE_VECTOR = re.compile(r"^-\d+(,-?\d+)*$")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json", "dot"], default=Config.DEFAULT_FORMAT)
    common.add_argument("--jobs", type=int, default=1, help="files processed concurrently")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv SNF steps")
    common.add_argument("--force", action="store_true", help="compute even when the hypotheses fail")
    common.add_argument("-o", "--output", help="path of the file a command writes; a directory for snf")

    parser = argparse.ArgumentParser(
        prog="graphext",
        description="Ext groups of graph C*-algebras as cokernels of A_G - I",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("ext", "Ext(C*(G)) for graph files"),
        ("wojciech", "Wojciech vector and class of extension files"),
        ("snf", "Smith normal form of matrix files"),
        ("validate", "check the 1-sink extension conditions"),
        ("check", "sinks, sources, Condition (L) and transitivity of graph files"),
    ):
        command = sub.add_parser(name, parents=[common], help=help_text)
        command.add_argument("inputs", nargs="+")

    summing = sub.add_parser("sum", parents=[common], help="add extensions over the same base graph")
    summing.add_argument("inputs", nargs="+")

    essential = sub.add_parser("essentialize", parents=[common], help="essential extension in the class of a vector")
    essential.add_argument("graph")
    essential.add_argument("vector", help="comma-separated integers in vertex order")
    # "-5,2" is a vector, not an option
    essential._negative_number_matcher = NEGATIVE_VECTOR

    ladder = sub.add_parser("counterexample", parents=[common], help="non-semiprojectivity obstruction on ladders")
    ladder.add_argument("m", type=int)

    # Options go after the kind: "generate ladder 5 -o ladder5.graph"
    generate = sub.add_parser("generate", help="write example graphs")
    kinds = generate.add_subparsers(dest="kind", required=True)
    generate_ladder = kinds.add_parser("ladder", parents=[common])
    generate_ladder.add_argument("m", type=int)
    generate_sink = kinds.add_parser("add-sink", parents=[common])
    generate_sink.add_argument("graph")
    generate_sink.add_argument("vertex")
    return parser


def configure_logging(verbosity: int) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, Config.LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def init_services() -> None:
    """Create the services and inject them into the command handlers"""
    graph_service = GraphService()
    linalg_service = LinalgService()
    extension_service = ExtensionService(graph_service, linalg_service)
    ext_service = ExtService(graph_service, linalg_service, extension_service)
    commands.set_services(graph_service, linalg_service, extension_service, ext_service, OutputWriter())


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}")


def _run_single(command: str, paths: List[str], run) -> RunDocument:
    """Run a command whose inputs belong together; the hash covers all of them"""
    digest = hashlib.sha256()
    try:
        texts = []
        for path in paths:
            raw = _read(path)
            digest.update(raw)
            texts.append(raw.decode("utf-8"))
        output = run(texts)
    except UnicodeDecodeError as e:
        return RunDocument(command=command, input=",".join(paths) or None, exit_code=2, error=str(e))
    except GraphExtError as e:
        logger.error(e.detail)
        return RunDocument(
            command=command,
            input=",".join(paths) or None,
            input_sha256=digest.hexdigest() if paths else None,
            exit_code=e.exit_code,
            error=e.detail,
        )
    return RunDocument(
        command=command,
        input=",".join(paths) or None,
        input_sha256=digest.hexdigest() if paths else None,
        result=output.result,
        text=output.text,
        dot=output.dot,
    )


def execute(config: RunConfig, args: argparse.Namespace) -> List[RunDocument]:
    if config.command in BATCH_COMMANDS:
        handler = partial(_call_with_config, BATCH_COMMANDS[config.command], config)
        return asyncio.run(BatchService(config.command, handler).run(config.inputs, config.jobs))
    if config.command == "sum":
        return [_run_single("sum", config.inputs, lambda texts: commands.sum_files(texts, config.inputs, config))]
    if config.command == "essentialize":
        return [
            _run_single(
                "essentialize", config.inputs, lambda texts: commands.essentialize(texts[0], config.inputs[0], config)
            )
        ]
    if config.command == "counterexample":
        return [_run_single("counterexample", [], lambda texts: commands.counterexample(args.m, config))]
    # generate
    if args.kind == "ladder":
        return [_run_single("generate", [], lambda texts: commands.generate("ladder", config))]
    return [
        _run_single(
            "generate", config.inputs, lambda texts: commands.generate("add-sink", config, texts[0], config.inputs[0])
        )
    ]


def _call_with_config(handler, config: RunConfig, text: str, name: str):
    return handler(text, name, config)


def render(config: RunConfig, documents: List[RunDocument]) -> None:
    if config.output_format == "json":
        document = {
            "tool": "graphext",
            "command": config.command,
            "documents": [d.model_dump() for d in documents],
        }
        sys.stdout.write(dump_json(document))
        return

    for document in documents:
        if len(documents) > 1:
            print(f"== {document.input}")
        if document.exit_code:
            print(f"error: {document.error}", file=sys.stderr)
            continue
        if config.output_format == "dot" and document.dot:
            sys.stdout.write(document.dot)
        else:
            print(document.text)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    options = {}
    inputs = list(getattr(args, "inputs", []) or [])
    if args.command == "essentialize":
        inputs = [args.graph]
        options["vector"] = args.vector
    elif args.command == "generate":
        if args.kind == "ladder":
            options["m"] = args.m
        else:
            inputs = [args.graph]
            options["vertex"] = args.vertex

    config = RunConfig(
        command=args.command,
        inputs=inputs,
        output_format=args.format,
        output=args.output,
        verbosity=args.verbose,
        jobs=args.jobs,
        force=args.force,
        options=options,
    )

    init_services()
    try:
        documents = execute(config, args)
    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}", exc_info=True)
        return 1

    render(config, documents)
    return max((d.exit_code for d in documents), default=0)


if __name__ == "__main__":
    sys.exit(main())
