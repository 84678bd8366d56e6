import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv

from models.bounds import Bounds
from models.graph import Graph
from models.presentation import MaterializedCategory, Unknown
from models.realization import OrthoStatus, RealizationResult
from models.sketch import LimitSketch
from utils.errors import SketchError
from utils.factorization import fibrancy, orthogonal_to_cells, realize
from utils.gluing import identity_map
from utils.paths import edges_spec, free_category_homs
from utils.set_models import enumerate_models, is_model, model_bijection, yoneda_model
from utils.sketch_parser import parse_sketch, print_sketch
from utils.sketch_service import is_realized
from utils.word_problem import materialize_within
from components.report_component import (
    category_as_dict, hom_size_table, human, model_as_dict, model_summary_table, model_table,
    morphism_table, path_table, realization_as_dict, sketch_as_dict, structured, verdict_as_dict,
)

EXIT_OK = 0
EXIT_UNDECIDED = 1
EXIT_ERROR = 2

_BOUND_FLAGS = ("max_iter", "max_word_len", "max_morphisms", "max_size")


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with one subcommand per pipeline."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-iter", type=int, help="saturation pass budget (default 16)")
    common.add_argument("--max-word-len", type=int, help="word length bound (default 8)")
    common.add_argument("--max-morphisms", type=int, help="morphism budget (default 512)")
    common.add_argument("--max-size", type=int, help="largest model carrier (default 2)")
    common.add_argument("--include-trivial", action="store_true", help="keep trivial-cone cells")
    common.add_argument("--format", choices=["human", "structured"], default="human")
    common.add_argument("--trace", metavar="FILE", help="write the saturation trace to FILE")
    common.add_argument("--debug", action="store_true", help="verbose logging")

    parser = argparse.ArgumentParser(prog="sketch", description="Limit sketches and their universal realizations")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("parse", parents=[common], help="check a sketch file and print it back")
    p.add_argument("file")

    p = commands.add_parser("free-cat", parents=[common], help="enumerate paths or materialize the base")
    p.add_argument("file")
    p.add_argument("--from", dest="source", help="source object")
    p.add_argument("--to", dest="target", help="target object")

    p = commands.add_parser("realize", parents=[common], help="compute the universal realization")
    p.add_argument("file")

    p = commands.add_parser("check-realized", parents=[common], help="are the specified cones limit cones")
    p.add_argument("file")

    p = commands.add_parser("models", parents=[common], help="enumerate finite-set models")
    p.add_argument("file")
    p.add_argument("--realized", action="store_true", help="enumerate models of the realization instead")

    p = commands.add_parser("transport", parents=[common], help="compare models of E and of its realization")
    p.add_argument("file")

    p = commands.add_parser("orthogonal", parents=[common], help="check the generating cells against * ")
    p.add_argument("file")
    p.add_argument("--against", choices=["realized", "base"], default="realized")

    p = commands.add_parser("yoneda", parents=[common], help="hom-model of an object of the realization")
    p.add_argument("file")
    p.add_argument("--object", required=True, dest="obj")
    return parser


def bounds_from_args(args: argparse.Namespace) -> Bounds:
    """Environment budgets overridden by command-line flags."""
    values = Bounds.from_env().model_dump()
    for field in _BOUND_FLAGS:
        value = getattr(args, field, None)
        if value is not None:
            values[field] = value
    values["include_trivial"] = bool(getattr(args, "include_trivial", False))
    return Bounds(**values)


def load_sketch(path: str, bounds: Bounds) -> LimitSketch:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_sketch(text, bounds).sketch


def _emit(args: argparse.Namespace, document: Dict[str, Any], text: str) -> str:
    return structured(document) if args.format == "structured" else text


def _realize(s: LimitSketch, args: argparse.Namespace, bounds: Bounds) -> RealizationResult:
    r = realize(s, bounds.max_iter, bounds)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as f:
            f.write(r.trace_lines())
        logging.info(f"Trace written to {args.trace}")
    return r


def cmd_parse(args: argparse.Namespace, bounds: Bounds) -> Tuple[int, str]:
    s = load_sketch(args.file, bounds)
    return EXIT_OK, _emit(args, {"sketch": sketch_as_dict(s)}, print_sketch(s))


def cmd_free_cat(args: argparse.Namespace, bounds: Bounds) -> Tuple[int, str]:
    s = load_sketch(args.file, bounds)
    p = s.base
    if args.source or args.target:
        spec = edges_spec(p)
        graph = Graph(vertices=p.objects, edges=tuple(spec),
                      src={e: st[0] for e, st in spec.items()}, tgt={e: st[1] for e, st in spec.items()})
        source = args.source or args.target
        target = args.target or args.source
        paths = free_category_homs(graph, source, target, bounds.max_word_len)
        document = {"from": source, "to": target, "max_len": bounds.max_word_len,
                    "paths": [str(path) for path in paths]}
        return EXIT_OK, _emit(args, document, human(f"{len(paths)} paths {source} -> {target}",
                                                    [path_table(paths)]))
    c = materialize_within(p, bounds)
    if not isinstance(c, MaterializedCategory):
        document = {"status": "Diverged", "reason": c.reason, "witness": str(c.witness) if c.witness else None}
        return EXIT_UNDECIDED, _emit(args, document, human(f"Diverged: {c.reason}"))
    text = human(f"{c.size} morphisms", [hom_size_table(c), morphism_table(c)])
    return EXIT_OK, _emit(args, {"status": "Materialized", "category": category_as_dict(c)}, text)


def cmd_realize(args: argparse.Namespace, bounds: Bounds) -> Tuple[int, str]:
    s = load_sketch(args.file, bounds)
    r = _realize(s, args, bounds)
    lines = [f"iterations: {r.iterations}", f"events: {len(r.trace)}"]
    tables = []
    if r.category is not None:
        lines.append(f"morphisms: {r.category.size}")
        tables.append(hom_size_table(r.category))
    text = human(r.status.value, tables, lines) + print_sketch(r.realized)
    code = EXIT_OK if r.is_stabilized else EXIT_UNDECIDED
    return code, _emit(args, realization_as_dict(r), text)


def cmd_check_realized(args: argparse.Namespace, bounds: Bounds) -> Tuple[int, str]:
    s = load_sketch(args.file, bounds)
    verdict = is_realized(s, bounds)
    if isinstance(verdict, Unknown):
        return EXIT_UNDECIDED, _emit(args, {"realized": None, "reason": verdict.reason},
                                     human(f"unknown: {verdict.reason}"))
    value = "true" if verdict else "false"
    return EXIT_OK, _emit(args, {"realized": verdict}, human(value))


def cmd_models(args: argparse.Namespace, bounds: Bounds) -> Tuple[int, str]:
    s = load_sketch(args.file, bounds)
    if args.realized:
        r = _realize(s, args, bounds)
        if not r.is_stabilized:
            return EXIT_UNDECIDED, _emit(args, {"status": r.status.value}, human(r.status.value))
        s = r.realized
    models = enumerate_models(s, bounds.max_size)
    document = {"max_size": bounds.max_size, "count": len(models),
                "models": [model_as_dict(m) for m in models]}
    return EXIT_OK, _emit(args, document, human(f"{len(models)} models", [model_summary_table(models)]))


def cmd_transport(args: argparse.Namespace, bounds: Bounds) -> Tuple[int, str]:
    s = load_sketch(args.file, bounds)
    r = _realize(s, args, bounds)
    if not r.is_stabilized:
        return EXIT_UNDECIDED, _emit(args, {"status": r.status.value}, human(r.status.value))
    report = model_bijection(r, bounds.max_size)
    document = {"max_size": bounds.max_size, "models_e": len(report.models_e),
                "models_free": len(report.models_free), "pairing": report.pairing,
                "bijective": report.is_bijection}
    lines = [f"models of E: {len(report.models_e)}", f"models of free(E): {len(report.models_free)}",
             f"pairing: {report.pairing}"]
    return EXIT_OK, _emit(args, document, human(f"bijective: {str(report.is_bijection).lower()}", lines=lines))


def cmd_orthogonal(args: argparse.Namespace, bounds: Bounds) -> Tuple[int, str]:
    s = load_sketch(args.file, bounds)
    if args.against == "realized":
        r = _realize(s, args, bounds)
        if not r.is_stabilized:
            return EXIT_UNDECIDED, _emit(args, {"status": r.status.value}, human(r.status.value))
        results = fibrancy(r, bounds, bounds.include_trivial)
    else:
        results = orthogonal_to_cells(s, identity_map(s.base), bounds, bounds.include_trivial)
    rows = [verdict_as_dict(f"{cell.y}/{cell.alpha}", verdict) for cell, verdict in results]
    statuses = {verdict.status for _, verdict in results}
    code = EXIT_UNDECIDED if OrthoStatus.UNKNOWN in statuses else EXIT_OK
    lines = [f"{row['cell']}: {row['status']}" for row in rows]
    orthogonal = all(verdict.is_orthogonal for _, verdict in results)
    return code, _emit(args, {"against": args.against, "cells": rows, "orthogonal": orthogonal},
                       human(f"orthogonal: {str(orthogonal).lower()}", lines=lines))


def cmd_yoneda(args: argparse.Namespace, bounds: Bounds) -> Tuple[int, str]:
    s = load_sketch(args.file, bounds)
    r = _realize(s, args, bounds)
    if not r.is_stabilized:
        return EXIT_UNDECIDED, _emit(args, {"status": r.status.value}, human(r.status.value))
    m = yoneda_model(r.realized, args.obj, bounds)
    if isinstance(m, Unknown):
        return EXIT_UNDECIDED, _emit(args, {"model": None, "reason": m.reason}, human(f"unknown: {m.reason}"))
    valid = is_model(r.realized, m)
    lines = [f"{x}: {', '.join(m.labels[x]) or '(empty)'}" for x in m.carrier]
    return EXIT_OK, _emit(args, {"object": args.obj, "model": model_as_dict(m), "is_model": valid},
                          human(f"Hom({args.obj}, -), is_model: {str(valid).lower()}", [model_table(m)], lines))


COMMANDS = {
    "parse": cmd_parse,
    "free-cat": cmd_free_cat,
    "realize": cmd_realize,
    "check-realized": cmd_check_realized,
    "models": cmd_models,
    "transport": cmd_transport,
    "orthogonal": cmd_orthogonal,
    "yoneda": cmd_yoneda,
}


def run_command(argv: Sequence[str]) -> Tuple[int, str]:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name

    Returns:
        (exit code, output text): 0 on success, 1 when undecided within the budgets, 2 on errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return (e.code if isinstance(e.code, int) else EXIT_ERROR), ""

    if args.debug or os.getenv("DEBUG", "").lower() == "true":
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        bounds = bounds_from_args(args)
        return COMMANDS[args.command](args, bounds)
    except SketchError as e:
        logging.error(f"{args.command} failed: {str(e)}")
        return EXIT_ERROR, f"error: {str(e)}\n"
    except (OSError, ValueError) as e:
        logging.error(f"{args.command} failed: {str(e)}")
        return EXIT_ERROR, f"error: {str(e)}\n"


def main(argv: Optional[List[str]] = None) -> None:
    """Command-line entry point."""
    load_dotenv()
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    code, output = run_command(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(output)
    sys.exit(code)


if __name__ == "__main__":
    main()
