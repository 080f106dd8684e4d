"""Command line front end.

Exit codes: 0 success (a nonempty review report is still success), 1 input
could not be read or parsed, 2 the ontology has validation defects, 3 the
produced model failed its own consistency check.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .bww import classify
from .cot import ParseError, parse, serialize
from .damlxml import DamlImportError, ImportReport, import_daml
from .emit import (
    emit_bww_json,
    emit_dot,
    emit_model_json,
    emit_plantuml,
    emit_report,
)
from .model import check_model
from .ontology import (
    Ontology,
    collapse_equivalences,
    hoist_axiom_restrictions,
    validate_ontology,
)
from .transform import TransformConfig, derive_model

EMIT_KINDS = ("json", "plantuml", "dot", "report")
_SUFFIXES = {"json": ".model.json", "plantuml": ".puml", "dot": ".dot",
             "report": ".report.md"}
_XML_EXTENSIONS = (".daml", ".rdf", ".xml", ".owl")


class _UsageError(Exception):
    pass


class _InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _info(message: str) -> None:
    print(message, file=sys.stderr)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ont2cm",
                     description="Derive conceptual data models from "
                                 "domain ontologies.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("input", help="ontology file (.cot, or RDF/XML)")
        p.add_argument("--format", choices=("cot", "damlxml"), default=None,
                       help="input format; default guesses from the extension")

    p = sub.add_parser("transform",
                       help="derive a conceptual model and write artifacts")
    add_common(p)
    p.add_argument("--out", default=".", metavar="DIR",
                   help="output directory, or - for standard output")
    p.add_argument("--emit", default=",".join(EMIT_KINDS), metavar="LIST",
                   help="comma-separated subset of json,plantuml,dot,report")
    p.add_argument("--composition-heuristics", choices=("on", "off"),
                   default="on",
                   help="upgrade whole-part associations by property name")
    p.add_argument("--no-instances", action="store_true",
                   help="leave ontology individuals out of the model")

    p = sub.add_parser("classify", help="grade classes on ontological depth")
    add_common(p)
    p.add_argument("--out", default=".", metavar="DIR",
                   help="output directory, or - for standard output")

    p = sub.add_parser("check", help="validate an ontology and exit")
    add_common(p)

    p = sub.add_parser("import", help="convert an RDF/XML ontology")
    p.add_argument("input", help="RDF/XML ontology file")
    p.add_argument("--to", choices=("cot",), default="cot",
                   help="target format")
    p.add_argument("--out", default=".", metavar="DIR",
                   help="output directory, or - for standard output")

    return parser


def _load(path_text: str, fmt: str | None) -> tuple[Ontology, ImportReport | None]:
    path = Path(path_text)
    if fmt is None:
        fmt = "damlxml" if path.suffix.lower() in _XML_EXTENSIONS else "cot"
    try:
        text = path.read_text()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror or exc}")
    if fmt == "damlxml":
        try:
            report = import_daml(text, source_name=path.stem)
        except DamlImportError as exc:
            raise _InputError(f"{path}: {exc}")
        return report.ontology, report
    try:
        return parse(text), None
    except ParseError as exc:
        raise _InputError(f"{path}: {exc}")


def _validated(ontology: Ontology) -> int:
    defects = validate_ontology(ontology)
    for defect in defects:
        _info(f"defect [{defect.kind}] {defect.subject}: {defect.message}")
    return len(defects)


def _write(out: str, filename: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        return
    directory = Path(out)
    directory.mkdir(parents=True, exist_ok=True)
    target = directory / filename
    target.write_text(text)
    _info(f"wrote {target}")


def _emit_list(raw: str) -> list[str]:
    kinds = [k.strip() for k in raw.split(",") if k.strip()]
    if not kinds:
        raise _UsageError("ont2cm: error: --emit needs at least one format")
    unknown = [k for k in kinds if k not in EMIT_KINDS]
    if unknown:
        raise _UsageError(
            f"ont2cm: error: unknown emit format: {', '.join(unknown)}")
    seen: list[str] = []
    for kind in EMIT_KINDS:
        if kind in kinds:
            seen.append(kind)
    return seen


def _cmd_transform(args) -> int:
    kinds = _emit_list(args.emit)
    if args.out == "-" and len(kinds) != 1:
        raise _UsageError("ont2cm: error: --out - needs exactly one "
                          "--emit format")
    ontology, import_report = _load(args.input, args.format)
    if _validated(ontology):
        return 2
    config = TransformConfig(
        composition_heuristics=args.composition_heuristics == "on",
        include_instances=not args.no_instances)
    model, report, _grading, _alias = derive_model(ontology, config=config,
                                                   import_report=import_report)
    defects = check_model(model)
    if defects:
        for defect in defects:
            _info(f"internal defect [{defect.kind}] {defect.subject}: "
                  f"{defect.message}")
        return 3
    _info(f"{model.name}: {len(model.entity_types)} entity type(s), "
          f"{len(model.relationships)} relationship(s), "
          f"{len(report.items)} flag(s) for review")
    stem = Path(args.input).stem
    rendered = {
        "json": lambda: emit_model_json(model),
        "plantuml": lambda: emit_plantuml(model),
        "dot": lambda: emit_dot(model),
        "report": lambda: emit_report(model, report),
    }
    for kind in kinds:
        _write(args.out, stem + _SUFFIXES[kind], rendered[kind]())
    return 0


def _cmd_classify(args) -> int:
    ontology, _ = _load(args.input, args.format)
    if _validated(ontology):
        return 2
    hoisted = hoist_axiom_restrictions(ontology)
    collapsed, _ = collapse_equivalences(hoisted)
    grading = classify(collapsed)
    _write(args.out, Path(args.input).stem + ".bww.json",
           emit_bww_json(grading))
    return 0


def _cmd_check(args) -> int:
    ontology, _ = _load(args.input, args.format)
    count = _validated(ontology)
    if count:
        return 2
    _info(f"{ontology.name}: no defects")
    return 0


def _cmd_import(args) -> int:
    ontology, report = _load(args.input, "damlxml")
    assert report is not None
    _info(f"{ontology.name}: {report.translated_total()} element(s) "
          f"translated, {report.skipped_total()} skipped")
    for note in report.notes:
        _info(f"note: {note}")
    _write(args.out, Path(args.input).stem + ".cot", serialize(ontology))
    return 0


_COMMANDS = {
    "transform": _cmd_transform,
    "classify": _cmd_classify,
    "check": _cmd_check,
    "import": _cmd_import,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _info(str(exc))
        return 1
    except SystemExit as exc:  # --help / --version
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        _info(str(exc))
        return 1
    except _InputError as exc:
        _info(f"error: {exc}")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
