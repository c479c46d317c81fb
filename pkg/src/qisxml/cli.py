"""Command-line entry point: ``qisxml <subcommand> ...``.

Exit status is 0 on success, 1 when validation reports errors and 2 for
usage, input or output problems. XML indices are 1-based everywhere, but
``simulate`` prints 0-based qubit numbers, one ``i = bit`` line each.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, stdlib
from .compiler import compile_qcl
from .errors import BadWidth, QisXmlError, ValidationFailed
from .genadder import USAGE, VERSION, adder_document
from .render import render_circuit_svg, render_gate_svg, report_html, report_validation_html
from .simulator import run_program
from .validation import Severity, errors, report_text, validate
from .xmlio import load_set


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_help(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _add_inputs(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("files", nargs="+" if required else "*", metavar="FILE", help="QIS-XML documents")
    p.add_argument("--no-stdlib", action="store_true", help="do not load the builtin gate and circuit libraries")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qisxml", description="QIS-XML toolchain")
    parser.add_argument("--version", action="version", version=f"qisxml {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check documents and print a findings report")
    _add_inputs(p)
    p.add_argument("--format", choices=("text", "html"), default="text")
    p.add_argument("--strict-unitary", action="store_true", help="also check that gate matrices are unitary")
    p.add_argument("--no-warnings", action="store_true", help="hide warnings")
    p.add_argument("-o", "--output")

    p = sub.add_parser("render", help="draw a circuit or gate as SVG")
    _add_inputs(p, required=False)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--circuit", metavar="ID")
    which.add_argument("--gate", metavar="ID")
    p.add_argument("-o", "--output")

    p = sub.add_parser("report", help="HTML catalog of gates and circuits")
    _add_inputs(p, required=False)
    p.add_argument("--include-builtin", action="store_true")
    p.add_argument("-o", "--output")

    p = sub.add_parser("genadder", help="generate an N-bit ripple-carry adder library")
    p.add_argument("bits", nargs="?", help="number of bits")
    p.add_argument("--version", action="version", version=f"genadder_xml Version {VERSION}")
    p.add_argument("-o", "--output")

    p = sub.add_parser("compile", help="translate a program to QCL")
    _add_inputs(p)
    p.add_argument("--program", required=True, metavar="ID")
    p.add_argument("--target", choices=("qcl",), default="qcl")
    p.add_argument("-o", "--output")

    p = sub.add_parser("simulate", help="run a program on the state-vector simulator")
    _add_inputs(p)
    p.add_argument("--program", required=True, metavar="ID")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mode", choices=("sample", "distribution"), default="sample")
    p.add_argument("--measure-all", action="store_true", help="measure every memory qubit")

    p = sub.add_parser("stdlib", help="builtin library utilities")
    ssub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = ssub.add_parser("export", help="write the builtin libraries to a directory")
    e.add_argument("-o", "--output", required=True, metavar="DIR")
    return parser


def _write(text: str | bytes, output: Optional[str]) -> None:
    if output is None or output == "-":
        if isinstance(text, bytes):
            sys.stdout.buffer.write(text)
            sys.stdout.flush()
        else:
            sys.stdout.write(text)
        return
    path = Path(output)
    if isinstance(text, bytes):
        path.write_bytes(text)
    else:
        path.write_text(text, encoding="utf-8")


def _load(args):
    return load_set(args.files, stdlib=not args.no_stdlib)


def _validate(args) -> int:
    docset = _load(args)
    findings = validate(docset, strict_unitary=args.strict_unitary)
    shown = [f for f in findings if f.severity is Severity.ERROR] if args.no_warnings else findings
    if args.format == "html":
        _write(report_validation_html(shown, docset), args.output)
    else:
        _write(report_text(shown, docset), args.output)
    return 1 if errors(findings) else 0


def _render(args) -> int:
    docset = _load(args)
    if args.gate:
        svg = render_gate_svg(docset.gate(args.gate))
    else:
        svg = render_circuit_svg(docset.circuit(args.circuit), docset)
    _write(svg, args.output)
    return 0


def _genadder(args) -> int:
    if args.bits is None:
        print("Wrong number of operands", USAGE, sep="\n", file=sys.stderr)
        return 2
    try:
        bits = int(args.bits)
    except ValueError:
        print(f"Invalid number of bits: {args.bits}", USAGE, sep="\n", file=sys.stderr)
        return 2
    try:
        doc = adder_document(bits)
    except BadWidth as exc:
        print(exc, USAGE, sep="\n", file=sys.stderr)
        return 2
    _write(doc, args.output)
    return 0


def _simulate(args) -> int:
    docset = _load(args)
    result = run_program(docset.program(args.program), docset, seed=args.seed, mode=args.mode, measure_all=args.measure_all)
    sys.stdout.write("".join(line + "\n" for line in result.lines()))
    return 0


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "validate":
        return _validate(args)
    if cmd == "render":
        return _render(args)
    if cmd == "report":
        docset = _load(args)
        _write(report_html(docset, include_builtin=args.include_builtin), args.output)
        return 0
    if cmd == "genadder":
        return _genadder(args)
    if cmd == "compile":
        docset = _load(args)
        program = docset.program(args.program)
        found = errors(validate(docset))
        if found:
            raise ValidationFailed(found)
        _write(compile_qcl(program, docset), args.output)
        return 0
    if cmd == "simulate":
        return _simulate(args)
    written = stdlib.export(args.output)
    for path in written:
        print(path)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ValidationFailed as exc:
        print(f"qisxml {args.command}: {exc}", file=sys.stderr)
        return 1
    except (QisXmlError, OSError) as exc:
        print(f"qisxml {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
