"""SVG diagrams of gates and circuits, and HTML catalog and validation pages.

Geometry is fixed so output is byte-stable: wires 40 units apart, one
60-unit column per step, 32x32 gate boxes, 20-unit margins and an 80-unit
label gutter on each side.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import DanglingReference
from .model import Circuit, CircuitRef, Gate, Map, Operation
from .validation import Finding, Severity, describe_operation, entity_tag, report_text, summary
from .xmlio import DocumentSet

SVG_NS = "http://www.w3.org/2000/svg"


@dataclass(frozen=True)
class Layout:
    wire_spacing: int = 40
    column_width: int = 60
    box: int = 32
    margin: int = 20
    label_width: int = 80
    dot_radius: int = 5
    oplus_radius: int = 11
    font: str = "sans-serif"

    def wire_y(self, qubit: int) -> float:
        return self.margin + self.wire_spacing * (qubit - 1) + self.wire_spacing / 2

    def column_x(self, step: int) -> float:
        return self.margin + self.label_width + self.column_width * (step - 1) + self.column_width / 2

    def size(self, wires: int, columns: int) -> tuple[int, int]:
        width = 2 * (self.margin + self.label_width) + self.column_width * columns
        height = 2 * self.margin + self.wire_spacing * max(wires, 1)
        return width, height


LAYOUT = Layout()

STYLE = (
    ".wire,.connector{stroke:#000;stroke-width:1}"
    ".gate,.circuit-box{fill:#fff;stroke:#000;stroke-width:1}"
    ".control{fill:#000}"
    ".target-oplus{fill:#fff;stroke:#000;stroke-width:1}"
    ".swap{stroke:#000;stroke-width:1.5}"
    "text{font-size:12px;text-anchor:middle;dominant-baseline:middle}"
    ".label-in{text-anchor:end}.label-out{text-anchor:start}"
)


def _n(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:.2f}"


def _el(parent: ET.Element, tag: str, text: Optional[str] = None, **attrs) -> ET.Element:
    el = ET.SubElement(parent, tag, {k.rstrip("_").replace("_", "-"): (_n(v) if isinstance(v, (int, float)) else v) for k, v in attrs.items()})
    if text is not None:
        el.text = text
    return el


def _svg_root(width: int, height: int, font: str) -> ET.Element:
    root = ET.Element(
        "svg",
        {
            "xmlns": SVG_NS,
            "version": "1.1",
            "width": str(width),
            "height": str(height),
            "viewBox": f"0 0 {width} {height}",
            "font-family": font,
        },
    )
    _el(root, "style", STYLE)
    return root


def _svg_bytes(root: ET.Element) -> str:
    ET.indent(root, space="  ")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


# -- drawing ---------------------------------------------------------------------


def _resolve(op: Operation, docset: Optional[DocumentSet]):
    target = op.target
    if isinstance(target, Gate):
        return target
    kind = "circuit" if isinstance(target, CircuitRef) else "gate"
    if docset is None:
        raise DanglingReference(target.id, kind)
    return docset.resolve(target, kind)


def _box(g: ET.Element, x: float, top: float, bottom: float, label: str, cls: str, lay: Layout) -> None:
    half = lay.box / 2
    y0, y1 = top - half, bottom + half
    _el(g, "rect", class_=cls, x=x - half, y=y0, width=lay.box, height=y1 - y0)
    _el(g, "text", label, x=x, y=(y0 + y1) / 2)


def _draw_operation(g: ET.Element, op: Operation, x: float, docset: Optional[DocumentSet], lay: Layout) -> None:
    target = _resolve(op, docset)
    dagger = "†" if op.reverse else ""
    wires = {m.input: m.qubit for m in op.maps if m.qubit is not None}
    fixed = [m for m in op.maps if m.fixed_value is not None]
    ys = [lay.wire_y(q) for q in wires.values()]
    bottom_wire = max(ys) if ys else lay.margin + lay.wire_spacing / 2
    for k, m in enumerate(fixed):
        # constant input: short stub under the operation with its value
        y = bottom_wire + lay.wire_spacing / 2 + 8 * k
        _el(g, "line", class_="fixed-stub", x1=x - 8, y1=y, x2=x, y2=y)
        _el(g, "text", str(m.fixed_value), class_="fixed-value", x=x - 12, y=y)
    if not ys:
        return
    if isinstance(target, Circuit):
        _box(g, x, min(ys), max(ys), (target.id or target.name or "circuit") + dagger, "circuit-box", lay)
        return
    hint = target.render_hint
    if hint is None:
        _box(g, x, min(ys), max(ys), target.label + dagger, "gate", lay)
        return
    if len(ys) > 1:
        _el(g, "line", class_="connector", x1=x, y1=min(ys), x2=x, y2=max(ys))
    for inp in hint.control_inputs:
        if inp in wires:
            _el(g, "circle", class_="control", cx=x, cy=lay.wire_y(wires[inp]), r=lay.dot_radius)
    targets = [lay.wire_y(q) for i, q in sorted(wires.items()) if i not in hint.control_inputs]
    if not targets:
        return
    if hint.target_glyph == "oplus":
        r = lay.oplus_radius
        for y in targets:
            _el(g, "circle", class_="target-oplus", cx=x, cy=y, r=r)
            _el(g, "line", class_="connector", x1=x - r, y1=y, x2=x + r, y2=y)
            _el(g, "line", class_="connector", x1=x, y1=y - r, x2=x, y2=y + r)
    elif hint.target_glyph == "swap-cross":
        d = 6
        for y in targets:
            _el(g, "path", class_="swap", d=f"M{_n(x - d)},{_n(y - d)}L{_n(x + d)},{_n(y + d)}M{_n(x - d)},{_n(y + d)}L{_n(x + d)},{_n(y - d)}")
    elif hint.target_glyph == "dot":
        for y in targets:
            _el(g, "circle", class_="control", cx=x, cy=y, r=lay.dot_radius)
    else:
        _box(g, x, min(targets), max(targets), (hint.label or target.label) + dagger, "gate", lay)
        return
    if dagger:
        _el(g, "text", dagger, class_="dagger", x=x + lay.box / 2, y=min(targets) - lay.box / 2)


def _draw_wires(root: ET.Element, size: int, columns: int, inputs, outputs, lay: Layout) -> None:
    width, _ = lay.size(size, columns)
    names_in = {l.qubit: l.name for l in inputs}
    names_out = {l.qubit: l.name for l in outputs}
    for q in range(1, size + 1):
        y = lay.wire_y(q)
        x0, x1 = lay.margin + lay.label_width, width - lay.margin - lay.label_width
        _el(root, "line", class_="wire", x1=x0, y1=y, x2=x1, y2=y)
        if q in names_in:
            _el(root, "text", names_in[q], class_="label-in", x=x0 - 4, y=y)
        if q in names_out:
            _el(root, "text", names_out[q], class_="label-out", x=x1 + 4, y=y)


def render_circuit_svg(circuit: Circuit, docset: Optional[DocumentSet] = None, layout: Layout = LAYOUT) -> str:
    """Standalone SVG of a circuit: one wire per qubit, one column per step."""
    steps = len(circuit.steps)
    width, height = layout.size(circuit.size, steps)
    root = _svg_root(width, height, layout.font)
    title = circuit.name or circuit.id
    if title:
        _el(root, "title", title)
    _draw_wires(root, circuit.size, steps, circuit.inputs, circuit.outputs, layout)
    for s, step in enumerate(circuit.steps, 1):
        g = _el(root, "g", class_="column", data_step=str(s))
        for op in step:
            _draw_operation(g, op, layout.column_x(s), docset, layout)
    return _svg_bytes(root)


def render_gate_svg(gate: Gate, layout: Layout = LAYOUT) -> str:
    """One-column drawing of a gate on its own wires, captioned with its name."""
    width, height = layout.size(gate.size, 1)
    height += layout.margin
    root = _svg_root(width, height, layout.font)
    _el(root, "title", gate.name)
    _draw_wires(root, gate.size, 1, (), (), layout)
    g = _el(root, "g", class_="column", data_step="1")
    op = Operation(tuple(Map(i, i) for i in range(1, gate.size + 1)), gate)
    _draw_operation(g, op, layout.column_x(1), None, layout)
    _el(root, "text", gate.name, class_="caption", x=width / 2, y=height - layout.margin)
    return _svg_bytes(root)


# -- HTML ----------------------------------------------------------------------------

PAGE_STYLE = (
    "body{font-family:sans-serif}"
    "table.matrix{border-collapse:collapse}"
    "table.matrix td{border:1px solid #999;padding:2px 6px;text-align:center}"
    ".error{color:#b00000;font-weight:bold}"
    ".warning{color:#a06000}"
)


def _page(title: str) -> tuple[ET.Element, ET.Element]:
    html = ET.Element("html")
    head = _el(html, "head")
    _el(head, "meta", charset="utf-8")
    _el(head, "title", title)
    _el(head, "style", PAGE_STYLE)
    body = _el(html, "body")
    _el(body, "h1", title)
    return html, body


def _html_text(html: ET.Element) -> str:
    ET.indent(html, space="  ")
    return "<!DOCTYPE html>\n" + ET.tostring(html, encoding="unicode", method="xml") + "\n"


def matrix_entries(gate: Gate) -> list[list[str]]:
    """Display text of every matrix entry, symbolic text kept verbatim, blanks as 0."""
    dim = gate.transformation.dim
    grid = [["0"] * dim for _ in range(dim)]
    for cell in gate.transformation.cells:
        if 1 <= cell.row <= dim and 1 <= cell.col <= dim:
            grid[cell.row - 1][cell.col - 1] = cell.value.display("html")
    return grid


def _gate_section(body: ET.Element, gate: Gate) -> None:
    sec = _el(body, "section", class_="gate", id=f"gate-{gate.id}")
    _el(sec, "h2", gate.name)
    dl = _el(sec, "dl")
    for term, value in (
        ("ID", gate.id),
        ("Nickname", gate.nickname),
        ("Description", gate.description),
        ("Parameters", ", ".join(p.name for p in gate.parameters) or None),
        ("Size", str(gate.size)),
    ):
        if value:
            _el(dl, "dt", term)
            _el(dl, "dd", value)
    mult = gate.transformation.multiplier
    if mult is not None:
        _el(sec, "p", mult.display("html"), class_="multiplier")
    table = _el(sec, "table", class_="matrix")
    for row in matrix_entries(gate):
        tr = _el(table, "tr")
        for text in row:
            _el(tr, "td", text)


def _circuit_section(body: ET.Element, circuit: Circuit, tag: str, docset: DocumentSet) -> None:
    sec = _el(body, "section", class_="circuit", id=f"circuit-{tag}")
    _el(sec, "h2", circuit.name or tag)
    if circuit.description:
        _el(sec, "p", circuit.description)
    _el(sec, "p", f"Size {circuit.size}, {len(circuit.steps)} step(s)")
    ol = _el(sec, "ol", class_="steps")
    for step in circuit.steps:
        li = _el(ol, "li")
        ul = _el(li, "ul")
        for op in step:
            _el(ul, "li", describe_operation(op, docset))


def report_html(docset: DocumentSet, include_builtin: bool = False) -> str:
    """Catalog page: each gate with its matrix, then each circuit's steps."""
    html, body = _page("QIS-XML gates and circuits")
    for entry in docset.entries("gate"):
        if include_builtin or not entry.source.startswith("builtin:"):
            _gate_section(body, entry.entity)
    for entry in docset.entries("circuit"):
        if include_builtin or not entry.source.startswith("builtin:"):
            _circuit_section(body, entry.entity, entity_tag(entry), docset)
    return _html_text(html)


def report_validation_html(findings: Iterable[Finding], docset: Optional[DocumentSet] = None) -> str:
    """HTML form of the text validation report, errors and warnings styled apart."""
    findings = list(findings)
    html, body = _page("QIS-XML validation report")
    _el(body, "p", summary(findings), class_="summary")
    if docset is not None:
        pre = _el(body, "div", class_="report")
        for line in report_text(findings, docset).splitlines():
            if line.startswith("ERROR:"):
                _el(pre, "p", line, class_="error")
            elif line.startswith("Warning:"):
                _el(pre, "p", line, class_="warning")
            else:
                _el(pre, "p", line)
        return _html_text(html)
    ul = _el(body, "ul", class_="findings")
    for f in findings:
        cls = "error" if f.severity is Severity.ERROR else "warning"
        _el(ul, "li", f"{f.location}: {f.message}", class_=cls)
    return _html_text(html)


__all__ = [
    "LAYOUT",
    "Layout",
    "matrix_entries",
    "render_circuit_svg",
    "render_gate_svg",
    "report_html",
    "report_validation_html",
]
