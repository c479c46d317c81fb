"""Reading and writing QIS-XML documents.

Two input dialects are understood and map onto the same model:

* the early single-schema form (``<QIS>``, ``<Gate>`` or ``<Circuit>`` root,
  no namespace, ``<Identification id="..."/>`` attributes), and
* the modular form with the ``qis:*:1_0`` namespaces and element-style
  identification (``<r:Identification><r:ID>...``).

Output is always the modular form.
"""

from __future__ import annotations

import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .errors import (
    Ambiguous,
    BadAttribute,
    DocumentError,
    DuplicateId,
    LoadError,
    NotFound,
    UnknownElement,
    UnknownNamespace,
    XmlSyntax,
)
from .model import (
    Circuit,
    CircuitLibrary,
    CircuitRef,
    ComplexValue,
    Document,
    Execute,
    Gate,
    GateLibrary,
    GateRef,
    GLYPHS,
    Identification,
    Instance,
    Label,
    Library,
    Map,
    MatrixCell,
    Measure,
    Memory,
    Operation,
    Parameter,
    Prepare,
    Program,
    ProgramLibrary,
    ProgramRef,
    QubitRange,
    QubitSet,
    QubitState,
    Reference,
    Register,
    RegisterRef,
    RenderHint,
    UnitaryTransformation,
    libraries_of,
)

NAMESPACES = {
    "i": "qis:instance:1_0",
    "g": "qis:gate:1_0",
    "c": "qis:circuit:1_0",
    "p": "qis:program:1_0",
    "r": "qis:reusable:1_0",
}
XSI = "http://www.w3.org/2001/XMLSchema-instance"
_KNOWN_URIS = set(NAMESPACES.values()) | {""}

for _prefix, _uri in NAMESPACES.items():
    ET.register_namespace(_prefix, _uri)
ET.register_namespace("xsi", XSI)


# -- reading -------------------------------------------------------------------


def _split(tag: str) -> tuple[str, str]:
    if tag.startswith("{"):
        uri, local = tag[1:].split("}", 1)
        return uri, local
    return "", tag


class _Node:
    """An element plus its path, with strict child/attribute access."""

    def __init__(self, el: ET.Element, path: str) -> None:
        self.el = el
        self.path = path
        uri, self.name = _split(el.tag)
        if uri not in _KNOWN_URIS:
            raise UnknownNamespace(uri, path)

    def children(self, allowed: Iterable[str]) -> Iterator["_Node"]:
        allowed = set(allowed)
        counts: dict[str, int] = {}
        for child in self.el:
            if not isinstance(child.tag, str):
                continue
            _, local = _split(child.tag)
            counts[local] = counts.get(local, 0) + 1
            node = _Node(child, f"{self.path}/{local}[{counts[local]}]")
            if local not in allowed:
                raise UnknownElement(local, node.path)
            yield node

    def attrs(self, allowed: Iterable[str] = ()) -> dict[str, str]:
        allowed = set(allowed)
        out = {}
        for key, value in self.el.attrib.items():
            uri, local = _split(key)
            if uri == XSI:
                continue
            if uri or local not in allowed:
                raise BadAttribute(local, value, self.path, "attribute not allowed here")
            out[local] = value
        return out

    @property
    def text(self) -> str:
        return (self.el.text or "").strip()

    def int_attr(self, attrs: dict[str, str], name: str, required: bool = True) -> Optional[int]:
        raw = attrs.get(name)
        if raw is None:
            if required:
                raise BadAttribute(name, None, self.path, "required attribute missing")
            return None
        try:
            return int(raw.strip())
        except ValueError:
            raise BadAttribute(name, raw, self.path, "expected an integer") from None

    def float_attr(self, attrs: dict[str, str], name: str) -> Optional[float]:
        raw = attrs.get(name)
        if raw is None:
            return None
        try:
            return float(raw.strip())
        except ValueError:
            raise BadAttribute(name, raw, self.path, "expected a number") from None

    def int_text(self) -> int:
        try:
            return int(self.text)
        except ValueError:
            raise DocumentError(f"expected an integer at {self.path}, found {self.text!r}") from None

    def fail(self, detail: str) -> DocumentError:
        return DocumentError(f"{detail} at {self.path}")


def _bool(node: _Node, attrs: dict[str, str], name: str) -> bool:
    raw = attrs.get(name)
    if raw is None:
        return False
    if raw.strip() in ("true", "1"):
        return True
    if raw.strip() in ("false", "0"):
        return False
    raise BadAttribute(name, raw, node.path, "expected a boolean")


def _read_identification(node: _Node) -> Identification:
    attrs = node.attrs(("id", "agency", "version"))
    values = {"id": attrs.get("id"), "agency": attrs.get("agency"), "version": attrs.get("version")}
    for child in node.children(("ID", "AgencyID", "Version")):
        key = {"ID": "id", "AgencyID": "agency", "Version": "version"}[child.name]
        values[key] = child.text
    if not values["id"]:
        raise node.fail("identification without an ID")
    return Identification(**values)


def _read_reference(node: _Node, cls: type[Reference]) -> Reference:
    attrs = node.attrs(("id", "library", "agency", "version", "URI", "uri"))
    values = {
        "id": attrs.get("id"),
        "library_id": attrs.get("library"),
        "agency_id": attrs.get("agency"),
        "version": attrs.get("version"),
        "uri": attrs.get("URI", attrs.get("uri")),
    }
    keys = {"ID": "id", "LibraryID": "library_id", "AgencyID": "agency_id", "Version": "version"}
    for child in node.children(keys):
        values[keys[child.name]] = child.text
    if not values["id"]:
        raise node.fail("reference without an ID")
    return cls(**values)


def _read_complex(node: _Node, extra: Iterable[str] = ()) -> tuple[ComplexValue, dict[str, str]]:
    attrs = node.attrs(("r", "i", *extra))
    symbolic = []
    for child in node.children(("Symbolic",)):
        sattrs = child.attrs(("syntax",))
        syntax = sattrs.get("syntax", "").strip()
        if not syntax:
            raise BadAttribute("syntax", sattrs.get("syntax"), child.path, "symbolic syntax tag required")
        symbolic.append((syntax, child.text))
    value = ComplexValue(node.float_attr(attrs, "r"), node.float_attr(attrs, "i"), tuple(symbolic))
    return value, attrs


def _read_transformation(node: _Node) -> UnitaryTransformation:
    attrs = node.attrs(("size",))
    size = node.int_attr(attrs, "size")
    if size < 1:
        raise BadAttribute("size", attrs["size"], node.path, "size must be at least 1")
    multiplier = None
    cells = []
    for child in node.children(("Multiplier", "Cell")):
        if child.name == "Multiplier":
            if multiplier is not None:
                raise child.fail("second Multiplier")
            multiplier, _ = _read_complex(child)
        else:
            value, cattrs = _read_complex(child, ("row", "col"))
            cells.append(MatrixCell(child.int_attr(cattrs, "row"), child.int_attr(cattrs, "col"), value))
    return UnitaryTransformation(size, tuple(cells), multiplier)


def _read_render_hint(node: _Node) -> RenderHint:
    attrs = node.attrs(("glyph", "label"))
    glyph = attrs.get("glyph", "box")
    if glyph not in GLYPHS:
        raise BadAttribute("glyph", glyph, node.path, f"expected one of {', '.join(GLYPHS)}")
    controls = []
    for child in node.children(("Control",)):
        controls.append(child.int_attr(child.attrs(("input",)), "input"))
    return RenderHint(tuple(controls), glyph, attrs.get("label"))


def _read_gate(node: _Node) -> Gate:
    node.attrs()
    ident = None
    name = nickname = description = None
    params = []
    transformation = None
    hint = None
    for child in node.children(
        ("Identification", "Name", "Nickname", "Description", "Parameter", "Transformation", "RenderHint")
    ):
        if child.name == "Identification":
            ident = _read_identification(child)
        elif child.name == "Name":
            name = child.text
        elif child.name == "Nickname":
            nickname = child.text
        elif child.name == "Description":
            description = child.text
        elif child.name == "Parameter":
            child.attrs()
            pname = pdesc = None
            for pc in child.children(("Name", "Description")):
                if pc.name == "Name":
                    pname = pc.text
                else:
                    pdesc = pc.text
            if not pname:
                raise child.fail("parameter without a Name")
            params.append(Parameter(pname, pdesc))
        elif child.name == "Transformation":
            if transformation is not None:
                raise child.fail("gate must contain a single Transformation; found a second")
            transformation = _read_transformation(child)
        else:
            hint = _read_render_hint(child)
    if ident is None:
        raise node.fail("gate without Identification")
    if transformation is None:
        raise node.fail("gate must contain a single Transformation; found none")
    return Gate(
        identification=ident,
        name=name if name is not None else ident.id,
        transformation=transformation,
        nickname=nickname,
        description=description,
        parameters=tuple(params),
        render_hint=hint,
    )


def _read_label(node: _Node) -> Label:
    attrs = node.attrs(("qubit",))
    name = ""
    for child in node.children(("Name",)):
        name = child.text
    return Label(node.int_attr(attrs, "qubit"), name)


def _read_operation(node: _Node) -> Operation:
    attrs = node.attrs(("reverse",))
    maps = []
    bindings = []
    targets = []
    for child in node.children(("Map", "Gate", "GateRef", "Circuit", "CircuitRef", "ParameterBinding")):
        if child.name == "Map":
            mattrs = child.attrs(("qubit", "input", "value"))
            qubit = child.int_attr(mattrs, "qubit", required=False)
            value = child.int_attr(mattrs, "value", required=False)
            if (qubit is None) == (value is None):
                raise BadAttribute("qubit", mattrs.get("qubit"), child.path, "a Map needs exactly one of qubit or value")
            if value not in (None, 0, 1):
                raise BadAttribute("value", mattrs["value"], child.path, "fixed value must be 0 or 1")
            maps.append(Map(child.int_attr(mattrs, "input"), qubit, value))
        elif child.name == "ParameterBinding":
            battrs = child.attrs(("name", "value"))
            if not battrs.get("name"):
                raise BadAttribute("name", None, child.path, "binding needs a parameter name")
            value = child.float_attr(battrs, "value")
            if value is None:
                raise BadAttribute("value", None, child.path, "binding needs a value")
            bindings.append((battrs["name"], value))
        elif child.name == "GateRef":
            targets.append(_read_reference(child, GateRef))
        elif child.name == "CircuitRef":
            targets.append(_read_reference(child, CircuitRef))
        elif child.name == "Gate":
            # <Gate><GateRef/></Gate> wraps a reference; anything else is an inline gate
            kids = [k for k in child.el if isinstance(k.tag, str)]
            if len(kids) == 1 and _split(kids[0].tag)[1] == "GateRef":
                child.attrs()
                (ref_node,) = child.children(("GateRef",))
                targets.append(_read_reference(ref_node, GateRef))
            else:
                targets.append(_read_gate(child))
        else:
            child.attrs()
            refs = list(child.children(("CircuitRef",)))
            if len(refs) != 1:
                raise child.fail("a Circuit inside an operation must wrap exactly one CircuitRef")
            targets.append(_read_reference(refs[0], CircuitRef))
    if len(targets) != 1:
        raise node.fail(f"operation needs exactly one gate or circuit target, found {len(targets)}")
    if not maps:
        raise node.fail("operation without Map")
    return Operation(tuple(maps), targets[0], _bool(node, attrs, "reverse"), tuple(bindings))


def _read_circuit(node: _Node) -> Circuit:
    attrs = node.attrs(("size",))
    size = node.int_attr(attrs, "size")
    if size < 1:
        raise BadAttribute("size", attrs["size"], node.path, "size must be at least 1")
    ident = name = description = None
    inputs, outputs, steps = [], [], []
    for child in node.children(("Identification", "Name", "Description", "Input", "Output", "Step")):
        if child.name == "Identification":
            ident = _read_identification(child)
        elif child.name == "Name":
            name = child.text
        elif child.name == "Description":
            description = child.text
        elif child.name == "Input":
            inputs.append(_read_label(child))
        elif child.name == "Output":
            outputs.append(_read_label(child))
        else:
            child.attrs()
            steps.append(tuple(_read_operation(op) for op in child.children(("Operation",))))
    return Circuit(size, tuple(steps), ident, name, description, tuple(inputs), tuple(outputs))


def _read_prepare(node: _Node) -> Prepare:
    node.attrs()
    sets = []
    for qs in node.children(("QubitSet",)):
        qs.attrs()
        indexes = []
        value = None
        for child in qs.children(("QubitIndex", "Value")):
            if child.name == "QubitIndex":
                child.attrs()
                indexes.append(child.int_text())
            else:
                value, _ = _read_complex(child)
        if value is None:
            raise qs.fail("QubitSet without a Value")
        sets.append(QubitSet(tuple(indexes), value))
    return Prepare(tuple(sets))


def _read_register(node: _Node) -> Register:
    attrs = node.attrs(("size",))
    size = node.int_attr(attrs, "size")
    ident = prepare = None
    selectors = []
    for child in node.children(("Identification", "QubitIndex", "QubitRange", "RegisterReference", "Prepare")):
        if child.name == "Identification":
            ident = _read_identification(child)
        elif child.name == "QubitIndex":
            child.attrs()
            selectors.append(child.int_text())
        elif child.name == "QubitRange":
            child.attrs()
            bounds = {}
            for b in child.children(("StartQubit", "EndQubit")):
                b.attrs()
                bounds[b.name] = b.int_text()
            if set(bounds) != {"StartQubit", "EndQubit"}:
                raise child.fail("QubitRange needs StartQubit and EndQubit")
            selectors.append(QubitRange(bounds["StartQubit"], bounds["EndQubit"]))
        elif child.name == "RegisterReference":
            selectors.append(_read_reference(child, RegisterRef))
        else:
            prepare = _read_prepare(child)
    return Register(size, tuple(selectors), prepare, ident)


def _read_memory(node: _Node) -> Memory:
    attrs = node.attrs(("size",))
    ident = name = prepare = None
    qubits = []
    for child in node.children(("Identification", "Name", "Prepare", "Qubit")):
        if child.name == "Identification":
            ident = _read_identification(child)
        elif child.name == "Name":
            name = child.text
        elif child.name == "Prepare":
            prepare = _read_prepare(child)
        else:
            qattrs = child.attrs(("index",))
            parts = {}
            for part in child.children(("Zero", "One")):
                parts[part.name], _ = _read_complex(part)
            if set(parts) != {"Zero", "One"}:
                raise child.fail("Qubit needs Zero and One amplitudes")
            qubits.append(QubitState(parts["Zero"], parts["One"], child.int_attr(qattrs, "index", required=False)))
    return Memory(node.int_attr(attrs, "size"), ident, name, prepare, tuple(qubits))


def _read_program(node: _Node) -> Program:
    node.attrs()
    ident = name = memory = None
    registers, body = [], []
    for child in node.children(("Identification", "Name", "Memory", "Register", "Execute", "Measure")):
        if child.name == "Identification":
            ident = _read_identification(child)
        elif child.name == "Name":
            name = child.text
        elif child.name == "Memory":
            memory = _read_memory(child)
        elif child.name == "Register":
            registers.append(_read_register(child))
        elif child.name == "Execute":
            child.attrs()
            register = None
            targets = []
            for ec in child.children(("Register", "Circuit", "CircuitRef", "Program", "ProgramRef")):
                if ec.name == "Register":
                    register = _read_register(ec)
                elif ec.name == "Circuit":
                    targets.append(_read_circuit(ec))
                elif ec.name == "CircuitRef":
                    targets.append(_read_reference(ec, CircuitRef))
                elif ec.name == "Program":
                    targets.append(_read_program(ec))
                else:
                    targets.append(_read_reference(ec, ProgramRef))
            if register is None or len(targets) != 1:
                raise child.fail("Execute needs one Register and one circuit or program")
            body.append(Execute(register, targets[0]))
        else:
            child.attrs()
            regs = [_read_register(r) for r in child.children(("Register",))]
            if len(regs) != 1:
                raise child.fail("Measure needs exactly one Register")
            body.append(Measure(regs[0]))
    if ident is None:
        raise node.fail("program without Identification")
    if memory is None:
        raise node.fail("program without Memory")
    return Program(ident, memory, name, tuple(registers), tuple(body))


def _read_library(node: _Node, member: str, reader, cls):
    node.attrs()
    ident = None
    items = []
    for child in node.children(("Identification", member)):
        if child.name == "Identification":
            ident = _read_identification(child)
        else:
            items.append(reader(child))
    return cls(ident, tuple(items))


def _read_instance(node: _Node) -> Instance:
    node.attrs()
    ident = None
    gl, cl, pl = [], [], []
    for child in node.children(("Identification", "GateLibrary", "CircuitLibrary", "ProgramLibrary")):
        if child.name == "Identification":
            ident = _read_identification(child)
        elif child.name == "GateLibrary":
            gl.append(_read_library(child, "Gate", _read_gate, GateLibrary))
        elif child.name == "CircuitLibrary":
            cl.append(_read_library(child, "Circuit", _read_circuit, CircuitLibrary))
        else:
            pl.append(_read_library(child, "Program", _read_program, ProgramLibrary))
    return Instance(ident, tuple(gl), tuple(cl), tuple(pl))


def _read_qis(node: _Node) -> Instance:
    node.attrs()
    gates, circuits = [], []
    for child in node.children(("Gate", "Circuit")):
        if child.name == "Gate":
            gates.append(_read_gate(child))
        else:
            circuits.append(_read_circuit(child))
    return Instance(
        None,
        (GateLibrary(None, tuple(gates)),) if gates else (),
        (CircuitLibrary(None, tuple(circuits)),) if circuits else (),
    )


def parse_document(data: bytes | str) -> Document:
    """Parse one QIS-XML document into an Instance or a library."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        raise XmlSyntax(line, col, str(exc)) from None
    node = _Node(root, f"/{_split(root.tag)[1]}")
    if node.name == "QIS":
        return _read_qis(node)
    if node.name == "Instance":
        return _read_instance(node)
    if node.name == "GateLibrary":
        return _read_library(node, "Gate", _read_gate, GateLibrary)
    if node.name == "CircuitLibrary":
        return _read_library(node, "Circuit", _read_circuit, CircuitLibrary)
    if node.name == "ProgramLibrary":
        return _read_library(node, "Program", _read_program, ProgramLibrary)
    if node.name == "Gate":
        return GateLibrary(None, (_read_gate(node),))
    if node.name == "Circuit":
        return CircuitLibrary(None, (_read_circuit(node),))
    if node.name == "Program":
        return ProgramLibrary(None, (_read_program(node),))
    raise UnknownElement(node.name, node.path)


# -- writing -------------------------------------------------------------------


def _q(prefix: str, local: str) -> str:
    return f"{{{NAMESPACES[prefix]}}}{local}"


def fmt_number(x: float) -> str:
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _sub(parent: ET.Element, prefix: str, local: str, text: str | None = None, **attrs) -> ET.Element:
    el = ET.SubElement(parent, _q(prefix, local), {k: v for k, v in attrs.items() if v is not None})
    if text is not None:
        el.text = text
    return el


def _w_identification(parent: ET.Element, ident: Identification) -> None:
    el = _sub(parent, "r", "Identification")
    _sub(el, "r", "ID", ident.id)
    if ident.agency is not None:
        _sub(el, "r", "AgencyID", ident.agency)
    if ident.version is not None:
        _sub(el, "r", "Version", ident.version)


def _w_reference(parent: ET.Element, prefix: str, local: str, ref: Reference) -> None:
    el = _sub(parent, prefix, local, URI=ref.uri)
    _sub(el, "r", "ID", ref.id)
    if ref.library_id is not None:
        _sub(el, "r", "LibraryID", ref.library_id)
    if ref.agency_id is not None:
        _sub(el, "r", "AgencyID", ref.agency_id)
    if ref.version is not None:
        _sub(el, "r", "Version", ref.version)


def _w_complex(parent: ET.Element, prefix: str, local: str, value: ComplexValue, **extra) -> None:
    attrs = dict(extra)
    if value.re is not None:
        attrs["r"] = fmt_number(value.re)
    if value.im is not None:
        attrs["i"] = fmt_number(value.im)
    el = _sub(parent, prefix, local, **attrs)
    for syntax, text in value.symbolic:
        _sub(el, prefix, "Symbolic", text, syntax=syntax)


def _w_gate(parent: ET.Element, gate: Gate, prefix: str = "g") -> None:
    el = _sub(parent, prefix, "Gate")
    _w_identification(el, gate.identification)
    _sub(el, prefix, "Name", gate.name)
    if gate.nickname is not None:
        _sub(el, prefix, "Nickname", gate.nickname)
    if gate.description is not None:
        _sub(el, prefix, "Description", gate.description)
    for p in gate.parameters:
        pel = _sub(el, prefix, "Parameter")
        _sub(pel, prefix, "Name", p.name)
        if p.description is not None:
            _sub(pel, prefix, "Description", p.description)
    t = gate.transformation
    tel = _sub(el, prefix, "Transformation", size=str(t.size))
    if t.multiplier is not None:
        _w_complex(tel, prefix, "Multiplier", t.multiplier)
    for cell in t.cells:
        _w_complex(tel, prefix, "Cell", cell.value, row=str(cell.row), col=str(cell.col))
    if gate.render_hint is not None:
        h = gate.render_hint
        hel = _sub(el, prefix, "RenderHint", glyph=h.target_glyph, label=h.label)
        for c in h.control_inputs:
            _sub(hel, prefix, "Control", input=str(c))


def _w_circuit(parent: ET.Element, circuit: Circuit) -> ET.Element:
    el = _sub(parent, "c", "Circuit", size=str(circuit.size))
    if circuit.identification is not None:
        _w_identification(el, circuit.identification)
    if circuit.name is not None:
        _sub(el, "c", "Name", circuit.name)
    if circuit.description is not None:
        _sub(el, "c", "Description", circuit.description)
    for tag, labels in (("Input", circuit.inputs), ("Output", circuit.outputs)):
        for label in labels:
            lel = _sub(el, "r", tag, qubit=str(label.qubit))
            _sub(lel, "r", "Name", label.name)
    for step in circuit.steps:
        sel = _sub(el, "c", "Step")
        for op in step:
            oel = _sub(sel, "c", "Operation", reverse="true" if op.reverse else None)
            for m in op.maps:
                _sub(
                    oel,
                    "c",
                    "Map",
                    qubit=None if m.qubit is None else str(m.qubit),
                    input=str(m.input),
                    value=None if m.fixed_value is None else str(m.fixed_value),
                )
            if isinstance(op.target, Gate):
                _w_gate(oel, op.target, prefix="c")
            elif isinstance(op.target, CircuitRef):
                _w_reference(oel, "c", "CircuitRef", op.target)
            else:
                _w_reference(oel, "c", "GateRef", op.target)
            for pname, pvalue in op.parameter_bindings:
                _sub(oel, "c", "ParameterBinding", name=pname, value=fmt_number(pvalue))
    return el


def _w_prepare(parent: ET.Element, prepare: Prepare) -> None:
    el = _sub(parent, "p", "Prepare")
    for qs in prepare.qubit_sets:
        qel = _sub(el, "p", "QubitSet")
        for idx in qs.qubit_indexes:
            _sub(qel, "p", "QubitIndex", str(idx))
        _w_complex(qel, "p", "Value", qs.value)


def _w_register(parent: ET.Element, reg: Register) -> None:
    el = _sub(parent, "p", "Register", size=str(reg.size))
    if reg.identification is not None:
        _w_identification(el, reg.identification)
    for sel in reg.selectors:
        if isinstance(sel, int):
            _sub(el, "p", "QubitIndex", str(sel))
        elif isinstance(sel, QubitRange):
            rel = _sub(el, "p", "QubitRange")
            _sub(rel, "p", "StartQubit", str(sel.start))
            _sub(rel, "p", "EndQubit", str(sel.end))
        else:
            _w_reference(el, "p", "RegisterReference", sel)
    if reg.prepare is not None:
        _w_prepare(el, reg.prepare)


def _w_program(parent: ET.Element, program: Program) -> None:
    el = _sub(parent, "p", "Program")
    _w_identification(el, program.identification)
    if program.name is not None:
        _sub(el, "p", "Name", program.name)
    mem = program.memory
    mel = _sub(el, "p", "Memory", size=str(mem.size))
    if mem.identification is not None:
        _w_identification(mel, mem.identification)
    if mem.name is not None:
        _sub(mel, "p", "Name", mem.name)
    if mem.prepare is not None:
        _w_prepare(mel, mem.prepare)
    for q in mem.qubits:
        qel = _sub(mel, "p", "Qubit", index=None if q.index is None else str(q.index))
        _w_complex(qel, "p", "Zero", q.zero)
        _w_complex(qel, "p", "One", q.one)
    for reg in program.global_registers:
        _w_register(el, reg)
    for item in program.body:
        if isinstance(item, Measure):
            _w_register(_sub(el, "p", "Measure"), item.register)
            continue
        xel = _sub(el, "p", "Execute")
        _w_register(xel, item.register)
        target = item.target
        if isinstance(target, Circuit):
            _w_circuit(xel, target)
        elif isinstance(target, Program):
            _w_program(xel, target)
        elif isinstance(target, ProgramRef):
            _w_reference(xel, "p", "ProgramRef", target)
        else:
            _w_reference(xel, "p", "CircuitRef", target)


def _library_element(lib: Library, parent: ET.Element | None = None) -> ET.Element:
    if isinstance(lib, GateLibrary):
        prefix, local, items, writer = "g", "GateLibrary", lib.gates, _w_gate
    elif isinstance(lib, CircuitLibrary):
        prefix, local, items, writer = "c", "CircuitLibrary", lib.circuits, _w_circuit
    else:
        prefix, local, items, writer = "p", "ProgramLibrary", lib.programs, _w_program
    el = ET.Element(_q(prefix, local)) if parent is None else _sub(parent, prefix, local)
    if lib.identification is not None:
        _w_identification(el, lib.identification)
    for item in items:
        writer(el, item)
    return el


def to_element(entity: Document) -> ET.Element:
    """Build the element tree for a document (no indentation applied)."""
    if isinstance(entity, Instance):
        root = ET.Element(_q("i", "Instance"))
        if entity.identification is not None:
            _w_identification(root, entity.identification)
        for lib in libraries_of(entity):
            _library_element(lib, root)
        return root
    return _library_element(entity)


def element_bytes(root: ET.Element) -> bytes:
    ET.indent(root, space="\t")
    # ElementTree escapes ">" in text and attributes, so " />" only closes empty tags
    body = ET.tostring(root, encoding="unicode").replace(" />", "/>")
    return ('<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n").encode("utf-8")


def serialize(entity: Document) -> bytes:
    """Serialize to UTF-8 bytes in the namespaced modular form."""
    return element_bytes(to_element(entity))


# -- document sets -------------------------------------------------------------

KINDS = ("gate", "circuit", "program")


@dataclass(frozen=True)
class Entry:
    kind: str
    entity: object
    library: Library
    source: str
    position: int  # 1-based position inside its library

    @property
    def library_id(self) -> Optional[str]:
        return self.library.identification.id if self.library.identification else None

    @property
    def identification(self) -> Optional[Identification]:
        return getattr(self.entity, "identification", None)

    @property
    def label(self) -> str:
        ident = self.identification
        return ident.id if ident is not None else f"#{self.position}"

    def describe(self) -> str:
        ident = self.identification
        parts = [self.label]
        if ident is not None and ident.agency:
            parts.append(f"agency={ident.agency}")
        if ident is not None and ident.version:
            parts.append(f"version={ident.version}")
        return f"{' '.join(parts)} ({self.source})"


def _members(lib: Library) -> tuple[str, tuple]:
    if isinstance(lib, GateLibrary):
        return "gate", lib.gates
    if isinstance(lib, CircuitLibrary):
        return "circuit", lib.circuits
    return "program", lib.programs


class DocumentSet:
    """Loaded documents indexed for reference resolution.

    Built once from (source, document) pairs and not modified afterwards.
    """

    def __init__(self, documents: Iterable[tuple[str, Document]] = ()) -> None:
        self.documents: tuple[tuple[str, Document], ...] = tuple(documents)
        self._entries: dict[str, list[Entry]] = {k: [] for k in KINDS}
        seen: dict[tuple, Entry] = {}
        for source, doc in self.documents:
            for lib in libraries_of(doc):
                kind, items = _members(lib)
                for pos, item in enumerate(items, 1):
                    entry = Entry(kind, item, lib, source, pos)
                    self._entries[kind].append(entry)
                    ident = entry.identification
                    if ident is None:
                        continue
                    key = (kind, ident.id, ident.agency, ident.version)
                    if key in seen and not (_builtin(seen[key].source) or _builtin(source)):
                        raise DuplicateId(f"{ident.id} (in {seen[key].source} and {source})", kind)
                    seen[key] = entry

    def __len__(self) -> int:
        return len(self.documents)

    def entries(self, kind: str | None = None) -> list[Entry]:
        if kind is None:
            return [e for k in KINDS for e in self._entries[k]]
        return list(self._entries[kind])

    @property
    def gates(self) -> list[Gate]:
        return [e.entity for e in self._entries["gate"]]

    @property
    def circuits(self) -> list[Circuit]:
        return [e.entity for e in self._entries["circuit"]]

    @property
    def programs(self) -> list[Program]:
        return [e.entity for e in self._entries["program"]]

    def merged(self, other: "DocumentSet") -> "DocumentSet":
        return DocumentSet(self.documents + other.documents)

    def resolve(self, ref: Reference, kind: str):
        return resolve(ref, self, kind)

    def entry_for(self, ref: Reference, kind: str) -> Entry:
        return _resolve_entry(ref, self, kind)

    def gate(self, gate_id: str) -> Gate:
        return resolve(Reference(gate_id), self, "gate")

    def circuit(self, circuit_id: str) -> Circuit:
        return resolve(Reference(circuit_id), self, "circuit")

    def program(self, program_id: str) -> Program:
        return resolve(Reference(program_id), self, "program")


def _builtin(source: str) -> bool:
    return source.startswith("builtin:")


def _uri_matches(source: str, uri: str) -> bool:
    if source == uri:
        return True
    return os.path.basename(source) == os.path.basename(uri.rstrip("/"))


def _resolve_entry(ref: Reference, docset: DocumentSet, kind: str) -> Entry:
    candidates = [e for e in docset.entries(kind) if e.identification is not None and e.identification.id == ref.id]
    if ref.library_id is not None:
        candidates = [e for e in candidates if e.library_id == ref.library_id]
    if ref.agency_id is not None:
        candidates = [
            e
            for e in candidates
            if (e.identification.agency or (e.library.identification.agency if e.library.identification else None))
            == ref.agency_id
        ]
    if ref.version is not None:
        candidates = [e for e in candidates if e.identification.version == ref.version]
    if len(candidates) > 1:
        # loaded documents shadow the builtin library
        own = [e for e in candidates if not _builtin(e.source)]
        candidates = own or candidates
    if len(candidates) > 1 and ref.uri:
        narrowed = [e for e in candidates if _uri_matches(e.source, ref.uri)]
        candidates = narrowed or candidates
    if not candidates:
        raise NotFound(ref.id, kind)
    if len(candidates) > 1:
        raise Ambiguous(ref.id, [e.describe() for e in candidates])
    return candidates[0]


def resolve(ref: Reference, docset: DocumentSet, kind: str):
    """Entity of the given kind ('gate', 'circuit', 'program') that ref names."""
    return _resolve_entry(ref, docset, kind).entity


def read_path(path: str | os.PathLike) -> Document:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise LoadError(str(path), exc.strerror or str(exc)) from None
    return parse_document(data)


def load_set(paths: Iterable[str | os.PathLike], *, stdlib: bool = False) -> DocumentSet:
    """Parse every path into one DocumentSet; optionally include the builtin library."""
    docs = []
    if stdlib:
        from .stdlib import builtin_documents

        docs.extend(builtin_documents())
    for path in paths:
        docs.append((str(path), read_path(path)))
    return DocumentSet(docs)
