"""Ripple-carry adder generator (no carry in, ancillas returned to zero).

Qubit layout for bit ``b`` (0-based, least significant first), 1-based
qubits ``3b+1`` = InputA_b, ``3b+2`` = InputB_b (which also receives Sum_b)
and ``3b+3`` = Ancillary_b; the last ancillary carries the carry out. An
N-bit adder uses 3N qubits and, for N > 1, 7N-6 gates, one gate per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import xml.etree.ElementTree as ET

from .errors import BadWidth
from .model import Circuit, CircuitLibrary, GateRef, Identification, Label, Map, Operation
from .xmlio import NAMESPACES, element_bytes, to_element

LIBRARY_ID = "genadder"
VERSION = "2007.01"
USAGE = "Usage: genadder_xml <number_of_bits>"


@dataclass
class _Builder:
    steps: list = field(default_factory=list)
    # (index of the step the comment precedes, comment text)
    comments: list = field(default_factory=list)

    def comment(self, text: str) -> None:
        self.comments.append((len(self.steps), text))

    def cnot(self, control: int, target: int) -> None:
        if control < 0:
            return
        self._gate("C-NOT", control, target)

    def c2not(self, ctrl1: int, ctrl2: int, target: int) -> None:
        if ctrl1 < 0 or ctrl2 < 0:
            return
        self._gate("TOFFOLI", ctrl1, ctrl2, target)

    def _gate(self, gate_id: str, *qubits: int) -> None:
        # zero-based qubit numbers in, 1-based maps out
        maps = tuple(Map(input=k, qubit=q + 1) for k, q in enumerate(qubits, 1))
        self.steps.append((Operation(maps, GateRef(gate_id)),))


def _adder_gates(b: _Builder, num_bits: int, bit: int) -> None:
    base = bit * 3
    b.comment(f"sum bit {bit}")
    b.c2not(base, base + 1, base + 2)
    b.cnot(base, base + 1)
    b.c2not(base - 1, base + 1, base + 2)

    if num_bits > 1:
        _adder_gates(b, num_bits - 1, bit + 1)

    # undo the ancilla and form the sum with the carry in
    if num_bits > 1 or bit > 0:
        b.comment(f"finish bit {bit}")
    if num_bits > 1:
        b.c2not(base - 1, base + 1, base + 2)
        b.c2not(base, base + 1, base + 2)
        b.cnot(base, base + 2)
    b.cnot(base - 1, base + 1)


def _build(num_bits: int, circuit_id: str | None) -> tuple[CircuitLibrary, list]:
    if num_bits < 1:
        raise BadWidth(f"Number of bits must be positive: {num_bits}")
    builder = _Builder()
    _adder_gates(builder, num_bits, 0)
    inputs = []
    for i in range(num_bits):
        inputs += [
            Label(i * 3 + 1, f"InputA{i}"),
            Label(i * 3 + 2, f"InputB{i}"),
            Label(i * 3 + 3, f"Ancillary{i}"),
        ]
    outputs = [Label(i * 3 + 2, f"Sum{i}") for i in range(num_bits)]
    outputs.append(Label(num_bits * 3, "CarryOut"))
    ident = Identification(circuit_id if circuit_id is not None else f"adder{num_bits}")
    circuit = Circuit(
        size=num_bits * 3,
        steps=tuple(builder.steps),
        identification=ident,
        inputs=tuple(inputs),
        outputs=tuple(outputs),
    )
    return CircuitLibrary(Identification(LIBRARY_ID), (circuit,)), builder.comments


def generate_adder(num_bits: int, circuit_id: str | None = None) -> CircuitLibrary:
    """CircuitLibrary "genadder" holding one adder circuit (id ``adder<N>`` by default)."""
    return _build(num_bits, circuit_id)[0]


def adder_document(num_bits: int, circuit_id: str | None = None) -> bytes:
    """Serialized adder library with "sum bit"/"finish bit" comment markers."""
    lib, comments = _build(num_bits, circuit_id)
    root = to_element(lib)
    circuit_el = root.find(f"{{{NAMESPACES['c']}}}Circuit")
    step_tag = f"{{{NAMESPACES['c']}}}Step"
    step_els = [el for el in circuit_el if el.tag == step_tag]
    # insert from the back so earlier positions stay valid
    for step_index, text in reversed(comments):
        comment = ET.Comment(f" {text} ")
        if step_index < len(step_els):
            pos = list(circuit_el).index(step_els[step_index])
            circuit_el.insert(pos, comment)
        else:
            circuit_el.append(comment)
    return element_bytes(root)
