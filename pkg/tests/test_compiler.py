import re
from pathlib import Path

import pytest

from conftest import adder_program, adder_set, docset_with
from oracles import QclSubset, adder_expected
from qisxml.compiler import ENCODINGS, compile_qcl, fresh_register_name
from qisxml.errors import FixedValueMapUnsupported, SubProgramUnsupported, UnsupportedGate
from qisxml.model import (
    Circuit,
    CircuitLibrary,
    CircuitRef,
    Execute,
    GateRef,
    Identification,
    Map,
    Measure,
    Memory,
    Operation,
    Program,
    ProgramRef,
    QubitRange,
    Register,
)

GOLDEN = Path(__file__).parent / "golden"


def _op(gate_id, *qubits, reverse=False, bindings=()):
    return Operation(tuple(Map(i, q) for i, q in enumerate(qubits, 1)), GateRef(gate_id), reverse, bindings)


def _compile(circuit, memory, register=None, measures=()):
    docset = docset_with(("c.xml", CircuitLibrary(None, (circuit,))))
    register = register or Register(circuit.size)
    body = (Execute(register, CircuitRef(circuit.id)), *measures)
    return compile_qcl(Program(Identification("p"), Memory(memory), body=body), docset)


def test_golden_two_plus_one():
    docset = adder_set(2, "two_plus_one.xml")
    text = compile_qcl(docset.program("two_plus_one"), docset)
    assert text == (GOLDEN / "two_plus_one.qcl").read_text(encoding="utf-8")


def test_register_names_are_unique():
    docset = adder_set(3)
    text = compile_qcl(adder_program(3, 5, 6), docset)
    names = re.findall(r"^qureg (\w+) =", text, re.M)
    assert len(names) == len(set(names))
    assert fresh_register_name(7) == "register0007"


def test_partial_register_and_measure_runs():
    circuit = Circuit(2, ((_op("X", 1),), (_op("C-NOT", 1, 2),)), Identification("c"))
    measures = (Measure(Register(3, (QubitRange(1, 2), 4))),)
    text = _compile(circuit, 4, Register(2, (4, 2)), measures)
    assert "qureg register0001 = memory[3]&memory[1];" in text
    assert "for i=0 to 1 {" in text and "for i=3 to 3 {" in text
    assert text.count("// MEASUREMENT") == 1


def test_reverse_and_parameter_encodings():
    circuit = Circuit(2, ((_op("T", 1, reverse=True), _op("SHIFT", 2, bindings=(("θ", 0.25),))),), Identification("c"))
    text = _compile(circuit, 2)
    assert "!T(register0002[0]);" in text
    assert "Phase(1.5707963267948966, register0003[0]);" in text


def test_shift_requires_binding():
    circuit = Circuit(1, ((_op("SHIFT", 1),),), Identification("c"))
    with pytest.raises(UnsupportedGate):
        _compile(circuit, 1)


def test_gate_without_encoding():
    circuit = Circuit(3, ((_op("FREDKIN", 1, 2, 3),),), Identification("c"))
    with pytest.raises(UnsupportedGate, match="FREDKIN"):
        _compile(circuit, 3)
    assert "FREDKIN" not in ENCODINGS


def test_nested_circuits_are_inlined():
    outer = Circuit(2, ((Operation((Map(1, 2),), CircuitRef("NOT-EQUIV")),),), Identification("outer"))
    text = _compile(outer, 2)
    assert text.count("// CIRCUIT") == 2
    assert re.findall(r"^qureg (\w+) = register0001\[1\];\nSqrtNot\(\1\[0\]\);$", text, re.M)
    assert text.count("SqrtNot(") == 2


def test_rejections():
    docset = docset_with()
    sub = Program(Identification("p"), Memory(1), body=(Execute(Register(1), ProgramRef("q")),))
    with pytest.raises(SubProgramUnsupported):
        compile_qcl(sub, docset)
    circuit = Circuit(1, ((Operation((Map(1, None, 1), Map(2, 1)), GateRef("C-NOT")),),), Identification("c"))
    with pytest.raises(FixedValueMapUnsupported):
        _compile(circuit, 1)


@pytest.mark.parametrize("a, b", [(0, 0), (7, 7), (5, 2), (3, 6)])
def test_interpreted_output_matches_oracle(a, b):
    qcl = compile_qcl(adder_program(3, a, b), adder_set(3))
    assert [bit for _, bit in QclSubset(qcl).run()] == adder_expected(3, a, b)[1:]
