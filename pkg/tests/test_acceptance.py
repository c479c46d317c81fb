"""End-to-end acceptance checks, one test per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary, both
under a plain ``pytest`` run and when this file is executed directly.
"""

import re
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from conftest import FIXTURES, adder_program, adder_set, docset_with
from oracles import H, QclSubset, X, adder_expected, classical_run, controlled_x, kron, toffoli_matrix
from qisxml.compiler import compile_qcl
from qisxml.genadder import generate_adder
from qisxml.model import ProgramLibrary
from qisxml.render import matrix_entries, render_circuit_svg, report_html
from qisxml.simulator import circuit_unitary, run_program
from qisxml.stdlib import builtin_gates
from qisxml.validation import (
    CELL_OUT_OF_RANGE,
    DANGLING_REFERENCE,
    DUPLICATE_MAPPING,
    EXECUTE_SIZE_MISMATCH,
    INDEX_OUT_OF_BOUNDS,
    MAP_INPUT_OUT_OF_RANGE,
    MAP_QUBIT_OUT_OF_RANGE,
    NOT_UNITARY,
    QUBIT_NORMALIZATION,
    UNMAPPED_QUBITS,
    Severity,
    errors,
    report_text,
    validate,
    warnings,
)
from qisxml.xmlio import parse_document, read_path, serialize

TOL = 1e-9

REFERENCE_FIXTURES = [
    "prototype_transformations.xml",
    "single_qubit_gates.xml",
    "multi_qubit_gates.xml",
    "phase_shift_parameterized.xml",
    "cnot_cphase.xml",
    "deutsch_gate.xml",
    "not_equivalent.xml",
    "phase_flip.xml",
    "register_initialization.xml",
    "two_plus_one.xml",
    "adder2_reference.xml",
    "six_plus_seven.xml",
]

# fixtures whose references need an adder circuit to resolve
NEEDS_ADDER = {"two_plus_one.xml": 2, "six_plus_seven.xml": 5}


def _inf_norm(m):
    return float(np.max(np.abs(m)))


def test_criterion_1_reference_corpus_parsing():
    for name in REFERENCE_FIXTURES:
        doc = read_path(FIXTURES / name)
        assert parse_document(serialize(doc)) == doc, name
        n = NEEDS_ADDER.get(name)
        docset = adder_set(n, name) if n else docset_with(name)
        assert errors(validate(docset)) == [], name


def test_criterion_2_gate_library_integrity():
    gates = builtin_gates().gates
    assert len(gates) == 17
    thetas = [0.0, np.pi / 7, np.pi / 2, 1.0, 2 * np.pi]
    for gate in gates:
        samples = [{"theta": t} for t in thetas] if gate.parameters else [None]
        for bindings in samples:
            u = gate.matrix(bindings)
            assert _inf_norm(u @ u.conj().T - np.eye(u.shape[0])) <= TOL, (gate.id, bindings)


def test_criterion_3_equivalent_circuits():
    docset = docset_with("not_equivalent.xml", "phase_flip.xml")
    not_equiv = next(c for c in docset.circuits if c.description and "Square root" in c.description)
    assert _inf_norm(circuit_unitary(not_equiv, docset) - X) <= TOL

    flip = next(e.entity for e in docset.entries("circuit") if e.source == "phase_flip.xml")
    oracle = kron(H, H, H) @ controlled_x(1, 3, 3) @ controlled_x(1, 2, 3)
    assert _inf_norm(circuit_unitary(flip, docset) - oracle) <= TOL

    toffoli_equiv = docset.circuit("TOFFOLI-EQUIV")
    assert _inf_norm(circuit_unitary(toffoli_equiv, docset) - toffoli_matrix()) <= TOL


def test_criterion_4_genadder_structure():
    for n in range(2, 11):
        circuit = generate_adder(n).circuits[0]
        assert circuit.size == 3 * n
        assert circuit.operation_count == 7 * n - 6
    generated = generate_adder(2).circuits[0]
    reference = read_path(FIXTURES / "adder2_reference.xml")
    assert reference.identification == generate_adder(2).identification
    expected = reference.circuits[0]
    assert generated.size == expected.size
    assert generated.steps == expected.steps
    assert generated.inputs == expected.inputs
    assert generated.outputs == expected.outputs


def test_criterion_5_reference_results():
    docset = adder_set(2, "two_plus_one.xml")
    record = run_program(docset.program("two_plus_one"), docset, seed=1)
    assert [bit for _, bit in record.bits] == [0, 1, 0, 1, 1, 0]

    docset = adder_set(5, "six_plus_seven.xml")
    program = docset.program("six_plus_seven")
    full = run_program(program, docset, seed=1, measure_all=True)
    set_bits = {index - 1 for index, bit in full.bits if bit}
    assert set_bits == {1, 3, 6, 7, 10}
    measured = run_program(program, docset, seed=1).as_dict()
    assert sorted(measured) == [2, 5, 8, 11, 14, 15]
    zero_based = {q - 1: b for q, b in full.bits}
    total = int("".join(str(zero_based[q]) for q in (13, 10, 7, 4, 1)), 2)
    assert total == 13


def test_criterion_6_exhaustive_adder_oracle():
    for n in (2, 3):
        docset = adder_set(n)
        circuit = docset.circuit(f"adder{n}")
        for a in range(2**n):
            for b in range(2**n):
                start = [0] * (3 * n + 1)
                start[1::3] = [(a >> i) & 1 for i in range(n)]
                start[2::3] = [(b >> i) & 1 for i in range(n)]
                expected = adder_expected(n, a, b)
                assert classical_run(circuit, start) == expected
                record = run_program(adder_program(n, a, b), docset, seed=0)
                got = [0] + [bit for _, bit in record.bits]
                assert got == expected, (n, a, b)
                assert all(got[3 * i + 3] == 0 for i in range(n - 1))


MUTATIONS = {
    QUBIT_NORMALIZATION: ('<p:One r="0"/>', '<p:One r="1"/>'),
    CELL_OUT_OF_RANGE: ('<g:Cell row="2" col="1" r="1"/>', '<g:Cell row="3" col="1" r="1"/>'),
    MAP_QUBIT_OUT_OF_RANGE: ('<c:Map qubit="2" input="1"/>', '<c:Map qubit="3" input="1"/>'),
    MAP_INPUT_OUT_OF_RANGE: ('<c:Map qubit="2" input="2"/>', '<c:Map qubit="2" input="3"/>'),
    DUPLICATE_MAPPING: ('<c:Map qubit="2" input="1"/>', '<c:Map qubit="1" input="1"/>'),
    DANGLING_REFERENCE: ("<r:ID>C-NOT</r:ID>", "<r:ID>C-NOTE</r:ID>"),
    EXECUTE_SIZE_MISMATCH: (
        '<p:Register size="2">\n\t\t\t\t\t<p:QubitIndex>1</p:QubitIndex>\n\t\t\t\t\t<p:QubitIndex>2</p:QubitIndex>',
        '<p:Register size="1">\n\t\t\t\t\t<p:QubitIndex>1</p:QubitIndex>',
    ),
    INDEX_OUT_OF_BOUNDS: ("<p:QubitIndex>2</p:QubitIndex>", "<p:QubitIndex>3</p:QubitIndex>"),
    NOT_UNITARY: ('<g:Cell row="1" col="2" r="1"/>', '<g:Cell row="1" col="2" r="2"/>'),
}


def _mutated_findings(old: str, new: str, strict: bool):
    base = (FIXTURES / "mutation_base.xml").read_text(encoding="utf-8")
    assert base.count(old) == 1, old
    doc = parse_document(base.replace(old, new))
    return _own(validate(docset_with(("mutant.xml", doc)), strict_unitary=strict))


def _own(findings):
    return [f for f in findings if not f.document.startswith("builtin:")]


def test_criterion_7_validator_mutations():
    base = _own(validate(docset_with("mutation_base.xml"), strict_unitary=True))
    assert base == []
    for code, (old, new) in MUTATIONS.items():
        found = errors(_mutated_findings(old, new, strict=code == NOT_UNITARY))
        assert [f.code for f in found] == [code], (code, found)
    # the unmapped-qubit check is a warning: drop the second operation of step 1
    old = '<c:Operation>\n\t\t\t\t\t<c:Map qubit="2" input="1"/>\n\t\t\t\t\t<c:GateRef>\n\t\t\t\t\t\t<r:ID>FLIP</r:ID>\n\t\t\t\t\t</c:GateRef>\n\t\t\t\t</c:Operation>'
    found = _mutated_findings(old, "", strict=False)
    assert errors(found) == []
    assert [(f.code, f.step) for f in warnings(found)] == [(UNMAPPED_QUBITS, 1)]

    docset = docset_with("shor_code_faulty.xml")
    findings = _own(validate(docset))
    assert [(f.step, f.operation, f.message) for f in errors(findings)] == [
        (1, 1, "Map 1 input=3 is out of Gate range.")
    ]
    assert [f.step for f in findings if f.severity is Severity.WARNING] == [1, 2, 3, 4, 5]
    text = report_text(findings, docset)
    assert "Size 9, 5 step(s)" in text.splitlines()[0]
    assert text.count("Warning: Not all qubits have been mapped.") == 5
    assert "1: Controlled-NOT (C-NOT) [1=1,4=3]\nERROR: Map 1 input=3 is out of Gate range." in text


def test_criterion_8_compiler_goldens():
    docset = adder_set(2, "two_plus_one.xml")
    program = docset.program("two_plus_one")
    text = compile_qcl(program, docset)
    assert text == compile_qcl(program, docset)
    assert len(re.findall(r"^// STEP \d+$", text, re.M)) == 8
    prepare = re.findall(r"^measure \w+\[(\d+)\],value;\nif value != 1", text, re.M)
    assert sorted(int(k) for k in prepare) == [1, 3]
    assert re.search(r"^CNot\((\w+)\[2\], \1\[0\] & \1\[1\]\);$", text, re.M)
    assert re.findall(r"^for i=(\d+) to (\d+) \{$", text, re.M) == [("0", "5")]

    docset = adder_set(2)
    for a in range(4):
        for b in range(4):
            qcl = compile_qcl(adder_program(2, a, b), docset)
            printed = QclSubset(qcl).run()
            assert [bit for _, bit in printed] == adder_expected(2, a, b)[1:], (a, b)


def test_criterion_9_render_goldens():
    docset = adder_set(2)
    svg = render_circuit_svg(docset.circuit("adder2"), docset)
    root = ET.fromstring(svg.encode("utf-8"))
    ns = {"s": "http://www.w3.org/2000/svg"}
    assert len(root.findall("s:line[@class='wire']", ns)) == 6
    assert len(root.findall("s:g[@class='column']", ns)) == 8

    html = report_html(docset, include_builtin=True)
    page = ET.fromstring(html.split("\n", 1)[1])
    section = page.find(".//section[@id='gate-DEUTSCH']")
    rows = [[td.text for td in tr.findall("td")] for tr in section.find("table").findall("tr")]
    assert [row[6:] for row in rows[6:]] == [["cos(θ)", "i sin(θ)"], ["i sin(θ)", "cos(θ)"]]
    assert rows == matrix_entries(docset.gate("DEUTSCH"))


def _cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "qisxml.cli", *args], capture_output=True, text=True, check=True
    ).stdout


def test_criterion_10_determinism():
    coins = str(FIXTURES / "coin_flips.xml")
    runs = [_cli("simulate", coins, "--program", "coin_flips", "--seed", "7") for _ in range(2)]
    assert runs[0] == runs[1]
    assert len(runs[0].splitlines()) == 8

    cases = [
        (adder_set(2, "two_plus_one.xml"), "two_plus_one"),
        (adder_set(5, "six_plus_seven.xml"), "six_plus_seven"),
    ]
    for n in (2, 3):
        for a in range(2**n):
            for b in range(2**n):
                program = adder_program(n, a, b, program_id=f"add_{n}_{a}_{b}")
                library = ProgramLibrary(None, (program,))
                cases.append((adder_set(n, ("p.xml", library)), program.id))
    for docset, pid in cases:
        program = docset.program(pid)
        sample = run_program(program, docset, seed=3)
        dist = run_program(program, docset, mode="distribution")
        assert len(dist.outcomes) == 1 and abs(dist.outcomes[0][1] - 1) <= TOL
        assert dist.outcomes[0][0] == tuple(bit for _, bit in sample.bits)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
