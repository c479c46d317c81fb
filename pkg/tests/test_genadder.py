import re

import pytest

from conftest import FIXTURES, adder_set
from oracles import adder_expected, classical_run
from qisxml.errors import BadWidth
from qisxml.genadder import adder_document, generate_adder
from qisxml.model import GateRef
from qisxml.validation import validate
from qisxml.xmlio import parse_document, read_path


@pytest.mark.parametrize("n", [1, 2, 3, 4, 8])
def test_shape(n):
    lib = generate_adder(n)
    assert lib.identification.id == "genadder"
    circuit = lib.circuits[0]
    assert circuit.id == f"adder{n}"
    assert circuit.size == 3 * n
    assert all(len(step) == 1 for step in circuit.steps)
    if n > 1:
        assert circuit.operation_count == 7 * n - 6
    assert [label.name for label in circuit.outputs][-1] == "CarryOut"
    assert {op.target for step in circuit.steps for op in step} <= {GateRef("C-NOT"), GateRef("TOFFOLI")}


def test_single_bit_is_half_adder():
    circuit = generate_adder(1).circuits[0]
    assert [op.target.id for (op,) in circuit.steps] == ["TOFFOLI", "C-NOT"]


def test_custom_id():
    assert generate_adder(2, "add2").circuits[0].id == "add2"


@pytest.mark.parametrize("bad", [0, -3])
def test_bad_width(bad):
    with pytest.raises(BadWidth, match="Number of bits must be positive"):
        generate_adder(bad)


def test_document_matches_reference_layout():
    text = adder_document(2).decode()
    assert text.count("<!-- sum bit") == 2
    assert text.count("<!-- finish bit") == 2
    assert parse_document(text.encode()) == generate_adder(2)
    expected = read_path(FIXTURES / "adder2_reference.xml").circuits[0]
    assert expected.steps == generate_adder(2).circuits[0].steps
    comments = re.findall(r"<!-- (\w+ bit \d) -->", text)
    assert comments == ["sum bit 0", "sum bit 1", "finish bit 1", "finish bit 0"]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_classical_truth_table(n):
    circuit = generate_adder(n).circuits[0]
    for a in range(2**n):
        for b in range(2**n):
            bits = [0] * (3 * n + 1)
            for i in range(n):
                bits[3 * i + 1] = (a >> i) & 1
                bits[3 * i + 2] = (b >> i) & 1
            assert classical_run(circuit, bits) == adder_expected(n, a, b)


def test_generated_adder_validates_cleanly():
    docset = adder_set(4)
    assert [f for f in validate(docset) if f.document == "adder4.xml" and f.severity == "ERROR"] == []
