import xml.etree.ElementTree as ET

import pytest

from conftest import adder_set, docset_with
from qisxml.model import Circuit, CircuitRef, GateRef, Map, Operation
from qisxml.render import Layout, matrix_entries, render_circuit_svg, render_gate_svg, report_html, report_validation_html
from qisxml.validation import validate

SVG = {"s": "http://www.w3.org/2000/svg"}


def _svg(text):
    return ET.fromstring(text.encode("utf-8"))


def _html(text):
    first, rest = text.split("\n", 1)
    assert first == "<!DOCTYPE html>"
    return ET.fromstring(rest)


def _column(root, step):
    return root.find(f"s:g[@data-step='{step}']", SVG)


def test_adder_columns_show_controls_and_targets():
    docset = adder_set(2)
    root = _svg(render_circuit_svg(docset.circuit("adder2"), docset))
    for step in range(1, 9):
        col = _column(root, step)
        controls = col.findall("s:circle[@class='control']", SVG)
        targets = col.findall("s:circle[@class='target-oplus']", SVG)
        assert (len(controls), len(targets)) == ((2, 1) if step % 2 else (1, 1))
    labels = [t.text for t in root.findall("s:text[@class='label-in']", SVG)]
    assert labels[:3] == ["InputA0", "InputB0", "Ancillary0"]
    assert [t.text for t in root.findall("s:text[@class='label-out']", SVG)][-1] == "CarryOut"


def test_plain_gate_box_and_empty_circuit():
    docset = docset_with()
    one = Circuit(1, ((Operation((Map(1, 1),), GateRef("H")),),))
    root = _svg(render_circuit_svg(one, docset))
    assert len(root.findall("s:line[@class='wire']", SVG)) == 1
    assert [t.text for t in _column(root, 1).iter("{http://www.w3.org/2000/svg}text")] == ["H"]
    bare = _svg(render_circuit_svg(Circuit(3), docset))
    assert len(bare.findall("s:line[@class='wire']", SVG)) == 3
    assert bare.findall("s:g", SVG) == []


def test_dagger_fixed_value_and_circuit_box():
    docset = docset_with()
    circuit = Circuit(
        2,
        (
            (Operation((Map(1, 1),), GateRef("T"), reverse=True),),
            (Operation((Map(1, None, 1), Map(2, 2)), GateRef("C-NOT")),),
            (Operation((Map(1, 1),), CircuitRef("NOT-EQUIV")),),
        ),
    )
    text = render_circuit_svg(circuit, docset)
    root = _svg(text)
    assert "T†" in text
    assert _column(root, 2).find("s:text[@class='fixed-value']", SVG).text == "1"
    assert _column(root, 3).find("s:rect[@class='circuit-box']", SVG) is not None


def test_swap_glyph_and_layout_geometry():
    docset = docset_with()
    circuit = Circuit(2, ((Operation((Map(1, 1), Map(2, 2)), GateRef("SWAP")),),))
    lay = Layout()
    root = _svg(render_circuit_svg(circuit, docset, lay))
    assert len(_column(root, 1).findall("s:path[@class='swap']", SVG)) == 2
    ys = sorted(float(w.get("y1")) for w in root.findall("s:line[@class='wire']", SVG))
    assert ys[1] - ys[0] == lay.wire_spacing


def test_render_is_deterministic():
    docset = adder_set(3)
    assert render_circuit_svg(docset.circuit("adder3"), docset) == render_circuit_svg(docset.circuit("adder3"), docset)


def test_gate_svg_caption():
    gate = docset_with().gate("TOFFOLI")
    root = _svg(render_gate_svg(gate))
    assert root.find("s:text[@class='caption']", SVG).text == gate.name
    assert len(root.findall("s:line[@class='wire']", SVG)) == 3


def test_matrix_entries_keep_symbolic_text():
    docset = docset_with("prototype_transformations.xml")
    h = docset.gate("PROTO-H")
    assert matrix_entries(h) == [["1", "1"], ["1", "-1"]]
    toffoli = matrix_entries(docset.gate("PROTO-TOFFOLI"))
    assert len(toffoli) == 8 and all(len(row) == 8 for row in toffoli)


def test_report_html_sections():
    docset = adder_set(2, "deutsch_gate.xml")
    page = _html(report_html(docset))
    gate_ids = [s.get("id") for s in page.iter("section") if s.get("class") == "gate"]
    assert "gate-H" not in gate_ids
    circuits = [s for s in page.iter("section") if s.get("class") == "circuit"]
    assert any(s.get("id") == "circuit-adder2" for s in circuits)
    full = _html(report_html(docset, include_builtin=True))
    assert full.find(".//section[@id='gate-H']") is not None


@pytest.mark.parametrize("with_docset", [True, False])
def test_validation_html(with_docset):
    docset = docset_with("shor_code_faulty.xml")
    findings = [f for f in validate(docset) if not f.document.startswith("builtin:")]
    page = _html(report_validation_html(findings, docset if with_docset else None))
    assert page.find(".//p[@class='summary']").text == "1 errors, 5 warnings"
    errors = [e.text for e in page.iter() if e.get("class") == "error"]
    assert len(errors) == 1 and "is out of Gate range" in errors[0]
    assert sum(1 for e in page.iter() if e.get("class") == "warning") == 5
