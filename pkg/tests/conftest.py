from pathlib import Path

import pytest

from qisxml.genadder import generate_adder
from qisxml.stdlib import builtin_documents
from qisxml.xmlio import DocumentSet, read_path

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def docset_with(*docs) -> DocumentSet:
    """Builtin libraries plus extra (source, document) pairs or fixture names."""
    extra = []
    for d in docs:
        if isinstance(d, str):
            extra.append((d, read_path(FIXTURES / d)))
        else:
            extra.append(d)
    return DocumentSet(builtin_documents() + extra)


def adder_set(n: int, *docs) -> DocumentSet:
    return docset_with((f"adder{n}.xml", generate_adder(n)), *docs)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


# acceptance summary: one line per criterion at the end of the run
_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _acceptance[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance, key=lambda n: int(n.split("_")[2])):
        terminalreporter.write_line(f"{_acceptance[name]}  {name}")


def adder_program(n: int, a: int, b: int, program_id: str = "add"):
    """Program preparing InputA = a and InputB = b, then running adder<n>."""
    from qisxml.model import (
        CircuitRef,
        ComplexValue,
        Execute,
        Identification,
        Memory,
        Prepare,
        Program,
        QubitSet,
        Register,
    )

    ones = [3 * i + 1 for i in range(n) if (a >> i) & 1] + [3 * i + 2 for i in range(n) if (b >> i) & 1]
    prepare = Prepare((QubitSet(tuple(sorted(ones)), ComplexValue(1.0)),)) if ones else None
    register = Register(3 * n, prepare=prepare)
    return Program(Identification(program_id), Memory(3 * n), body=(Execute(register, CircuitRef(f"adder{n}")),))
