"""Semantic checks over a DocumentSet, reported as findings rather than raised."""

from __future__ import annotations

import enum
import zlib
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import Ambiguous, CellOutOfRange, ExpressionError, NotFound, UnboundParameter
from .model import (
    TOLERANCE,
    Circuit,
    CircuitRef,
    ComplexValue,
    Execute,
    Gate,
    Measure,
    Operation,
    Program,
    ProgramRef,
    QubitRange,
    Register,
    is_unitary,
    realize_matrix,
)
from .xmlio import DocumentSet, Entry


class Severity(str, enum.Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


# check classes, in the order they are documented
QUBIT_NORMALIZATION = "QUBIT_NORMALIZATION"
CELL_OUT_OF_RANGE = "CELL_OUT_OF_RANGE"
MAP_QUBIT_OUT_OF_RANGE = "MAP_QUBIT_OUT_OF_RANGE"
MAP_INPUT_OUT_OF_RANGE = "MAP_INPUT_OUT_OF_RANGE"
DUPLICATE_MAPPING = "DUPLICATE_MAPPING"
UNMAPPED_QUBITS = "UNMAPPED_QUBITS"
DANGLING_REFERENCE = "DANGLING_REFERENCE"
EXECUTE_SIZE_MISMATCH = "EXECUTE_SIZE_MISMATCH"
INDEX_OUT_OF_BOUNDS = "INDEX_OUT_OF_BOUNDS"
NOT_UNITARY = "NOT_UNITARY"
# supplementary checks
AMBIGUOUS_REFERENCE = "AMBIGUOUS_REFERENCE"
REGISTER_SIZE_MISMATCH = "REGISTER_SIZE_MISMATCH"
BAD_EXPRESSION = "BAD_EXPRESSION"

CHECKS = (
    QUBIT_NORMALIZATION,
    CELL_OUT_OF_RANGE,
    MAP_QUBIT_OUT_OF_RANGE,
    MAP_INPUT_OUT_OF_RANGE,
    DUPLICATE_MAPPING,
    UNMAPPED_QUBITS,
    DANGLING_REFERENCE,
    EXECUTE_SIZE_MISMATCH,
    INDEX_OUT_OF_BOUNDS,
    NOT_UNITARY,
    AMBIGUOUS_REFERENCE,
    REGISTER_SIZE_MISMATCH,
    BAD_EXPRESSION,
)

UNMAPPED_MESSAGE = "Not all qubits have been mapped."


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: str
    message: str
    document: str
    library: Optional[str]
    kind: str  # gate | circuit | program
    entity: str  # entity id, or "#n" for anonymous entities
    step: Optional[int] = None  # circuit step, or program body item
    operation: Optional[int] = None

    @property
    def location(self) -> str:
        parts = [self.library or "-", f"{self.kind} {self.entity}"]
        if self.step is not None:
            parts.append(f"step {self.step}")
        if self.operation is not None:
            parts.append(f"operation {self.operation}")
        return "/".join(parts)

    def __str__(self) -> str:
        return f"{self.severity.value} {self.code} at {self.location}: {self.message}"


def errors(findings) -> list[Finding]:
    return [f for f in findings if f.severity is Severity.ERROR]


def warnings(findings) -> list[Finding]:
    return [f for f in findings if f.severity is Severity.WARNING]


class _Checker:
    def __init__(self, docset: DocumentSet, entry: Entry, strict_unitary: bool) -> None:
        self.docset = docset
        self.entry = entry
        self.strict_unitary = strict_unitary
        self.out: list[Finding] = []

    def add(self, code: str, message: str, step=None, operation=None, severity=Severity.ERROR) -> None:
        e = self.entry
        self.out.append(Finding(severity, code, message, e.source, e.library_id, e.kind, e.label, step, operation))

    # -- values and gates --------------------------------------------------

    def value(self, v: ComplexValue, what: str, bindings=None, **loc) -> Optional[complex]:
        try:
            return v.evaluate(bindings)
        except UnboundParameter:
            return None
        except ExpressionError as exc:
            self.add(BAD_EXPRESSION, f"{what}: {exc}", **loc)
            return None

    def gate(self, gate: Gate, **loc) -> None:
        t = gate.transformation
        dim = t.dim
        bad_cells = False
        for cell in t.cells:
            if not (1 <= cell.row <= dim and 1 <= cell.col <= dim):
                bad_cells = True
                self.add(
                    CELL_OUT_OF_RANGE,
                    f"Cell row={cell.row} col={cell.col} is out of the {dim}x{dim} matrix range.",
                    **loc,
                )
        # symbolic text must parse even when parameters leave it unevaluated
        for value in [c.value for c in t.cells] + ([t.multiplier] if t.multiplier else []):
            if not value.has_numeric:
                self.value(value, "symbolic value", bindings=None, **loc)
        if self.strict_unitary and not bad_cells and not gate.parameters:
            try:
                m = realize_matrix(t)
            except (ExpressionError, UnboundParameter, CellOutOfRange):
                return
            if not is_unitary(m, TOLERANCE):
                self.add(NOT_UNITARY, f"Transformation of gate {gate.id} is not unitary.", **loc)

    # -- references ----------------------------------------------------------

    def resolve(self, ref, kind: str, **loc):
        try:
            return self.docset.resolve(ref, kind)
        except NotFound:
            self.add(DANGLING_REFERENCE, f"{kind.capitalize()} reference {ref.id} cannot be resolved.", **loc)
        except Ambiguous as exc:
            self.add(AMBIGUOUS_REFERENCE, str(exc), **loc)
        return None

    def target_of(self, op: Operation, **loc):
        if isinstance(op.target, Gate):
            self.gate(op.target, **loc)
            return op.target
        kind = "circuit" if isinstance(op.target, CircuitRef) else "gate"
        return self.resolve(op.target, kind, **loc)

    # -- circuits --------------------------------------------------------------

    def circuit(self, circuit: Circuit, step_base: Optional[int] = None) -> None:
        for s, step in enumerate(circuit.steps, 1):
            sloc = s if step_base is None else step_base
            mapped = set()
            step_findings: list[tuple] = []
            for o, op in enumerate(step, 1):
                loc = {"step": sloc, "operation": o}
                target = self.target_of(op, **loc)
                size = target.size if target is not None else None
                inputs_seen = set()
                for m in op.maps:
                    if m.qubit is not None:
                        if not 1 <= m.qubit <= circuit.size:
                            step_findings.append(
                                (MAP_QUBIT_OUT_OF_RANGE, f"Map {o} qubit={m.qubit} is out of Circuit range.", loc)
                            )
                        elif m.qubit in mapped:
                            step_findings.append(
                                (DUPLICATE_MAPPING, f"Qubit {m.qubit} is mapped more than once in step {s}.", loc)
                            )
                        mapped.add(m.qubit)
                    if size is not None and not 1 <= m.input <= size:
                        step_findings.append((MAP_INPUT_OUT_OF_RANGE, f"Map {o} input={m.input} is out of Gate range.", loc))
                    elif m.input in inputs_seen:
                        step_findings.append(
                            (DUPLICATE_MAPPING, f"Input {m.input} is mapped more than once in operation {o}.", loc)
                        )
                    inputs_seen.add(m.input)
            if step_base is None and not set(range(1, circuit.size + 1)) <= mapped:
                self.add(UNMAPPED_QUBITS, UNMAPPED_MESSAGE, step=sloc, severity=Severity.WARNING)
            for code, message, loc in step_findings:
                self.add(code, message, **loc)

    # -- programs --------------------------------------------------------------

    def register(self, program: Program, reg: Register, where: str, step=None) -> Optional[int]:
        """Check a register; return its resolved length when that is known."""
        mem = program.memory.size
        count = 0
        known = True
        for sel in reg.selectors:
            if isinstance(sel, int):
                idxs = [sel]
            elif isinstance(sel, QubitRange):
                idxs = [sel.start, sel.end]
                count += abs(sel.end - sel.start) + 1
            else:
                try:
                    target = program.register_lookup(sel)
                except LookupError:
                    self.add(DANGLING_REFERENCE, f"Register reference {sel.id} cannot be resolved.", step=step)
                    known = False
                    continue
                count += target.size
                continue
            if isinstance(sel, int):
                count += 1
            for idx in idxs:
                if not 1 <= idx <= mem:
                    self.add(INDEX_OUT_OF_BOUNDS, f"{where} index {idx} is outside memory of size {mem}.", step=step)
        if not reg.selectors:
            count = reg.size
            if reg.size > mem:
                self.add(INDEX_OUT_OF_BOUNDS, f"{where} of size {reg.size} exceeds memory of size {mem}.", step=step)
        elif known and count != reg.size:
            self.add(
                REGISTER_SIZE_MISMATCH,
                f"{where} declares size {reg.size} but addresses {count} qubit(s).",
                step=step,
            )
        if reg.prepare is not None:
            for qs in reg.prepare.qubit_sets:
                for idx in qs.qubit_indexes:
                    if not 1 <= idx <= reg.size:
                        self.add(
                            INDEX_OUT_OF_BOUNDS,
                            f"Prepare index {idx} is outside {where.lower()} of size {reg.size}.",
                            step=step,
                        )
                self.value(qs.value, "prepare value", step=step)
        return reg.size

    def program(self, program: Program) -> None:
        mem = program.memory
        for q in mem.qubits:
            if q.index is not None and not 1 <= q.index <= mem.size:
                self.add(INDEX_OUT_OF_BOUNDS, f"Memory qubit index {q.index} is outside memory of size {mem.size}.")
            a = self.value(q.zero, "qubit amplitude")
            b = self.value(q.one, "qubit amplitude")
            if a is not None and b is not None:
                total = abs(a) ** 2 + abs(b) ** 2
                if abs(total - 1) > TOLERANCE:
                    label = q.index if q.index is not None else "?"
                    self.add(QUBIT_NORMALIZATION, f"Qubit {label} total probability is {total:.9g}, not 1.")
        if mem.prepare is not None:
            for qs in mem.prepare.qubit_sets:
                for idx in qs.qubit_indexes:
                    if not 1 <= idx <= mem.size:
                        self.add(INDEX_OUT_OF_BOUNDS, f"Prepare index {idx} is outside memory of size {mem.size}.")
        for reg in program.global_registers:
            self.register(program, reg, "Register")
        for n, item in enumerate(program.body, 1):
            if isinstance(item, Measure):
                self.register(program, item.register, "Measure register", step=n)
                continue
            self.register(program, item.register, "Register", step=n)
            self.execute(item, n)

    def execute(self, item: Execute, n: int) -> None:
        target = item.target
        if isinstance(target, CircuitRef):
            target = self.resolve(target, "circuit", step=n)
        elif isinstance(target, ProgramRef):
            target = self.resolve(target, "program", step=n)
        if target is None:
            return
        if isinstance(target, Circuit):
            if item.target is target:
                self.circuit(target, step_base=n)
            if item.register.size != target.size:
                self.add(
                    EXECUTE_SIZE_MISMATCH,
                    f"Register size {item.register.size} does not match circuit size {target.size}.",
                    step=n,
                )
        elif item.target is target:
            self.program(target)
        elif item.register.size != target.memory.size:
            self.add(
                EXECUTE_SIZE_MISMATCH,
                f"Register size {item.register.size} does not match program memory size {target.memory.size}.",
                step=n,
            )


def _entry_findings(docset: DocumentSet, entry: Entry, strict_unitary: bool) -> list[Finding]:
    checker = _Checker(docset, entry, strict_unitary)
    if entry.kind == "gate":
        checker.gate(entry.entity)
    elif entry.kind == "circuit":
        checker.circuit(entry.entity)
    else:
        checker.program(entry.entity)
    return sorted(checker.out, key=lambda f: (f.step or 0, f.operation or 0))


def validate(docset: DocumentSet, strict_unitary: bool = False) -> list[Finding]:
    """Run every check over every gate, circuit and program in the set.

    Findings come out grouped by document, then entity, then step and operation.
    """
    by_source: dict[str, list[Entry]] = {source: [] for source, _ in docset.documents}
    for entry in docset.entries():
        by_source[entry.source].append(entry)
    findings = []
    for entries in by_source.values():
        for entry in entries:
            findings.extend(_entry_findings(docset, entry, strict_unitary))
    return findings


# -- text report -----------------------------------------------------------------


def entity_tag(entry: Entry) -> str:
    """Identifier shown in report headers; anonymous entities get a stable hex tag."""
    if entry.identification is not None:
        return entry.identification.id
    key = f"{entry.source}:{entry.library_id}:{entry.kind}:{entry.position}".encode()
    return f"0x{zlib.crc32(key):08x}"


def describe_operation(op: Operation, docset: DocumentSet) -> str:
    target = op.target
    if isinstance(target, Gate):
        title = f"{target.name} ({target.label})"
    else:
        kind = "circuit" if isinstance(target, CircuitRef) else "gate"
        try:
            resolved = docset.resolve(target, kind)
        except LookupError:
            resolved = None
        if isinstance(resolved, Gate):
            title = f"{resolved.name} ({resolved.label})"
        elif isinstance(resolved, Circuit):
            title = f"{resolved.name or resolved.id} ({resolved.id})"
        else:
            title = f"? ({target.id})"
    if op.reverse:
        title += " reversed"
    maps = ",".join(
        f"{m.qubit}={m.input}" if m.qubit is not None else f"#{m.fixed_value}={m.input}" for m in op.maps
    )
    return f"{title} [{maps}]"


def _finding_line(f: Finding) -> str:
    if f.severity is Severity.WARNING:
        return f"Warning: {f.message}"
    return f"ERROR: {f.message}"


def _report_entry(entry: Entry, findings: list[Finding], docset: DocumentSet) -> Iterator[str]:
    def at(step=None, operation=None):
        return [f for f in findings if f.step == step and f.operation == operation]

    tag = entity_tag(entry)
    entity = entry.entity
    if entry.kind == "gate":
        yield f"Gate id{tag}, Size {entity.size}"
        yield entity.name
        if entity.description:
            yield entity.description
        yield from map(_finding_line, at())
        return
    if entry.kind == "program":
        yield f"Program id{tag}, Memory {entity.memory.size}, {len(entity.body)} item(s)"
        if entity.name:
            yield entity.name
        yield from map(_finding_line, at())
        for n, item in enumerate(entity.body, 1):
            kind = "Measure" if isinstance(item, Measure) else "Execute"
            yield f"{kind} {n}, Register size {item.register.size}"
            yield from map(_finding_line, [f for f in findings if f.step == n])
        return
    yield f"Circuit id{tag}, Size {entity.size}, {len(entity.steps)} step(s)"
    if entity.name:
        yield entity.name
    if entity.description:
        yield entity.description
    yield from map(_finding_line, at())
    for s, step in enumerate(entity.steps, 1):
        yield f"Step {s}, {len(step)} operation(s)"
        yield from map(_finding_line, at(s))
        for o, op in enumerate(step, 1):
            yield f"{o}: {describe_operation(op, docset)}"
            yield from map(_finding_line, at(s, o))


def report_text(findings: list[Finding], docset: DocumentSet, include_builtin: bool = False) -> str:
    """Plain-text report: one block per entity with its findings inline."""
    lines: list[str] = []
    for entry in docset.entries():
        if entry.source.startswith("builtin:") and not include_builtin:
            continue
        mine = [
            f
            for f in findings
            if f.document == entry.source and f.kind == entry.kind and f.entity == entry.label and f.library == entry.library_id
        ]
        lines.extend(_report_entry(entry, mine, docset))
    return "\n".join(lines) + ("\n" if lines else "")


def summary(findings) -> str:
    return f"{len(errors(findings))} errors, {len(warnings(findings))} warnings"
