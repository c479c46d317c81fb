"""Program to QCL source translation, with every circuit expanded inline."""

from __future__ import annotations

from typing import Mapping, Sequence

from . import __version__
from .errors import FixedValueMapUnsupported, PrepareValueUnsupported, SubProgramUnsupported, UnsupportedGate
from .model import (
    TOLERANCE,
    Circuit,
    CircuitRef,
    Execute,
    Gate,
    Measure,
    Operation,
    Prepare,
    Program,
    ProgramRef,
    effective_measure_targets,
    resolve_register,
)
from .xmlio import DocumentSet

RULE = "// " + "=" * 5


def fresh_register_name(counter: int) -> str:
    return f"register{counter:04d}"


def _single(name: str):
    return lambda r, bindings: f"{name}({r}[0]);"


def _shift(r: str, bindings: Mapping[str, float]) -> str:
    theta = bindings.get("theta")
    if theta is None:
        raise UnsupportedGate("SHIFT (unbound theta)")
    return f"Phase({_num(2 * 3.141592653589793 * theta)}, {r}[0]);"


def _num(x: float) -> str:
    return repr(float(x))


# gate id -> emitter(register name, parameter bindings) -> statement
ENCODINGS = {
    "I": lambda r, b: f"// identity on {r}[0]",
    "X": _single("X"),
    "Y": _single("Y"),
    "Z": _single("Z"),
    "H": _single("H"),
    "S": _single("S"),
    "T": _single("T"),
    "SQRT-NOT": _single("SqrtNot"),
    "SHIFT": _shift,
    "C-NOT": lambda r, b: f"CNot({r}[1],{r}[0]);",
    "TOFFOLI": lambda r, b: f"CNot({r}[2], {r}[0] & {r}[1]);",
    "SWAP": lambda r, b: f"Swap({r}[0],{r}[1]);",
    "C-Z": lambda r, b: f"CPhase(pi, {r}[0] & {r}[1]);",
    "C-S": lambda r, b: f"CPhase(pi/2, {r}[0] & {r}[1]);",
    "C-T": lambda r, b: f"CPhase(pi/4, {r}[0] & {r}[1]);",
}


class _Emitter:
    def __init__(self, program: Program, docset: DocumentSet) -> None:
        self.program = program
        self.docset = docset
        self.lines: list[str] = []
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return fresh_register_name(self.counter)

    def emit(self, *lines: str) -> None:
        self.lines.extend(lines)

    # -- pieces ------------------------------------------------------------------

    def header(self) -> None:
        self.emit(
            RULE,
            f"// QIS-XML QCL Compiler v{__version__}",
            RULE,
            "",
            "int i;",
            "int value;",
            "// Allocate program memory",
            f"qureg memory[{self.program.memory.size}];",
        )

    def alias(self, indices: Sequence[int], comment: str) -> str:
        name = self.fresh()
        self.emit("", f"// {comment}")
        if list(indices) == list(range(1, self.program.memory.size + 1)):
            self.emit(f"qureg {name} = memory;")
        else:
            qubits = ",".join(str(i - 1) for i in indices)
            self.emit(f"// register addresses memory qubits {qubits}")
            self.emit(f"qureg {name} = " + "&".join(f"memory[{i - 1}]" for i in indices) + ";")
        return name

    def prepare(self, prepare: Prepare | None, register: str) -> None:
        if prepare is None:
            return
        self.emit("// PREPARE")
        for qs in prepare.qubit_sets:
            z = qs.value.evaluate()
            if abs(z - 1) <= TOLERANCE:
                want = 1
            elif abs(z) <= TOLERANCE:
                want = 0
            else:
                raise PrepareValueUnsupported(f"only basis values 0 and 1 can be prepared, got {z}")
            for local in qs.qubit_indexes:
                k = local - 1
                self.emit(f"measure {register}[{k}],value;", f"if value != {want} {{ X({register}[{k}]); }}")

    def circuit(self, circuit: Circuit, base: str, slots: Sequence[int], bindings, depth: int = 0) -> None:
        """Emit a circuit whose qubit q lives at base[slots[q-1]]."""
        self.emit("", f"// CIRCUIT {circuit.id or circuit.name or 'anonymous'}")
        for s, step in enumerate(circuit.steps, 1):
            if s > 1:
                self.emit("")
            self.emit(f"// STEP {s}")
            for o, op in enumerate(step, 1):
                self.emit(f"// OPERATION {o}")
                self.operation(op, base, slots, bindings, depth)

    def operation(self, op: Operation, base: str, slots: Sequence[int], bindings, depth: int) -> None:
        if any(m.fixed_value is not None for m in op.maps):
            raise FixedValueMapUnsupported("maps with a fixed value cannot be compiled")
        target = op.target
        if isinstance(target, CircuitRef):
            target = self.docset.resolve(target, "circuit")
        elif not isinstance(target, Gate):
            target = self.docset.resolve(target, "gate")
        by_input = {m.input: m.qubit for m in op.maps}
        local = [slots[by_input[i] - 1] for i in range(1, target.size + 1)]
        scope = {**bindings, **op.bindings}
        if isinstance(target, Circuit):
            if op.reverse:
                raise UnsupportedGate(f"{target.id} (reversed circuit)")
            self.circuit(target, base, local, scope, depth + 1)
            return
        encode = ENCODINGS.get(target.id)
        if encode is None:
            raise UnsupportedGate(target.id)
        name = self.fresh()
        self.emit(f"qureg {name} = " + "&".join(f"{base}[{k}]" for k in local) + ";")
        statement = encode(name, scope)
        if op.reverse and not statement.startswith("//"):
            statement = "!" + statement
        self.emit(statement)

    def measure(self, indices: Sequence[int]) -> None:
        self.emit("// MEASUREMENT")
        zero_based = sorted(i - 1 for i in indices)
        runs: list[list[int]] = []
        for k in zero_based:
            if runs and runs[-1][-1] == k - 1:
                runs[-1].append(k)
            else:
                runs.append([k])
        for run in runs:
            self.emit(
                f"for i={run[0]} to {run[-1]} {{",
                "    measure memory[i],value;",
                '    print i,"=",value;',
                "}",
            )

    # -- whole program -------------------------------------------------------------

    def program_text(self) -> str:
        program = self.program
        mem = program.memory
        self.header()
        if mem.prepare is not None:
            self.emit("")
            self.prepare(mem.prepare, "memory")
        for n, item in enumerate(program.body, 1):
            indices = resolve_register(item.register, mem.size, program.register_lookup)
            if isinstance(item, Measure):
                self.emit("")
                self.measure(indices)
                continue
            self.execute(item, n, indices)
        if not program.measures:
            self.emit("")
            self.measure(effective_measure_targets(program))
        return "\n".join(self.lines) + "\n"

    def execute(self, item: Execute, n: int, indices: Sequence[int]) -> None:
        target = item.target
        if isinstance(target, (Program, ProgramRef)):
            raise SubProgramUnsupported("executing a sub-program cannot be compiled")
        if isinstance(target, CircuitRef):
            target = self.docset.resolve(target, "circuit")
        register = self.alias(indices, f"EXECUTE {n}")
        self.prepare(item.register.prepare, register)
        self.circuit(target, register, list(range(target.size)), {})


def compile_qcl(program: Program, docset: DocumentSet) -> str:
    """QCL source for a program; deterministic for a given model."""
    return _Emitter(program, docset).program_text()
