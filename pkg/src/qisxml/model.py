"""In-memory QIS-XML entities and the functions that give them meaning.

All entities are frozen dataclasses holding tuples, so they compare by value
and can be shared freely. Indices follow the document convention: 1-based,
with gate input 1 (and memory qubit 1) as the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Union

import numpy as np

from . import symexpr
from .errors import (
    CellOutOfRange,
    DanglingReference,
    ExpressionError,
    IndexOutOfMemory,
    NonSquare,
    SizeMismatch,
)

TOLERANCE = 1e-9


@dataclass(frozen=True)
class ComplexValue:
    re: Optional[float] = None
    im: Optional[float] = None
    symbolic: tuple[tuple[str, str], ...] = ()

    @property
    def has_numeric(self) -> bool:
        return self.re is not None or self.im is not None

    @property
    def numeric(self) -> complex:
        return complex(self.re or 0.0, self.im or 0.0)

    def evaluate(self, bindings: Mapping[str, float] | None = None) -> complex:
        # numeric attributes win over symbolic text when both are present
        if self.has_numeric:
            return self.numeric
        if not self.symbolic:
            raise ExpressionError("complex value has neither numeric parts nor symbolic text")
        return symexpr.evaluate_symbolic(self.symbolic, bindings)

    def display(self, prefer: str = "html") -> str:
        for syntax, text in self.symbolic:
            if syntax == prefer:
                return text
        if self.symbolic and not self.has_numeric:
            return self.symbolic[0][1]
        return format_complex(self.numeric)


def format_complex(z: complex, digits: int = 9) -> str:
    """Compact human form: 1, -1, i, 0.5+0.5i, ..."""

    def num(x: float) -> str:
        text = f"{x:.{digits}g}"
        return "0" if text == "-0" else text

    re_, im = z.real, z.imag
    if abs(im) < 10**-digits:
        return num(re_)
    imag = "i" if abs(im - 1) < 10**-digits else "-i" if abs(im + 1) < 10**-digits else f"{num(im)}i"
    if abs(re_) < 10**-digits:
        return imag
    sign = "" if imag.startswith("-") else "+"
    return f"{num(re_)}{sign}{imag}"


@dataclass(frozen=True)
class MatrixCell:
    row: int
    col: int
    value: ComplexValue


@dataclass(frozen=True)
class UnitaryTransformation:
    size: int
    cells: tuple[MatrixCell, ...] = ()
    multiplier: Optional[ComplexValue] = None

    @property
    def dim(self) -> int:
        return 2**self.size


@dataclass(frozen=True)
class QubitState:
    zero: ComplexValue
    one: ComplexValue
    index: Optional[int] = None


@dataclass(frozen=True)
class Identification:
    id: str
    agency: Optional[str] = None
    version: Optional[str] = None


@dataclass(frozen=True)
class Reference:
    id: str
    library_id: Optional[str] = None
    agency_id: Optional[str] = None
    version: Optional[str] = None
    uri: Optional[str] = None


@dataclass(frozen=True)
class GateRef(Reference):
    pass


@dataclass(frozen=True)
class CircuitRef(Reference):
    pass


@dataclass(frozen=True)
class ProgramRef(Reference):
    pass


@dataclass(frozen=True)
class RegisterRef(Reference):
    pass


@dataclass(frozen=True)
class Parameter:
    name: str
    description: Optional[str] = None


@dataclass(frozen=True)
class RenderHint:
    """Drawing hint: which inputs are controls and how the target looks."""

    control_inputs: tuple[int, ...] = ()
    target_glyph: str = "box"  # box | oplus | swap-cross | dot
    label: Optional[str] = None


GLYPHS = ("box", "oplus", "swap-cross", "dot")


@dataclass(frozen=True)
class Gate:
    identification: Identification
    name: str
    transformation: UnitaryTransformation
    nickname: Optional[str] = None
    description: Optional[str] = None
    parameters: tuple[Parameter, ...] = ()
    render_hint: Optional[RenderHint] = None

    @property
    def id(self) -> str:
        return self.identification.id

    @property
    def size(self) -> int:
        return self.transformation.size

    @property
    def parameter_names(self) -> set[str]:
        return {symexpr.canonical_name(p.name) for p in self.parameters}

    @property
    def label(self) -> str:
        return self.nickname or self.id

    def matrix(self, bindings: Mapping[str, float] | None = None) -> np.ndarray:
        return realize_matrix(self.transformation, bindings)


@dataclass(frozen=True)
class Map:
    input: int
    qubit: Optional[int] = None
    fixed_value: Optional[int] = None


@dataclass(frozen=True)
class Operation:
    maps: tuple[Map, ...]
    target: Union[Gate, GateRef, CircuitRef]
    reverse: bool = False
    parameter_bindings: tuple[tuple[str, float], ...] = ()

    @property
    def qubits(self) -> list[int]:
        return [m.qubit for m in self.maps if m.qubit is not None]

    @property
    def bindings(self) -> dict[str, float]:
        return {symexpr.canonical_name(k): v for k, v in self.parameter_bindings}


@dataclass(frozen=True)
class Label:
    qubit: int
    name: str


@dataclass(frozen=True)
class Circuit:
    size: int
    steps: tuple[tuple[Operation, ...], ...] = ()
    identification: Optional[Identification] = None
    name: Optional[str] = None
    description: Optional[str] = None
    inputs: tuple[Label, ...] = ()
    outputs: tuple[Label, ...] = ()

    @property
    def id(self) -> Optional[str]:
        return self.identification.id if self.identification else None

    @property
    def operation_count(self) -> int:
        return sum(len(step) for step in self.steps)


@dataclass(frozen=True)
class QubitSet:
    qubit_indexes: tuple[int, ...]
    value: ComplexValue


@dataclass(frozen=True)
class Prepare:
    qubit_sets: tuple[QubitSet, ...] = ()


@dataclass(frozen=True)
class QubitRange:
    start: int
    end: int


Selector = Union[int, QubitRange, RegisterRef]


@dataclass(frozen=True)
class Register:
    size: int
    selectors: tuple[Selector, ...] = ()
    prepare: Optional[Prepare] = None
    identification: Optional[Identification] = None

    @property
    def qubit_indexes(self) -> list[int]:
        return [s for s in self.selectors if isinstance(s, int)]

    @property
    def qubit_ranges(self) -> list[QubitRange]:
        return [s for s in self.selectors if isinstance(s, QubitRange)]

    @property
    def register_refs(self) -> list[RegisterRef]:
        return [s for s in self.selectors if isinstance(s, RegisterRef)]


@dataclass(frozen=True)
class Memory:
    size: int
    identification: Optional[Identification] = None
    name: Optional[str] = None
    prepare: Optional[Prepare] = None
    qubits: tuple[QubitState, ...] = ()


@dataclass(frozen=True)
class Execute:
    register: Register
    target: Union["Circuit", CircuitRef, "Program", ProgramRef]


@dataclass(frozen=True)
class Measure:
    register: Register


@dataclass(frozen=True)
class Program:
    identification: Identification
    memory: Memory
    name: Optional[str] = None
    global_registers: tuple[Register, ...] = ()
    body: tuple[Union[Execute, Measure], ...] = ()

    @property
    def id(self) -> str:
        return self.identification.id

    @property
    def executes(self) -> list[Execute]:
        return [b for b in self.body if isinstance(b, Execute)]

    @property
    def measures(self) -> list[Measure]:
        return [b for b in self.body if isinstance(b, Measure)]

    def register_lookup(self, ref: Reference) -> Register:
        for reg in self.global_registers:
            if reg.identification is not None and reg.identification.id == ref.id:
                return reg
        raise DanglingReference(ref.id, "register")


@dataclass(frozen=True)
class GateLibrary:
    identification: Optional[Identification] = None
    gates: tuple[Gate, ...] = ()


@dataclass(frozen=True)
class CircuitLibrary:
    identification: Optional[Identification] = None
    circuits: tuple[Circuit, ...] = ()


@dataclass(frozen=True)
class ProgramLibrary:
    identification: Optional[Identification] = None
    programs: tuple[Program, ...] = ()


@dataclass(frozen=True)
class Instance:
    identification: Optional[Identification] = None
    gate_libraries: tuple[GateLibrary, ...] = ()
    circuit_libraries: tuple[CircuitLibrary, ...] = ()
    program_libraries: tuple[ProgramLibrary, ...] = ()


Library = Union[GateLibrary, CircuitLibrary, ProgramLibrary]
Document = Union[Instance, GateLibrary, CircuitLibrary, ProgramLibrary]


def libraries_of(doc: Document) -> list[Library]:
    if isinstance(doc, Instance):
        return [*doc.gate_libraries, *doc.circuit_libraries, *doc.program_libraries]
    return [doc]


# -- operations ----------------------------------------------------------------


def realize_matrix(
    transformation: UnitaryTransformation, bindings: Mapping[str, float] | None = None
) -> np.ndarray:
    """Dense 2^size x 2^size matrix; absent cells are zero."""
    dim = transformation.dim
    m = np.zeros((dim, dim), dtype=complex)
    for cell in transformation.cells:
        if not (1 <= cell.row <= dim and 1 <= cell.col <= dim):
            raise CellOutOfRange(cell.row, cell.col, dim)
        m[cell.row - 1, cell.col - 1] = cell.value.evaluate(bindings)
    if transformation.multiplier is not None:
        m *= transformation.multiplier.evaluate(bindings)
    return m


def conjugate_transpose(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquare(f"matrix of shape {m.shape} is not square")
    return m.conj().T


def is_unitary(m: np.ndarray, tol: float = TOLERANCE) -> bool:
    dim = m.shape[0]
    return bool(np.max(np.abs(m @ conjugate_transpose(m) - np.eye(dim))) <= tol)


RegisterResolver = Callable[[Reference], Register]


def resolve_register(
    reg: Register,
    memory_size: int,
    registry: RegisterResolver | None = None,
    _seen: frozenset = frozenset(),
) -> list[int]:
    """Memory indices addressed by a register, in document order."""
    if not reg.selectors:
        indices = list(range(1, reg.size + 1))
    else:
        indices = []
        for sel in reg.selectors:
            if isinstance(sel, int):
                indices.append(sel)
            elif isinstance(sel, QubitRange):
                step = 1 if sel.end >= sel.start else -1
                indices.extend(range(sel.start, sel.end + step, step))
            else:
                if registry is None or sel.id in _seen:
                    raise DanglingReference(sel.id, "register")
                target = registry(sel)
                indices.extend(resolve_register(target, memory_size, registry, _seen | {sel.id}))
    for idx in indices:
        if not 1 <= idx <= memory_size:
            raise IndexOutOfMemory(idx, memory_size)
    if len(indices) != reg.size:
        raise SizeMismatch(reg.size, len(indices))
    return indices


def effective_measure_targets(program: Program) -> list[int]:
    """Memory indices measured by a program: every qubit when no Measure is given."""
    if not program.measures:
        return list(range(1, program.memory.size + 1))
    out: list[int] = []
    for measure in program.measures:
        for idx in resolve_register(measure.register, program.memory.size, program.register_lookup):
            if idx not in out:
                out.append(idx)
    return out
