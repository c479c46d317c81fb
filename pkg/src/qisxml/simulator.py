"""Dense state-vector execution of programs, plus circuit unitaries.

The state of an n-qubit memory is kept as an ndarray of shape (2,)*n, axis 0
being memory qubit 1, so a C-order flatten puts qubit 1 at the most
significant bit of the basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateTarget,
    FixedValueMapUnsupported,
    IncompleteMapping,
    MemoryTooLarge,
    NestedCircuitDepthExceeded,
    PrepareValueUnsupported,
    SubProgramUnsupported,
    ValidationFailed,
)
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
    conjugate_transpose,
    effective_measure_targets,
    resolve_register,
)
from .xmlio import DocumentSet

MAX_QUBITS = 24
MAX_UNITARY_QUBITS = 10
MAX_NESTING = 16


class StateVector:
    """Amplitudes of an n-qubit register, qubit 1 most significant."""

    def __init__(self, n: int, amplitudes: Optional[np.ndarray] = None) -> None:
        if n > MAX_QUBITS:
            raise MemoryTooLarge(f"{n} qubits requested, at most {MAX_QUBITS} are supported")
        self.n = n
        if amplitudes is None:
            self.tensor = np.zeros((2,) * n, dtype=complex)
            self.tensor[(0,) * n] = 1.0
        else:
            self.tensor = np.asarray(amplitudes, dtype=complex).reshape((2,) * n)

    @classmethod
    def basis(cls, bits: Sequence[int]) -> "StateVector":
        state = cls(len(bits))
        state.tensor[(0,) * len(bits)] = 0.0
        state.tensor[tuple(bits)] = 1.0
        return state

    @property
    def amplitudes(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.tensor) ** 2))

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.tensor.copy())

    def probability_of_one(self, qubit: int) -> float:
        axis = qubit - 1
        sub = np.take(self.tensor, 1, axis=axis)
        return float(np.sum(np.abs(sub) ** 2))

    def collapse(self, qubit: int, bit: int) -> None:
        axis = qubit - 1
        index = [slice(None)] * self.n
        index[axis] = 1 - bit
        self.tensor[tuple(index)] = 0.0
        norm = np.sqrt(self.norm())
        if norm > 0:
            self.tensor /= norm


def apply_gate(state: StateVector, matrix: np.ndarray, targets: Sequence[int]) -> StateVector:
    """Apply a 2^k x 2^k matrix in place; targets[i] receives gate input i+1."""
    k = len(targets)
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2**k, 2**k):
        raise DimensionMismatch(f"matrix of shape {matrix.shape} cannot act on {k} qubit(s)")
    if len(set(targets)) != k:
        raise DuplicateTarget(f"targets {list(targets)} repeat a qubit")
    for t in targets:
        if not 1 <= t <= state.n:
            raise DimensionMismatch(f"target qubit {t} outside a {state.n}-qubit state")
    axes = [t - 1 for t in targets]
    gate = matrix.reshape((2,) * (2 * k))
    # contract the gate's column indices with the target axes, then move the
    # resulting row indices back where the targets were
    moved = np.tensordot(gate, state.tensor, axes=(list(range(k, 2 * k)), axes))
    state.tensor = np.moveaxis(moved, list(range(k)), axes)
    return state


# -- flattening circuits into primitive gate applications ----------------------


@dataclass(frozen=True)
class Primitive:
    matrix: np.ndarray
    qubits: tuple[int, ...]  # circuit-local, in gate input order
    gate_id: str


def _operation_primitives(
    op: Operation, docset: DocumentSet, bindings: Mapping[str, float], depth: int
) -> list[Primitive]:
    if any(m.fixed_value is not None for m in op.maps):
        raise FixedValueMapUnsupported("maps with a fixed value cannot be simulated")
    target = op.target
    if isinstance(target, CircuitRef):
        target = docset.resolve(target, "circuit")
    elif not isinstance(target, Gate):
        target = docset.resolve(target, "gate")
    size = target.size
    by_input = {m.input: m.qubit for m in op.maps}
    if sorted(by_input) != list(range(1, size + 1)):
        raise IncompleteMapping(f"operation maps inputs {sorted(by_input)} but its target has {size}")
    qubits = [by_input[i] for i in range(1, size + 1)]
    scope = {**bindings, **op.bindings}
    if isinstance(target, Gate):
        m = target.matrix(scope)
        if op.reverse:
            m = conjugate_transpose(m)
        return [Primitive(m, tuple(qubits), target.id)]
    inner = flatten_circuit(target, docset, scope, depth + 1)
    if op.reverse:
        inner = [Primitive(conjugate_transpose(p.matrix), p.qubits, p.gate_id) for p in reversed(inner)]
    return [Primitive(p.matrix, tuple(qubits[q - 1] for q in p.qubits), p.gate_id) for p in inner]


def flatten_circuit(
    circuit: Circuit, docset: DocumentSet, bindings: Mapping[str, float] | None = None, depth: int = 0
) -> list[Primitive]:
    """Every gate application of a circuit in time order, nested circuits expanded."""
    if depth > MAX_NESTING:
        raise NestedCircuitDepthExceeded(f"circuits nest deeper than {MAX_NESTING} levels")
    out: list[Primitive] = []
    for step in circuit.steps:
        for op in step:
            out.extend(_operation_primitives(op, docset, bindings or {}, depth))
    return out


def circuit_unitary(
    circuit: Circuit, docset: DocumentSet, bindings: Mapping[str, float] | None = None
) -> np.ndarray:
    """Composed 2^size matrix of a circuit; later steps multiply on the left."""
    if circuit.size > MAX_UNITARY_QUBITS:
        raise MemoryTooLarge(f"unitary of a {circuit.size}-qubit circuit is too large")
    n = circuit.size
    dim = 2**n
    # evolve every basis column at once: an extra trailing axis indexes them
    state = StateVector(n)
    columns = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for prim in flatten_circuit(circuit, docset, bindings):
        state.tensor = columns
        state.n = n
        apply_gate(state, prim.matrix, prim.qubits)
        columns = state.tensor
    return columns.reshape(dim, dim)


# -- programs ------------------------------------------------------------------


@dataclass(frozen=True)
class MeasurementRecord:
    """Measured bits in ascending 1-based memory order."""

    bits: tuple[tuple[int, int], ...]
    seed: Optional[int]

    def as_dict(self) -> dict[int, int]:
        return dict(self.bits)

    def lines(self) -> list[str]:
        # printed 0-based, one "i = b" per qubit
        return [f"{index - 1} = {bit}" for index, bit in self.bits]


@dataclass(frozen=True)
class Distribution:
    """Outcome probabilities over the measured qubits (ascending 1-based order)."""

    qubits: tuple[int, ...]
    outcomes: tuple[tuple[tuple[int, ...], float], ...]

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return dict(self.outcomes)

    def lines(self) -> list[str]:
        return [f"{''.join(map(str, bits))} {p:.9f}" for bits, p in self.outcomes]


def _prepare(state: StateVector, prepare: Optional[Prepare], indices: Sequence[int], rng, measured: dict) -> None:
    if prepare is None:
        return
    for qs in prepare.qubit_sets:
        z = qs.value.evaluate()
        if abs(z - 1) <= TOLERANCE:
            want = 1
        elif abs(z) <= TOLERANCE:
            want = 0
        else:
            raise PrepareValueUnsupported(f"only basis values 0 and 1 can be prepared, got {z}")
        for local in qs.qubit_indexes:
            qubit = indices[local - 1]
            # measure, then flip when the outcome differs from the wanted bit
            bit = _measure(state, qubit, rng)
            if bit != want:
                apply_gate(state, _X, [qubit])
            measured.pop(qubit, None)


_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _measure(state: StateVector, qubit: int, rng) -> int:
    p1 = state.probability_of_one(qubit)
    if p1 <= TOLERANCE:
        bit = 0
    elif p1 >= 1 - TOLERANCE:
        bit = 1
    else:
        bit = int(rng.random() < p1)
    state.collapse(qubit, bit)
    return bit


def _run_executes(program: Program, docset: DocumentSet, state: StateVector, rng) -> None:
    mem = program.memory
    measured: dict[int, int] = {}
    _prepare(state, mem.prepare, list(range(1, mem.size + 1)), rng, measured)
    for item in program.body:
        indices = resolve_register(item.register, mem.size, program.register_lookup)
        if isinstance(item, Measure):
            for q in indices:
                measured[q] = _measure(state, q, rng)
            continue
        target = item.target
        if isinstance(target, (Program, ProgramRef)):
            raise SubProgramUnsupported("executing a sub-program is not supported")
        if isinstance(target, CircuitRef):
            target = docset.resolve(target, "circuit")
        if target.size != len(indices):
            raise DimensionMismatch(f"register of {len(indices)} qubit(s) for a circuit of size {target.size}")
        _prepare(state, item.register.prepare, indices, rng, measured)
        for prim in flatten_circuit(target, docset):
            apply_gate(state, prim.matrix, [indices[q - 1] for q in prim.qubits])


def _check(program: Program, docset: DocumentSet) -> None:
    from .validation import errors, validate

    found = errors(validate(docset))
    if found:
        raise ValidationFailed(found)


def final_state(program: Program, docset: DocumentSet, seed: Optional[int] = None) -> StateVector:
    """State after every Execute (and intermediate Measure) of a program."""
    if program.memory.size > MAX_QUBITS:
        raise MemoryTooLarge(f"memory of {program.memory.size} qubits exceeds {MAX_QUBITS}")
    state = StateVector(program.memory.size)
    _run_executes(program, docset, state, np.random.default_rng(seed))
    return state


def run_program(
    program: Program,
    docset: DocumentSet,
    seed: Optional[int] = None,
    mode: str = "sample",
    measure_all: bool = False,
    validate: bool = True,
) -> MeasurementRecord | Distribution:
    """Simulate a program and measure its effective targets.

    ``measure_all`` measures every memory qubit regardless of Measure
    elements. In ``distribution`` mode the final measurement is replaced by
    the exact marginal distribution over the measured qubits.
    """
    if mode not in ("sample", "distribution"):
        raise ValueError(f"unknown mode {mode!r}")
    if validate:
        _check(program, docset)
    if any(isinstance(b, Execute) and isinstance(b.target, (Program, ProgramRef)) for b in program.body):
        raise SubProgramUnsupported("executing a sub-program is not supported")
    rng = np.random.default_rng(seed)
    if program.memory.size > MAX_QUBITS:
        raise MemoryTooLarge(f"memory of {program.memory.size} qubits exceeds {MAX_QUBITS}")
    state = StateVector(program.memory.size)
    _run_executes(program, docset, state, rng)
    targets = list(range(1, program.memory.size + 1)) if measure_all else effective_measure_targets(program)
    targets = sorted(targets)
    if mode == "distribution":
        return distribution(state, targets)
    bits = tuple((q, _measure(state, q, rng)) for q in targets)
    return MeasurementRecord(bits, seed)


def distribution(state: StateVector, qubits: Sequence[int]) -> Distribution:
    """Marginal probabilities of the given qubits, outcomes sorted by basis index."""
    probs = np.abs(state.tensor) ** 2
    keep = [q - 1 for q in qubits]
    drop = tuple(a for a in range(state.n) if a not in keep)
    marginal = probs.sum(axis=drop) if drop else probs
    # sum() keeps remaining axes in ascending order; reorder to the requested order
    order = sorted(keep)
    marginal = np.transpose(marginal, [order.index(a) for a in keep]) if keep else marginal
    outcomes = []
    for idx in np.ndindex(*marginal.shape):
        p = float(marginal[idx])
        if p > TOLERANCE:
            outcomes.append((tuple(int(b) for b in idx), p))
    return Distribution(tuple(qubits), tuple(outcomes))
