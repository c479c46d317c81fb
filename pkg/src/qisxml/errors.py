"""Exception hierarchy shared by every qisxml module."""

from __future__ import annotations


class QisXmlError(Exception):
    """Base class for all qisxml failures."""


# -- expressions -------------------------------------------------------------


class ExpressionError(QisXmlError, ValueError):
    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail


class ExprSyntaxError(ExpressionError):
    def __init__(self, position: int, detail: str) -> None:
        super().__init__(f"at position {position}: {detail}")
        self.position = position


class DomainError(ExpressionError):
    pass


class UnboundParameter(QisXmlError, KeyError):
    def __init__(self, name: str) -> None:
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unbound parameter {self.name!r}"


# -- core model --------------------------------------------------------------


class CellOutOfRange(QisXmlError, ValueError):
    def __init__(self, row: int, col: int, dim: int) -> None:
        super().__init__(f"cell ({row},{col}) outside {dim}x{dim} matrix")
        self.row, self.col, self.dim = row, col, dim


class NonSquare(QisXmlError, ValueError):
    pass


class SizeMismatch(QisXmlError, ValueError):
    def __init__(self, expected: int, actual: int, what: str = "register") -> None:
        super().__init__(f"{what} size {expected} but {actual} qubit(s) resolved")
        self.expected, self.actual = expected, actual


class IndexOutOfMemory(QisXmlError, IndexError):
    def __init__(self, index: int, size: int) -> None:
        super().__init__(f"qubit index {index} outside memory of size {size}")
        self.index, self.size = index, size


class DanglingReference(QisXmlError, LookupError):
    def __init__(self, ref_id: str, kind: str = "entity") -> None:
        super().__init__(f"{kind} reference {ref_id!r} does not resolve")
        self.id, self.kind = ref_id, kind


# -- xml io ------------------------------------------------------------------


class DocumentError(QisXmlError, ValueError):
    """Structural problem in a QIS-XML document."""


class XmlSyntax(DocumentError):
    def __init__(self, line: int, col: int, detail: str = "") -> None:
        super().__init__(f"XML syntax error at line {line}, column {col}: {detail}")
        self.line, self.col = line, col


class UnknownNamespace(DocumentError):
    def __init__(self, uri: str, path: str = "") -> None:
        super().__init__(f"unknown namespace {uri!r} at {path or '/'}")
        self.uri, self.path = uri, path


class UnknownElement(DocumentError):
    def __init__(self, name: str, path: str) -> None:
        super().__init__(f"unexpected element <{name}> at {path}")
        self.name, self.path = name, path


class BadAttribute(DocumentError):
    def __init__(self, name: str, value: str | None, path: str, detail: str = "") -> None:
        msg = f"bad attribute {name}={value!r} at {path}"
        super().__init__(f"{msg}: {detail}" if detail else msg)
        self.name, self.value, self.path = name, value, path


class LoadError(QisXmlError, OSError):
    def __init__(self, path: str, detail: str) -> None:
        super().__init__(f"{path}: {detail}")
        self.path = path


class DuplicateId(QisXmlError, ValueError):
    def __init__(self, ident: str, kind: str = "entity") -> None:
        super().__init__(f"duplicate {kind} identity {ident}")
        self.id, self.kind = ident, kind


class NotFound(QisXmlError, LookupError):
    def __init__(self, ref_id: str, kind: str) -> None:
        super().__init__(f"no {kind} with id {ref_id!r} in the loaded documents")
        self.id, self.kind = ref_id, kind


class Ambiguous(QisXmlError, LookupError):
    def __init__(self, ref_id: str, candidates: list[str]) -> None:
        super().__init__(f"reference {ref_id!r} matches {len(candidates)} entities: {', '.join(candidates)}")
        self.id, self.candidates = ref_id, candidates


# -- generators, simulation, compilation -------------------------------------


class BadWidth(QisXmlError, ValueError):
    pass


class SimulationError(QisXmlError, RuntimeError):
    pass


class ValidationFailed(SimulationError):
    def __init__(self, findings: list) -> None:
        lines = "; ".join(f.message for f in findings[:5])
        super().__init__(f"{len(findings)} validation error(s): {lines}")
        self.findings = findings


class FixedValueMapUnsupported(SimulationError):
    pass


class SubProgramUnsupported(SimulationError):
    pass


class MemoryTooLarge(SimulationError):
    pass


class DimensionMismatch(SimulationError):
    pass


class DuplicateTarget(SimulationError):
    pass


class NestedCircuitDepthExceeded(SimulationError):
    pass


class PrepareValueUnsupported(SimulationError):
    pass


class IncompleteMapping(SimulationError):
    pass


class UnsupportedGate(QisXmlError, ValueError):
    def __init__(self, gate_id: str) -> None:
        super().__init__(f"gate {gate_id!r} has no QCL encoding")
        self.gate_id = gate_id
