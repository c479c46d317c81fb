"""Builtin gate and circuit libraries, shipped as QIS-XML and parsed on demand.

Gate IDs: H, I, X, Y, Z, S (phase), SHIFT (phase shift, parameter theta),
SQRT-NOT, T (pi/8), C-NOT, C-T (controlled pi/8), C-S (controlled phase),
C-Z, DEUTSCH (parameter theta), FREDKIN, SWAP, TOFFOLI.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from .model import CircuitLibrary, GateLibrary
from .xmlio import DocumentSet, parse_document

GATES_RESOURCE = "gates.xml"
CIRCUITS_RESOURCE = "circuits.xml"
SOURCE_PREFIX = "builtin:"


def _read(name: str) -> bytes:
    return resources.files("qisxml").joinpath("data").joinpath(name).read_bytes()


@lru_cache(maxsize=None)
def builtin_gates() -> GateLibrary:
    lib = parse_document(_read(GATES_RESOURCE))
    assert isinstance(lib, GateLibrary)
    return lib


@lru_cache(maxsize=None)
def builtin_circuits() -> CircuitLibrary:
    lib = parse_document(_read(CIRCUITS_RESOURCE))
    assert isinstance(lib, CircuitLibrary)
    return lib


def builtin_documents() -> list[tuple[str, object]]:
    return [
        (SOURCE_PREFIX + GATES_RESOURCE, builtin_gates()),
        (SOURCE_PREFIX + CIRCUITS_RESOURCE, builtin_circuits()),
    ]


def builtin_set() -> DocumentSet:
    return DocumentSet(builtin_documents())


def export(directory: str | Path) -> list[Path]:
    """Write the builtin documents, byte for byte, into directory."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in (GATES_RESOURCE, CIRCUITS_RESOURCE):
        target = out / name
        target.write_bytes(_read(name))
        written.append(target)
    return written
