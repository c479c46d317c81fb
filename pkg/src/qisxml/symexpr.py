"""Symbolic complex expressions found in matrix cells and multipliers.

Grammar, lowest to highest precedence::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary | unary)*      # adjacency multiplies
    unary   := ("-" | "+") unary | power
    power   := atom ("^" unary)?                        # right associative
    atom    := NUMBER | NAME | FUNC "(" expr ")" | "(" expr ")"

Greek letters are folded onto their spelled-out names, so ``θ`` and
``theta`` denote the same parameter and ``π`` is the constant ``pi``.
"""

from __future__ import annotations

import cmath
import html
import math
import re
import unicodedata
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import DomainError, ExpressionError, ExprSyntaxError, UnboundParameter

CONSTANTS = {"pi": complex(math.pi), "e": complex(math.e), "i": 1j}
FUNCTIONS = ("sqrt", "cos", "sin", "exp")

# Symbolic syntax variants that are evaluated; others are carried but ignored.
EVALUATED_SYNTAXES = ("html", "odf")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    """A constant (pi, e, i) or a free parameter."""

    name: str

    @property
    def is_constant(self) -> bool:
        return self.name in CONSTANTS


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Name, Neg, BinOp, Call]


def canonical_name(name: str) -> str:
    """Map Greek letters to their ASCII names; other names pass through."""
    if len(name) == 1 and not name.isascii():
        try:
            uname = unicodedata.name(name)
        except ValueError:
            return name
        if uname.startswith("GREEK SMALL LETTER "):
            return uname.removeprefix("GREEK SMALL LETTER ").lower()
        if uname.startswith("GREEK CAPITAL LETTER "):
            return uname.removeprefix("GREEK CAPITAL LETTER ").capitalize()
    return name


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*|[^\W\d_])
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ExprSyntaxError(pos, f"unexpected character {source[pos]!r}")
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str) -> None:
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def starts_atom(self) -> bool:
        kind, text, _ = self.peek()
        return kind in ("num", "name") or (kind == "op" and text == "(")

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                node = BinOp(text, node, self.unary())
            elif self.starts_atom():
                node = BinOp("*", node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text in "+-":
            self.take()
            operand = self.unary()
            return Neg(operand) if text == "-" else operand
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def close_paren(self) -> None:
        kind, text, pos = self.peek()
        if kind == "op" and text == ")":
            self.take()
        elif kind == "end":
            # an unclosed group at end of input is closed implicitly
            return
        else:
            raise ExprSyntaxError(pos, f"expected ')' but found {text!r}")

    def atom(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            name = canonical_name(text)
            if name in FUNCTIONS:
                nxt = self.take()
                if nxt[:2] != ("op", "("):
                    raise ExprSyntaxError(nxt[2], f"expected '(' after {name}")
                arg = self.expr()
                self.close_paren()
                return Call(name, arg)
            return Name(name)
        if kind == "op" and text == "(":
            inner = self.expr()
            self.close_paren()
            return inner
        if kind == "end":
            raise ExprSyntaxError(pos, "unexpected end of expression")
        raise ExprSyntaxError(pos, f"unexpected {text!r}")


def parse_expr(source: str) -> Expr:
    """Parse expression text (HTML entities are decoded first)."""
    text = html.unescape(source).strip()
    if not text:
        raise ExprSyntaxError(0, "empty expression")
    parser = _Parser(text)
    node = parser.expr()
    kind, tok, pos = parser.peek()
    if kind != "end":
        raise ExprSyntaxError(pos, f"unexpected {tok!r}")
    return node


def free_parameters(e: Expr) -> set[str]:
    if isinstance(e, Num):
        return set()
    if isinstance(e, Name):
        return set() if e.is_constant else {e.name}
    if isinstance(e, Neg):
        return free_parameters(e.operand)
    if isinstance(e, Call):
        return free_parameters(e.arg)
    return free_parameters(e.left) | free_parameters(e.right)


def eval_expr(e: Expr, bindings: Mapping[str, float] | None = None) -> complex:
    """Evaluate with complex arithmetic; ``e^x`` is the complex exponential."""
    env = {canonical_name(k): v for k, v in (bindings or {}).items()}
    return _eval(e, env)


def _eval(e: Expr, env: Mapping[str, float]) -> complex:
    if isinstance(e, Num):
        return complex(e.value)
    if isinstance(e, Name):
        if e.name in CONSTANTS:
            return CONSTANTS[e.name]
        if e.name not in env:
            raise UnboundParameter(e.name)
        return complex(env[e.name])
    if isinstance(e, Neg):
        return -_eval(e.operand, env)
    if isinstance(e, Call):
        arg = _eval(e.arg, env)
        if e.func == "sqrt":
            return cmath.sqrt(arg)
        if e.func == "cos":
            return cmath.cos(arg)
        if e.func == "sin":
            return cmath.sin(arg)
        return cmath.exp(arg)
    if e.op == "^" and e.left == Name("e"):
        return cmath.exp(_eval(e.right, env))
    a = _eval(e.left, env)
    b = _eval(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        if b == 0:
            raise DomainError("division by zero")
        return a / b
    if a == 0 and (b.real < 0 or b.imag != 0):
        raise DomainError("zero raised to a negative or complex power")
    try:
        return a**b
    except (OverflowError, ZeroDivisionError) as exc:
        raise DomainError(str(exc)) from exc


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_text(e: Expr) -> str:
    """Render an expression so that parse_expr(to_text(e)) == e."""
    if isinstance(e, Num):
        if e.value.is_integer() and abs(e.value) < 1e15:
            return str(int(e.value))
        return repr(e.value)
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    if isinstance(e, Neg):
        inner = e.operand
        body = to_text(inner)
        if isinstance(inner, BinOp) and inner.op in _PREC:
            body = f"({body})"
        return f"-{body}"
    if e.op == "^":
        left = to_text(e.left)
        if isinstance(e.left, (BinOp, Neg)):
            left = f"({left})"
        right = to_text(e.right)
        if isinstance(e.right, BinOp) and e.right.op != "^":
            right = f"({right})"
        return f"{left}^{right}"
    prec = _PREC[e.op]
    left = to_text(e.left)
    if isinstance(e.left, BinOp) and e.left.op in _PREC and _PREC[e.left.op] < prec:
        left = f"({left})"
    right = to_text(e.right)
    if isinstance(e.right, BinOp) and e.right.op in _PREC and _PREC[e.right.op] <= prec:
        right = f"({right})"
    elif isinstance(e.right, Neg):
        right = f"({right})"
    return f"{left} {e.op} {right}"


def evaluate_symbolic(entries, bindings: Mapping[str, float] | None = None) -> complex:
    """Evaluate the first parseable entry among the recognised syntaxes.

    ``entries`` is a sequence of ``(syntax, text)`` pairs.
    """
    errors = []
    for syntax, text in entries:
        if syntax.lower() not in EVALUATED_SYNTAXES:
            continue
        try:
            tree = parse_expr(text)
        except ExprSyntaxError as exc:
            errors.append(f"{syntax}: {exc}")
            continue
        return eval_expr(tree, bindings)
    if errors:
        raise ExpressionError("no symbolic entry parses (" + "; ".join(errors) + ")")
    raise ExpressionError("no symbolic entry in an evaluated syntax")


def symbolic_parameters(entries) -> set[str]:
    """Free parameter names of the entry evaluate_symbolic would use."""
    for syntax, text in entries:
        if syntax.lower() not in EVALUATED_SYNTAXES:
            continue
        try:
            return free_parameters(parse_expr(text))
        except ExprSyntaxError:
            continue
    return set()
