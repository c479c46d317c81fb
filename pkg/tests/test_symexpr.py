import cmath
import math

import pytest

from qisxml.errors import DomainError, ExprSyntaxError, UnboundParameter
from qisxml.symexpr import (
    BinOp,
    Call,
    Name,
    Neg,
    Num,
    canonical_name,
    eval_expr,
    evaluate_symbolic,
    free_parameters,
    parse_expr,
    symbolic_parameters,
    to_text,
)


@pytest.mark.parametrize(
    "text, value",
    [
        ("1/sqrt(2)", 1 / math.sqrt(2)),
        ("2 + 3 * 4", 14),
        ("(2 + 3) * 4", 20),
        ("2^3^2", 512),
        ("-2^2", -4),
        ("e^(i pi)", -1),
        ("e^(i*pi/4)", cmath.exp(1j * math.pi / 4)),
        ("2 pi", 2 * math.pi),
        ("i", 1j),
        ("1.5e2", 150),
        ("&#960;", math.pi),
    ],
)
def test_constant_expressions(text, value):
    assert abs(eval_expr(parse_expr(text)) - value) < 1e-12


def test_greek_names_fold_to_ascii():
    assert canonical_name("θ") == "theta"
    assert canonical_name("π") == "pi"
    assert canonical_name("x") == "x"
    assert parse_expr("θ") == Name("theta")
    assert eval_expr(parse_expr("cos(θ)"), {"theta": 0.0}) == 1
    assert eval_expr(parse_expr("i sin(theta)"), {"θ": math.pi / 2}) == pytest.approx(1j)


def test_free_parameters_exclude_constants():
    assert free_parameters(parse_expr("e^(i 2 pi theta) + phi")) == {"theta", "phi"}


def test_unbound_parameter():
    with pytest.raises(UnboundParameter):
        eval_expr(parse_expr("cos(theta)"))


def test_unclosed_paren_at_end_is_closed():
    assert parse_expr("e^(i 2 pi theta") == parse_expr("e^(i 2 pi theta)")


@pytest.mark.parametrize("text", ["", "1 +", "*2", "cos 2", "1 ) 2", "$"])
def test_syntax_errors(text):
    with pytest.raises(ExprSyntaxError):
        parse_expr(text)


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_expr(parse_expr("1/0"))
    with pytest.raises(DomainError):
        eval_expr(parse_expr("0^(-1)"))


def test_to_text_preserves_structure():
    trees = [
        BinOp("-", Num(1.0), BinOp("-", Num(2.0), Num(3.0))),
        BinOp("^", Neg(Num(2.0)), Num(2.0)),
        BinOp("*", Call("sqrt", Num(2.0)), Name("pi")),
        Neg(BinOp("+", Name("a"), Num(0.25))),
    ]
    for tree in trees:
        assert parse_expr(to_text(tree)) == tree


def test_evaluate_symbolic_picks_known_syntax():
    entries = (("latex", r"\frac{1}{2}"), ("html", "1/2"))
    assert evaluate_symbolic(entries) == 0.5
    assert symbolic_parameters((("odf", "cos(theta)"),)) == {"theta"}
