import math
import random

import pytest

from slfd import exprparse
from slfd.errors import ExprSyntaxError, NonFiniteValue, UnknownIdentifier


def ev(text, x=0.0):
    return exprparse.evaluate(exprparse.parse(text), x)


def test_variable():
    node = exprparse.parse("x")
    assert isinstance(node, exprparse.Var)
    assert ev("x", 0.7) == 0.7


def test_log_potential_at_zero():
    val = ev("ln(abs((5/12 - x)*(1/3 + x)))", 0.0)
    assert val == pytest.approx(math.log(5.0 / 36.0), abs=1e-12)
    assert val == pytest.approx(-1.9740810, abs=1e-6)


def test_inverse_sqrt_log_potential_parses():
    node = exprparse.parse("1/sqrt(abs(x+1/3)) + ln(abs(x-1/3))")
    val = exprparse.evaluate(node, 0.9)
    assert val == pytest.approx(1.0 / math.sqrt(0.9 + 1 / 3) + math.log(0.9 - 1 / 3))


def test_power_right_associative():
    assert ev("2^3^2") == 512.0


def test_unary_minus_binds_below_power():
    assert ev("-x^2", 3.0) == -9.0
    assert ev("(-x)^2", 3.0) == 9.0


def test_precedence_mix():
    assert ev("1 + 2*3^2") == 19.0
    assert ev("2*-3 + 1") == -5.0
    assert ev("2^-1") == 0.5


def test_scientific_literals():
    assert ev("1.5e-3 + 2E2") == pytest.approx(200.0015)


def test_non_finite_signals():
    with pytest.raises(NonFiniteValue) as info:
        ev("ln(abs((5/12 - x)*(1/3 + x)))", 5.0 / 12.0)
    assert info.value.x == 5.0 / 12.0
    with pytest.raises(NonFiniteValue):
        ev("sqrt(0 - 1)")
    with pytest.raises(NonFiniteValue):
        ev("1/x", 0.0)
    with pytest.raises(NonFiniteValue):
        ev("exp(10000)")


def test_syntax_error_offsets():
    with pytest.raises(ExprSyntaxError) as info:
        exprparse.parse("1 + ")
    assert info.value.offset == 4
    with pytest.raises(ExprSyntaxError):
        exprparse.parse("sin 3")
    with pytest.raises(ExprSyntaxError):
        exprparse.parse("(1 + 2")


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as info:
        exprparse.parse("2*y")
    assert info.value.name == "y"
    with pytest.raises(UnknownIdentifier):
        exprparse.parse("tan(x)")


CANONICAL = [
    "x",
    "1 + x",
    "x - 1",
    "1 - x - 2",
    "x*x",
    "2*x + 1",
    "x/3",
    "x/3/4",
    "-x",
    "-x^2",
    "(-x)^2",
    "x^2",
    "2^3^2",
    "x^(-2)",
    "abs(x)",
    "ln(abs(x))",
    "sqrt(abs(x + 1/3))",
    "sin(x)",
    "cos(2*x)",
    "exp(-x)",
    "sin(x)*cos(x)",
    "1/sqrt(abs(x + 1/3)) + ln(abs(x - 1/3))",
    "ln(abs((5/12 - x)*(1/3 + x)))",
    "x + x + x",
    "x*(x + 1)",
    "(x + 1)*(x - 1)",
    "x - (x - 1)",
    "2/(1 + x^2)",
    "x^2 - 2*x + 1",
    "abs(x - 0.5)",
    "exp(x)/2",
    "-(x + 1)",
    "3.5",
    "0.25*x",
    "1e-3*x",
    "x/(1 - x)",
    "sqrt(x^2 + 1)",
    "cos(x)^2",
    "sin(x^2)",
    "ln(exp(x))",
    "x^2^2",
    "1 - -x",
    "2 - (3 - 4)",
    "abs(sin(x))",
    "x*2^x",
    "exp(-x^2)",
    "1/(2 + cos(x))",
    "sqrt(2)/2",
    "x - 1/3",
    "5/12 - x",
]


def _normalize(text):
    return text.replace(" ", "")


@pytest.mark.parametrize("text", CANONICAL)
def test_roundtrip_is_identity_up_to_whitespace(text):
    printed = exprparse.to_text(exprparse.parse(text))
    assert _normalize(printed) == _normalize(text)
    # printing is a fixed point
    assert exprparse.to_text(exprparse.parse(printed)) == printed


def test_roundtrip_preserves_value():
    for text in CANONICAL:
        node = exprparse.parse(text)
        again = exprparse.parse(exprparse.to_text(node))
        for x in (0.1, 0.9, -0.7):
            try:
                a = exprparse.evaluate(node, x)
            except NonFiniteValue:
                continue
            assert exprparse.evaluate(again, x) == pytest.approx(a, rel=1e-15)


def test_parser_totality_on_fuzzed_strings():
    rng = random.Random(987654)
    alphabet = "x+-*/^()0123456789. abslnqrtsincoexp_,%$"
    for _ in range(500):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 24)))
        try:
            node = exprparse.parse(text)
        except (ExprSyntaxError, UnknownIdentifier):
            continue
        try:
            exprparse.evaluate(node, 0.37)
        except NonFiniteValue:
            pass
