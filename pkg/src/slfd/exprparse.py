"""Parsing and evaluation of potential expressions q(x).

Grammar (EBNF, also documented in the README):

    expr   = term { ("+" | "-") term } ;
    term   = unary { ("*" | "/") unary } ;
    unary  = "-" unary | power ;
    power  = atom [ "^" unary ] ;
    atom   = NUMBER | "x" | FUNC "(" expr ")" | "(" expr ")" ;
    FUNC   = "abs" | "ln" | "sqrt" | "sin" | "cos" | "exp" ;

"^" is right-associative and binds tighter than unary minus, so "-x^2"
parses as -(x^2) and "2^3^2" as 2^(3^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ExprSyntaxError, NonFiniteValue, UnknownIdentifier

FUNCTIONS = ("abs", "ln", "sqrt", "sin", "cos", "exp")


class Expr:
    """Base class for expression nodes; immutable after construction."""

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float
    text: str  # literal as written, kept for faithful printing


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str) -> None:
        if not self.take(ch):
            raise ExprSyntaxError(self.pos, repr(ch))

    def number(self) -> Num:
        start = self.pos
        text = self.text
        n = len(text)
        i = start
        while i < n and text[i].isdigit():
            i += 1
        if i < n and text[i] == ".":
            i += 1
            while i < n and text[i].isdigit():
                i += 1
        if i == start or text[start:i] == ".":
            raise ExprSyntaxError(start, "a number")
        if i < n and text[i] in "eE":
            j = i + 1
            if j < n and text[j] in "+-":
                j += 1
            if j < n and text[j].isdigit():
                while j < n and text[j].isdigit():
                    j += 1
                i = j
        self.pos = i
        literal = text[start:i]
        return Num(float(literal), literal)

    def identifier(self) -> tuple[str, int]:
        start = self.pos
        text = self.text
        i = start
        while i < len(text) and (text[i].isalpha() or text[i] == "_"):
            i += 1
        self.pos = i
        return text[start:i], start


def parse(text: str) -> Expr:
    """Parse expression text into an AST; raises ExprSyntaxError on bad input."""
    sc = _Scanner(text)
    node = _expr(sc)
    sc.skip_ws()
    if sc.pos != len(text):
        raise ExprSyntaxError(sc.pos, "end of input or an operator")
    return node


def _expr(sc: _Scanner) -> Expr:
    node = _term(sc)
    while True:
        ch = sc.peek()
        if ch and ch in "+-":
            sc.pos += 1
            node = BinOp(ch, node, _term(sc))
        else:
            return node


def _term(sc: _Scanner) -> Expr:
    node = _unary(sc)
    while True:
        ch = sc.peek()
        if ch and ch in "*/":
            sc.pos += 1
            node = BinOp(ch, node, _unary(sc))
        else:
            return node


def _unary(sc: _Scanner) -> Expr:
    if sc.take("-"):
        return Neg(_unary(sc))
    return _power(sc)


def _power(sc: _Scanner) -> Expr:
    node = _atom(sc)
    if sc.peek() == "^":
        sc.pos += 1
        node = BinOp("^", node, _unary(sc))
    return node


def _atom(sc: _Scanner) -> Expr:
    ch = sc.peek()
    if ch == "(":
        sc.pos += 1
        node = _expr(sc)
        sc.expect(")")
        return node
    if ch.isdigit() or ch == ".":
        return sc.number()
    if ch.isalpha() or ch == "_":
        name, start = sc.identifier()
        if name == "x":
            return Var()
        if name in FUNCTIONS:
            sc.expect("(")
            arg = _expr(sc)
            sc.expect(")")
            return Func(name, arg)
        raise UnknownIdentifier(name, start)
    raise ExprSyntaxError(sc.pos, "a number, 'x', a function call or '('")


def evaluate(e: Expr, x: float) -> float:
    """Evaluate e at x; raises NonFiniteValue instead of returning inf/nan."""
    val = _eval(e, x)
    if not math.isfinite(val):
        raise NonFiniteValue(x, to_text(e))
    return val


def _eval(e: Expr, x: float) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Neg):
        return -_eval(e.child, x)
    if isinstance(e, BinOp):
        a = _eval(e.left, x)
        b = _eval(e.right, x)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if b == 0.0:
                raise NonFiniteValue(x, to_text(e))
            return a / b
        try:
            return math.pow(a, b)
        except (ValueError, OverflowError):
            raise NonFiniteValue(x, to_text(e)) from None
    a = _eval(e.arg, x)
    try:
        if e.name == "abs":
            return abs(a)
        if e.name == "ln":
            return math.log(a)
        if e.name == "sqrt":
            return math.sqrt(a)
        if e.name == "sin":
            return math.sin(a)
        if e.name == "cos":
            return math.cos(a)
        return math.exp(a)
    except (ValueError, OverflowError):
        raise NonFiniteValue(x, to_text(e)) from None


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PRECEDENCE = 3


def to_text(e: Expr) -> str:
    """Render an AST back to text with minimal parentheses."""
    return _render(e, 0)


def _render(e: Expr, parent_prec: int) -> str:
    if isinstance(e, Num):
        return e.text
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Func):
        return f"{e.name}({_render(e.arg, 0)})"
    if isinstance(e, Neg):
        inner = _render(e.child, _NEG_PRECEDENCE)
        text = f"-{inner}"
        return f"({text})" if parent_prec > _NEG_PRECEDENCE else text
    prec = _PRECEDENCE[e.op]
    # left-assoc ops need tighter right operands; ^ is the mirror case
    if e.op == "^":
        left = _render(e.left, prec + 1)
        right = _render(e.right, prec)
    else:
        left = _render(e.left, prec)
        right = _render(e.right, prec + 1)
    text = f"{left} {e.op} {right}" if e.op in "+-" else f"{left}{e.op}{right}"
    return f"({text})" if parent_prec > prec else text
