"""Field expression language.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | atom ('^' ['-'] integer)?
    atom   := number | 'x' index | fn '(' expr ')' | '(' expr ')'

Coordinates are written 1-based (``x1``) and stored 0-based.  Number
literals are kept exact as :class:`fractions.Fraction`; a quotient of two
literals (``1/3``) folds into a single rational constant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .. import jets

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")


class ExprError(ValueError):
    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    pass


class CoordinateRangeError(ExprError):
    pass


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Coord:
    index: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "FieldExpr"
    right: "FieldExpr"


@dataclass(frozen=True)
class Pow:
    base: "FieldExpr"
    exponent: int


@dataclass(frozen=True)
class Call:
    fn: str  # one of FUNCTIONS or "neg"
    arg: "FieldExpr"


FieldExpr = Union[Num, Coord, BinOp, Pow, Call]

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}",
                                  len(text[:pos].encode()))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), len(text[:pos].encode())))
        pos = m.end()
    tokens.append(("end", "", len(text.encode())))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int, aliases: dict | None):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.n = n
        self.aliases = aliases or {}

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, text, off = self.take()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", off)

    def parse(self) -> FieldExpr:
        node = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.factor()
            if op == "/" and isinstance(node, Num) and isinstance(right, Num) \
                    and right.value != 0:
                node = Num(node.value / right.value)
            else:
                node = BinOp(op, node, right)
        return node

    def factor(self):
        kind, text, off = self.peek()
        if kind == "op" and text == "-":
            self.take()
            inner = self.factor()
            if isinstance(inner, Num):
                return Num(-inner.value)
            return Call("neg", inner)
        node = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, text, off = self.take()
            if kind != "num" or not text.isdigit():
                raise ExprSyntaxError("exponent must be an integer literal", off)
            node = Pow(node, sign * int(text))
        return node

    def atom(self):
        kind, text, off = self.take()
        if kind == "num":
            return Num(Fraction(text))
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in self.aliases:
                return Coord(self.aliases[text])
            m = re.fullmatch(r"x(\d+)", text)
            if m:
                idx = int(m.group(1))
                if idx < 1 or idx > self.n:
                    raise CoordinateRangeError(
                        f"coordinate index {text} out of range for dimension "
                        f"{self.n}", off)
                return Coord(idx - 1)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", off)
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {found}", off)


def parse_expr(text: str, n: int, aliases: dict | None = None) -> FieldExpr:
    """Parse ``text`` into an expression over coordinates ``x1..xn``.

    ``aliases`` maps extra names to 0-based coordinate slots, e.g.
    ``{"s": 0}`` for a function of one variable named ``s``.
    """
    return _Parser(text, n, aliases).parse()


# -- printing ----------------------------------------------------------------

def _format_number(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    d = v.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{v.numerator}/{v.denominator}"
    k = max(twos, fives)
    scaled = abs(v.numerator) * 10 ** k // v.denominator
    digits = str(scaled).rjust(k + 1, "0")
    sign = "-" if v < 0 else ""
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_text(e: FieldExpr) -> str:
    """Render ``e`` so that ``parse_expr(to_text(e)) == e``."""
    return _print(e, 0)


def _print(e: FieldExpr, ctx: int) -> str:
    if isinstance(e, Num):
        s = _format_number(e.value)
        # bare literals are atoms only when non-negative and not p/q
        if (e.value < 0 or "/" in s) and ctx > 0:
            return f"({s})"
        return s
    if isinstance(e, Coord):
        return f"x{e.index + 1}"
    if isinstance(e, Call):
        if e.fn == "neg":
            s = "-" + _print(e.arg, 3)
            return f"({s})" if ctx > 0 else s
        return f"{e.fn}({_print(e.arg, 0)})"
    if isinstance(e, Pow):
        s = f"{_print(e.base, 4)}^{e.exponent}"
        return f"({s})" if ctx >= 4 else s
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        s = f"{_print(e.left, p)}{_op_text(e.op)}{_print(e.right, p + 1)}"
        return f"({s})" if p < ctx else s
    raise TypeError(f"not a field expression: {e!r}")


def _op_text(op: str) -> str:
    return f" {op} " if op in "+-" else op


# -- evaluation ----------------------------------------------------------------

_CALLS = {
    "sin": jets.sin,
    "cos": jets.cos,
    "exp": jets.exp,
    "log": jets.log,
    "sqrt": jets.sqrt,
    "neg": lambda a: -a,
}


def evaluate(e: FieldExpr, coords):
    """Evaluate ``e`` on coordinates that are floats or jets of one space."""
    if isinstance(e, Num):
        return float(e.value)
    if isinstance(e, Coord):
        return coords[e.index]
    if isinstance(e, BinOp):
        a = evaluate(e.left, coords)
        b = evaluate(e.right, coords)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if isinstance(b, float) and b == 0.0:
            raise jets.JetDomainError("division by zero")
        return a / b
    if isinstance(e, Pow):
        base = evaluate(e.base, coords)
        if isinstance(base, float):
            if base == 0.0 and e.exponent < 0:
                raise jets.JetDomainError("negative power of zero")
            return base ** e.exponent
        return base ** e.exponent
    if isinstance(e, Call):
        return _CALLS[e.fn](evaluate(e.arg, coords))
    raise TypeError(f"not a field expression: {e!r}")


def eval_field(e: FieldExpr, point, order: int) -> jets.Jet:
    """Jet of ``e`` about ``point`` truncated at ``order``."""
    n = len(point)
    coords = jets.seed_point(point, order) if order >= 1 else \
        [jets.constant(float(v), n, 0) for v in point]
    out = evaluate(e, coords)
    if not isinstance(out, jets.Jet):
        out = jets.constant(out, n, order)
    return out


def max_coordinate(e: FieldExpr) -> int:
    """Largest 0-based coordinate index used by ``e`` (-1 if none)."""
    if isinstance(e, Coord):
        return e.index
    if isinstance(e, Num):
        return -1
    if isinstance(e, BinOp):
        return max(max_coordinate(e.left), max_coordinate(e.right))
    if isinstance(e, Pow):
        return max_coordinate(e.base)
    return max_coordinate(e.arg)
