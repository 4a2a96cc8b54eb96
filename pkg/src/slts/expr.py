"""Coefficient expressions in the single variable ``t``.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | 't' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := sin | cos | exp | sqrt | abs | log

Evaluation is vectorized over numpy arrays. Division by zero, square roots of
negative numbers and logarithms of non-positive numbers raise
:class:`EvaluationError` instead of producing ``inf``/``nan``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expression",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "ParseError",
    "EvaluationError",
    "parse_coefficient",
]

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "log": np.log,
}
CONSTANTS = {"pi": math.pi}


class ParseError(ValueError):
    """Syntax error or unknown identifier in an expression.

    Attributes:
        offset: byte offset into the source text where parsing failed.
        expected: sorted tuple of token kinds that would have been accepted.
    """

    def __init__(self, message: str, text: str, offset: int, expected=()):
        self.text = text
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class EvaluationError(ArithmeticError):
    """Raised when an expression is undefined at some evaluation point."""


def _points(t, mask):
    bad = np.atleast_1d(t)[np.atleast_1d(mask)] if np.ndim(t) else np.atleast_1d(t)
    return ", ".join(f"{v:g}" for v in bad[:3])


class Expression:
    """Base class of the parse tree. Nodes are immutable and hashable."""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self._eval(t)
        return np.broadcast_to(out, t.shape).copy() if np.ndim(out) < t.ndim else out

    def _eval(self, t):
        raise NotImplementedError

    def is_constant(self) -> bool:
        return False


@dataclass(frozen=True)
class Num(Expression):
    value: float

    def _eval(self, t):
        return np.full(np.shape(t), self.value)

    def is_constant(self):
        return True

    def __str__(self):
        if self.value < 0 or (self.value == 0 and math.copysign(1, self.value) < 0):
            return f"(-{-self.value!r})"
        return repr(self.value)


@dataclass(frozen=True)
class Var(Expression):
    name: str = "t"

    def _eval(self, t):
        return t

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg(Expression):
    operand: Expression

    def _eval(self, t):
        return -self.operand._eval(t)

    def is_constant(self):
        return self.operand.is_constant()

    def __str__(self):
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp(Expression):
    op: str
    left: Expression
    right: Expression

    def _eval(self, t):
        a = self.left._eval(t)
        b = self.right._eval(t)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            zero = np.asarray(b) == 0
            if np.any(zero):
                raise EvaluationError(f"division by zero in '{self}' at t = {_points(t, zero)}")
            return a / b
        # '^'
        a_arr, b_arr = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
        bad = (a_arr < 0) & (b_arr != np.round(b_arr))
        if np.any(bad):
            raise EvaluationError(f"negative base with fractional exponent in '{self}' at t = {_points(t, bad)}")
        bad = (a_arr == 0) & (b_arr < 0)
        if np.any(bad):
            raise EvaluationError(f"zero raised to a negative power in '{self}' at t = {_points(t, bad)}")
        return np.power(a_arr, b_arr)

    def is_constant(self):
        return self.left.is_constant() and self.right.is_constant()

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call(Expression):
    func: str
    arg: Expression

    def _eval(self, t):
        x = np.asarray(self.arg._eval(t), dtype=float)
        if self.func == "sqrt" and np.any(x < 0):
            raise EvaluationError(f"sqrt of a negative number in '{self}' at t = {_points(t, x < 0)}")
        if self.func == "log" and np.any(x <= 0):
            raise EvaluationError(f"log of a non-positive number in '{self}' at t = {_points(t, x <= 0)}")
        return FUNCTIONS[self.func](x)

    def is_constant(self):
        return self.arg.is_constant()

    def __str__(self):
        return f"{self.func}({self.arg})"


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []  # (kind, value, offset)
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise ParseError(f"unexpected character {text[start]!r}", text, start,
                                 {"number", "t", "function", "(", "-"})
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, value, offset = self.peek()
        what = "end of input" if kind == "end" else f"token {value!r}"
        raise ParseError(f"unexpected {what}", self.text, offset, expected)

    def parse(self) -> Expression:
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, value, offset = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(value))
        if kind == "name":
            self.advance()
            if value == "t":
                return Var("t")
            if value in CONSTANTS:
                return Num(CONSTANTS[value])
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            raise ParseError(f"unknown identifier {value!r}", self.text, offset,
                             {"t", "pi", *FUNCTIONS})
        if kind == "op" and value == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail({"number", "t", "function", "(", "-"})

    def expect(self, symbol):
        kind, value, _ = self.peek()
        if kind == "op" and value == symbol:
            self.advance()
            return
        self.fail({symbol})


def parse_coefficient(text: str) -> Expression:
    """Parse ``text`` into an :class:`Expression`.

    >>> parse_coefficient("t^2 + 1")(2.0)
    array(5.)
    """
    if not isinstance(text, str):
        raise TypeError(f"expected expression text, got {type(text).__name__}")
    return _Parser(text).parse()
