"""Tiny expression language for time-dependent matrix entries.

Grammar (standard precedence, ^ right-associative and binding tighter
than unary minus):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'pi' | 'e' | 't' | NAME '(' expr ')' | '(' expr ')'

Known functions: sin, cos, exp, sqrt. The only free variable is t.
Errors carry the byte offset of the offending token.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ExpressionError

FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt}
CONSTANTS = {"pi": np.pi, "e": np.e}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Unary:
    op: str
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Num, Const, Var, Unary, Bin, Call]

_OPS = set("+-*/^()")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE" and (
                    j + 1 < n and (src[j + 1].isdigit()
                                   or (src[j + 1] in "+-" and j + 2 < n
                                       and src[j + 2].isdigit()))):
                j += 2 if src[j + 1] in "+-" else 1
                while j < n and src[j].isdigit():
                    j += 1
            text = src[i:j]
            try:
                float(text)
            except ValueError:
                raise ExpressionError(f"malformed number {text!r}", offset=i)
            tokens.append(("num", text, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(("name", src[i:j], i))
            i = j
            continue
        raise ExpressionError(f"unexpected character {ch!r}", offset=i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, text, off = self.peek()
        if kind != "op" or text != op:
            raise ExpressionError(f"expected {op!r}", offset=off)
        return self.take()

    def parse(self) -> Expr:
        node = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected trailing input {text!r}", offset=off)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                node = Bin(text, node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                node = Bin(text, node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Unary("-", self.unary())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            return Bin("^", node, self.unary())
        return node

    def atom(self) -> Expr:
        kind, text, off = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text == "t":
                return Var()
            if text in CONSTANTS:
                return Const(text)
            if text in FUNCTIONS:
                k2, t2, o2 = self.peek()
                if k2 != "op" or t2 != "(":
                    raise ExpressionError(
                        f"function {text!r} requires parenthesized argument",
                        offset=o2)
                self.take()
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            raise ExpressionError(f"unknown identifier {text!r}", offset=off)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExpressionError(f"unexpected token {text or 'end of input'!r}",
                              offset=off)


def parse_expression(src: str) -> Expr:
    """Parse a source string into an expression tree."""
    if not isinstance(src, str):
        raise ExpressionError("expression must be a string", offset=0)
    return _Parser(src).parse()


def evaluate(node: Expr, t):
    """Evaluate at scalar or array t."""
    t = np.asarray(t, dtype=float)
    if isinstance(node, Num):
        return np.broadcast_to(np.float64(node.value), t.shape).copy()
    if isinstance(node, Const):
        return np.broadcast_to(np.float64(CONSTANTS[node.name]), t.shape).copy()
    if isinstance(node, Var):
        return t.copy()
    if isinstance(node, Unary):
        return -evaluate(node.arg, t)
    if isinstance(node, Bin):
        a = evaluate(node.left, t)
        b = evaluate(node.right, t)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        if node.op == "^":
            return np.power(a, b)
    if isinstance(node, Call):
        return FUNCTIONS[node.fn](evaluate(node.arg, t))
    raise ExpressionError(f"unknown node {node!r}")


def compile_expression(src: str):
    """Parse and return a vectorized callable of t."""
    node = parse_expression(src)
    return lambda t: evaluate(node, t)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def pretty(node: Expr) -> str:
    """Canonical rendering; parse(pretty(parse(s))) is a fixed point."""
    return _render(node, 0)


def _render(node: Expr, parent_prec: int) -> str:
    if isinstance(node, Num):
        v = node.value
        text = repr(v) if v != int(v) else str(int(v))
        return text
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Unary):
        inner = _render(node.arg, _PREC["neg"])
        out = f"-{inner}"
        return f"({out})" if parent_prec > _PREC["neg"] else out
    if isinstance(node, Call):
        return f"{node.fn}({_render(node.arg, 0)})"
    if isinstance(node, Bin):
        prec = _PREC[node.op]
        if node.op == "^":
            left = _render(node.left, prec + 1)
            right = _render(node.right, prec)
        else:
            left = _render(node.left, prec)
            right = _render(node.right, prec + 1)
        out = f"{left} {node.op} {right}" if node.op in "+-" else f"{left}{node.op}{right}"
        return f"({out})" if parent_prec > prec else out
    raise ExpressionError(f"unknown node {node!r}")
