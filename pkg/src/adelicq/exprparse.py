"""Parser and printer for rational-function expressions.

Grammar (precedence from loosest to tightest)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' INT)?          # right-associative: a^b^c = a^(b^c)
    atom    := INT | VAR | '(' expr ')'

Variables are ``x1 .. xn``; for ``n <= 3`` the aliases ``x, y, z`` are also
accepted. Literals are non-negative integers, so rationals are written as
quotients. ``^`` binds tighter than unary minus: ``-x^2`` is ``-(x^2)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .polycore import Poly, RationalFunction

ALIASES = ("x", "y", "z")
MAX_DEGREE = 1000  # guards against runaway expansion such as (x + y)^9999


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected: tuple = ()):
        self.message = message
        self.offset = offset
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


# AST

@dataclass(frozen=True)
class Num:
    value: int
    pos: int


@dataclass(frozen=True)
class Var:
    index: int
    pos: int


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    pos: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    pos: int


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int
    pos: int


Node = Union[Num, Var, Neg, BinOp, Pow]


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass(frozen=True)
class Token:
    kind: str   # "int", "name", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            out.append(Token("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(Token("name", m.group(2), m.start(2)))
        else:
            c = m.group(3)
            if c not in "+-*/^()":
                raise ParseError(f"unexpected character {c!r}", m.start(3),
                                 ("integer", "variable", "(", "-"))
            out.append(Token("op", c, m.start(3)))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


_BINARY = {"+": 10, "-": 10, "*": 20, "/": 20}
_UNARY = 30
_ATOM_START = ("integer", "variable", "(", "-", "+")


class _Parser:
    def __init__(self, text: str, nvars: int):
        self.text = text
        self.n = nvars
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def variable(self, tok: Token) -> Var:
        name = tok.text
        if self.n <= len(ALIASES) and name in ALIASES[:self.n]:
            return Var(ALIASES.index(name), tok.pos)
        m = re.fullmatch(r"x([1-9]\d*)", name)
        if m and int(m.group(1)) <= self.n:
            return Var(int(m.group(1)) - 1, tok.pos)
        names = list(ALIASES[:self.n]) if self.n <= 3 else []
        names += [f"x{i + 1}" for i in range(self.n)]
        raise ParseError(f"unknown variable {name!r}", tok.pos, tuple(names))

    def expression(self, min_bp: int = 0) -> Node:
        tok = self.take()
        if tok.kind == "int":
            left: Node = Num(int(tok.text), tok.pos)
        elif tok.kind == "name":
            left = self.variable(tok)
        elif tok.text == "(":
            left = self.expression(0)
            close = self.take()
            if close.text != ")":
                raise ParseError("unbalanced parenthesis", close.pos, (")", "+", "-", "*", "/", "^"))
        elif tok.text in ("-", "+"):
            operand = self.expression(_UNARY)
            left = Neg(operand, tok.pos) if tok.text == "-" else operand
        else:
            what = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"unexpected {what}", tok.pos, _ATOM_START)
        while True:
            tok = self.peek()
            if tok.text == "^" and tok.kind == "op":
                # exponent binds tighter than anything, including unary minus
                self.take()
                exp_tok = self.take()
                if exp_tok.kind != "int":
                    raise ParseError("exponent must be a non-negative integer literal",
                                     exp_tok.pos, ("integer",))
                exponent = int(exp_tok.text)
                # right associativity: a^b^c = a^(b^c)
                stack = [exponent]
                while self.peek().text == "^" and self.peek().kind == "op":
                    self.take()
                    t2 = self.take()
                    if t2.kind != "int":
                        raise ParseError("exponent must be a non-negative integer literal",
                                         t2.pos, ("integer",))
                    stack.append(int(t2.text))
                e = stack.pop()
                while stack:
                    e = stack.pop() ** e
                    if e > 10_000:
                        raise ParseError("exponent too large", exp_tok.pos)
                if e > 10_000:
                    raise ParseError("exponent too large", exp_tok.pos)
                left = Pow(left, e, tok.pos)
                continue
            if tok.kind != "op" or tok.text not in _BINARY:
                break
            bp = _BINARY[tok.text]
            if bp <= min_bp:
                break
            self.take()
            right = self.expression(bp)
            left = BinOp(tok.text, left, right, tok.pos)
        return left

    def parse(self) -> Node:
        if self.peek().kind == "end":
            raise ParseError("empty expression", 0, _ATOM_START)
        node = self.expression(0)
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.pos, ("+", "-", "*", "/", "^", "end of input"))
        return node


def parse_ast(text: str, nvars: int) -> Node:
    if nvars < 1:
        raise ValueError("need at least one variable")
    return _Parser(text, nvars).parse()


def evaluate(node: Node, nvars: int) -> RationalFunction:
    if isinstance(node, Num):
        return RationalFunction.constant(node.value, nvars)
    if isinstance(node, Var):
        return RationalFunction(Poly.var(node.index, nvars))
    if isinstance(node, Neg):
        return -evaluate(node.operand, nvars)
    if isinstance(node, Pow):
        base = evaluate(node.base, nvars)
        size = 0 if base.is_zero() else max(base.num.total_degree(), base.den.total_degree())
        if size * node.exponent > MAX_DEGREE:
            raise ParseError(f"power exceeds degree {MAX_DEGREE}", node.pos)
        return base ** node.exponent
    a = evaluate(node.left, nvars)
    b = evaluate(node.right, nvars)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if b.is_zero():
        raise ParseError("division by the zero polynomial", node.pos)
    return a / b


def parse(text: str, nvars: int) -> RationalFunction:
    """Parse ``text`` into a canonical rational function in ``nvars`` variables."""
    return evaluate(parse_ast(text, nvars), nvars)


def parse_poly(text: str, nvars: int) -> Poly:
    r = parse(text, nvars)
    if not r.is_polynomial():
        raise ValueError(f"{text!r} is not a polynomial")
    return r.as_poly()


# printing

def var_names(nvars: int) -> list[str]:
    if nvars <= len(ALIASES):
        return list(ALIASES[:nvars])
    return [f"x{i + 1}" for i in range(nvars)]


def _monomial(e: tuple, names: list[str]) -> str:
    parts = []
    for k, name in zip(e, names):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_poly(f: Poly) -> str:
    """Terms in decreasing lex order, e.g. ``3*x^2*y - x + 1/2``."""
    if f.is_zero():
        return "0"
    names = var_names(f.nvars)
    out = []
    for i, (e, c) in enumerate(f.sorted_terms()):
        c = Fraction(c)
        neg = c < 0
        a = -c if neg else c
        mono = _monomial(e, names)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out)


def format(f) -> str:  # noqa: A001 - mirrors parse()
    """Canonical text for a polynomial or rational function; ``parse(format(f)) == f``."""
    if isinstance(f, Poly):
        return format_poly(f)
    if f.is_zero():
        return "0"
    num = f.numerator()
    den = f.denominator()
    if den.is_constant() and den.constant_coeff() == 1:
        return format_poly(num)
    ns = format_poly(num)
    ds = format_poly(den)
    if len(num) > 1:
        ns = f"({ns})"
    if len(den) > 1 or not den.is_constant():
        ds = f"({ds})"
    return f"{ns}/{ds}"
