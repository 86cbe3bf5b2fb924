"""Recursive-descent parser for the expression grammar.

    expr     := term (('+'|'-') term)*
    term     := unary (('*'|'/') unary)*
    unary    := '-' unary | factor
    factor   := base ('^' exponent)?
    base     := number | symbol | func '(' expr ')' | '(' expr ')'
    exponent := ['-'] integer | '(' ['-'] integer ['/' integer] ')'

Unary minus and bare negative integer exponents go slightly beyond the
minimal grammar so that printed normal forms parse back.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .core import PHASE_VARS, FUNCTIONS, Const, Sym, add, func, mul, neg, power
from .errors import ParseError, UnknownSymbolError

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^(),]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if value == "**":
            value = "^"
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, allowed: frozenset):
        self.text = text
        self.allowed = allowed
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, message: str):
        raise ParseError(message, self.tok[2], self.text)

    def accept(self, op: str) -> bool:
        kind, value, _ = self.tok
        if kind == "op" and value == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str):
        if not self.accept(op):
            found = self.tok[1] or "end of input"
            self.error(f"expected {op!r}, found {found!r}")

    def parse(self):
        e = self.expr()
        if self.tok[0] != "end":
            self.error(f"unexpected token {self.tok[1]!r}")
        return e

    def expr(self):
        terms = [self.term()]
        while True:
            if self.accept("+"):
                terms.append(self.term())
            elif self.accept("-"):
                terms.append(neg(self.term()))
            else:
                return add(*terms)

    def term(self):
        e = self.unary()
        while True:
            if self.accept("*"):
                e = mul(e, self.unary())
            elif self.accept("/"):
                e = mul(e, power(self.unary(), -1))
            else:
                return e

    def unary(self):
        if self.accept("-"):
            return neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.factor()

    def factor(self):
        b = self.base()
        if self.accept("^"):
            return power(b, self.exponent())
        return b

    def integer(self) -> int:
        kind, value, _ = self.tok
        if kind != "num" or "." in value:
            self.error("expected an integer exponent")
        self.i += 1
        return int(value)

    def exponent(self) -> Fraction:
        if self.accept("("):
            sign = -1 if self.accept("-") else 1
            num = self.integer()
            den = 1
            if self.accept("/"):
                den = self.integer()
                if den == 0:
                    self.error("zero denominator in exponent")
            self.expect(")")
            return Fraction(sign * num, den)
        sign = -1 if self.accept("-") else 1
        return Fraction(sign * self.integer())

    def base(self):
        kind, value, pos = self.tok
        if kind == "num":
            self.i += 1
            return Const(Fraction(value))
        if kind == "name":
            self.i += 1
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return func(value, arg)
            if value not in self.allowed:
                raise UnknownSymbolError(value, pos, self.text)
            return Sym(value)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        found = value or "end of input"
        self.error(f"unexpected token {found!r}")


def parse(text: str, params=(), *, extra=()):
    """Parse ``text``; symbols other than x, y, px, py must be listed in ``params`` or ``extra``."""
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    allowed = frozenset(PHASE_VARS) | frozenset(params) | frozenset(extra)
    return _Parser(text, allowed).parse()
