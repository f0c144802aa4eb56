"""Infix expression parser for the workbench grammar.

Grammar: numbers; identifiers t, x, xdot, xddot and named coefficients
(primes denote t-derivatives, e.g. ``h2''``); operators + - * / ^;
functions ln(abs(.)), exp, sin, cos; parentheses.  Whitespace-insensitive.
Power exponents must be rational constants (``x^2``, ``u^(1/2)``,
``u^(-3)``).  The pretty-printer in `expr` emits this same grammar and
print -> parse round trips are structurally exact.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping, Optional

from . import expr as ex
from .errors import ParseError, UnknownIdentifierError

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)

_FUNCTIONS = ("ln", "abs", "exp", "sin", "cos")

_LBP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
_UNARY_BP = 15


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[bad_at]!r}", bad_at)
        if m.lastgroup is None:
            pos = m.end()
            continue
        out.append(_Token(m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    out.append(_Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, tokens, coefficients: Mapping[str, ex.CoefficientFunction]):
        self.tokens = tokens
        self.index = 0
        self.coefficients = coefficients

    def peek(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text):
        token = self.advance()
        if token.kind != "op" or token.text != text:
            raise ParseError(f"expected {text!r}, found {token.text!r}", token.pos)
        return token

    # -- Pratt core

    def expression(self, rbp=0):
        token = self.advance()
        left = self.nud(token)
        while True:
            nxt = self.peek()
            lbp = _LBP.get(nxt.text, 0) if nxt.kind == "op" else 0
            if rbp >= lbp:
                break
            self.advance()
            left = self.led(nxt, left)
        return left

    def nud(self, token):
        if token.kind == "number":
            return ex.const(float(token.text))
        if token.kind == "ident":
            return self.identifier(token)
        if token.kind == "op":
            if token.text == "(":
                inner = self.expression(0)
                self.expect(")")
                return inner
            if token.text == "-":
                return ex.neg(self.expression(_UNARY_BP))
            if token.text == "+":
                return self.expression(_UNARY_BP)
        raise ParseError(f"unexpected token {token.text!r}", token.pos)

    def led(self, token, left):
        op = token.text
        if op == "+":
            return ex.add(left, self.expression(10))
        if op == "-":
            return ex.add(left, ex.neg(self.expression(10)))
        if op == "*":
            return ex.mul(left, self.expression(20))
        if op == "/":
            return ex.div(left, self.expression(20))
        if op == "^":
            return ex.pow_(left, self.rational_exponent())
        raise ParseError(f"unexpected operator {op!r}", token.pos)

    # -- leaves

    def identifier(self, token):
        name = token.text.rstrip("'")
        order = len(token.text) - len(name)
        if name in ex.VARIABLES:
            if order:
                raise ParseError(
                    f"primes are only valid on coefficient names, not {name!r}",
                    token.pos,
                )
            return ex.Var(name)
        if name in _FUNCTIONS:
            if order:
                raise ParseError(f"primes are not valid on {name!r}", token.pos)
            return self.function_call(name, token)
        fn = self.coefficients.get(name)
        if fn is None:
            raise UnknownIdentifierError(f"unknown identifier {name!r}", token.pos)
        return ex.Coeff(fn, order)

    def function_call(self, name, token):
        if name == "abs":
            raise ParseError("abs is only valid inside ln(abs(...))", token.pos)
        self.expect("(")
        if name == "ln":
            inner = self.advance()
            if inner.kind != "ident" or inner.text != "abs":
                raise ParseError("ln requires the form ln(abs(...))", inner.pos)
            self.expect("(")
            arg = self.expression(0)
            self.expect(")")
            self.expect(")")
            return ex.lnabs(arg)
        arg = self.expression(0)
        self.expect(")")
        if name == "exp":
            return ex.exp_(arg)
        if name == "sin":
            return ex.sin_(arg)
        return ex.cos_(arg)

    def rational_exponent(self) -> Fraction:
        token = self.advance()
        if token.kind == "number":
            return self.number_fraction(token)
        if token.kind == "op" and token.text == "-":
            follow = self.advance()
            if follow.kind != "number":
                raise ParseError("power exponent must be rational", follow.pos)
            return -self.number_fraction(follow)
        if token.kind == "op" and token.text == "(":
            sign = 1
            nxt = self.advance()
            if nxt.kind == "op" and nxt.text == "-":
                sign = -1
                nxt = self.advance()
            if nxt.kind != "number":
                raise ParseError("power exponent must be rational", nxt.pos)
            value = self.number_fraction(nxt)
            if self.peek().kind == "op" and self.peek().text == "/":
                self.advance()
                den = self.advance()
                if den.kind != "number":
                    raise ParseError("power exponent must be rational", den.pos)
                value = value / self.number_fraction(den)
            self.expect(")")
            return sign * value
        raise ParseError("power exponent must be a rational constant", token.pos)

    @staticmethod
    def number_fraction(token) -> Fraction:
        try:
            return Fraction(token.text)
        except ValueError:
            raise ParseError(f"invalid exponent {token.text!r}", token.pos) from None


def parse(
    text: str,
    coefficients: Optional[Mapping[str, ex.CoefficientFunction]] = None,
) -> ex.Expr:
    """Parse an expression string.

    `coefficients` maps identifier names to their coefficient functions;
    identifiers outside {t, x, xdot, xddot} and this map are rejected.
    """
    parser = _Parser(_tokenize(text), coefficients or {})
    result = parser.expression(0)
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ParseError(f"unexpected trailing input {trailing.text!r}", trailing.pos)
    return result
