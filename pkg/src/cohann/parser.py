"""Polynomial text grammar: parsing and canonical printing.

Grammar (no juxtaposition multiplication, `*` is explicit):

    expr    := ['-'] product { ('+'|'-') product }
    product := power { '*' power }
    power   := atom [ '^' INT ]
    atom    := RAT | NAME | '(' expr ')'
    RAT     := INT [ '/' INT ]

Printing emits terms in descending monomial order with a leading sign on the
first coefficient; parse(print(p)) == p.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .rings import MAX_EXPONENT, Polynomial, PolyRing


class PolyParseError(ValueError):
    """Syntax error with a byte offset into the input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownVariableError(PolyParseError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown variable {name!r}", offset)
        self.name = name


class ExponentOverflowError(PolyParseError):
    def __init__(self, value: int, offset: int):
        super().__init__(f"exponent {value} exceeds cap {MAX_EXPONENT}", offset)


_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([-+*^()/])")


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolyParseError(f"unexpected character {text[pos]!r}", pos)
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", int(num), pos))
        elif name is not None:
            tokens.append(("name", name, pos))
        else:
            tokens.append(("op", op, pos))
        pos = m.end()
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: PolyRing):
        self.text = text
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise PolyParseError(f"expected {op!r}", off)
        return self.take()

    def parse(self) -> Polynomial:
        p = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise PolyParseError(f"unexpected {val!r}", off)
        return p

    def expr(self) -> Polynomial:
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        p = self.product()
        if sign < 0:
            p = -p
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                q = self.product()
                p = p - q if val == "-" else p + q
            else:
                return p

    def product(self) -> Polynomial:
        p = self.power()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                p = p * self.power()
            else:
                return p

    def power(self) -> Polynomial:
        p = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, exp, off = self.peek()
            if kind != "num":
                raise PolyParseError("expected integer exponent", off)
            self.take()
            if exp > MAX_EXPONENT:
                raise ExponentOverflowError(exp, off)
            p = p ** exp
        return p

    def atom(self) -> Polynomial:
        kind, val, off = self.take()
        if kind == "num":
            nxt_kind, nxt_val, _ = self.peek()
            if nxt_kind == "op" and nxt_val == "/":
                self.take()
                dkind, den, doff = self.peek()
                if dkind != "num":
                    raise PolyParseError("expected integer denominator", doff)
                self.take()
                if den == 0:
                    raise PolyParseError("zero denominator", doff)
                return self._rat_const(val, den)
            return self.ring.const(val)
        if kind == "name":
            try:
                idx = self.ring.var_names.index(val)
            except ValueError:
                raise UnknownVariableError(val, off) from None
            return self.ring.var(idx)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        raise PolyParseError(f"unexpected {'end of input' if kind == 'end' else repr(val)}", off)

    def _rat_const(self, num: int, den: int) -> Polynomial:
        fld = self.ring.field
        if self.ring.char == 0:
            c = Fraction(num, den)
        else:
            c = fld.div(fld.from_int(num), fld.from_int(den))
        return self.ring.poly([((0,) * self.ring.arity, c)])


def parse_poly(text: str, ring: PolyRing) -> Polynomial:
    """Parse `text` into a canonical polynomial of `ring`."""
    return _Parser(text, ring).parse()


def _format_coeff(c, char: int) -> str:
    return str(c)


def format_monomial(exps, var_names) -> str:
    parts = []
    for name, e in zip(var_names, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(p: Polynomial) -> str:
    """Canonical text form: descending terms, explicit `*`, leading sign first."""
    if p.is_zero():
        return "0"
    ring = p.ring
    out = []
    for i, (m, c) in enumerate(p.terms):
        if ring.char == 0 and c < 0:
            sign = "-" if i == 0 else " - "
            mag = -c
        else:
            sign = "" if i == 0 else " + "
            mag = c
        mono = format_monomial(m, ring.var_names)
        if not mono:
            body = _format_coeff(mag, ring.char)
        elif mag == ring.field.one:
            body = mono
        else:
            body = f"{_format_coeff(mag, ring.char)}*{mono}"
        out.append(sign + body)
    return "".join(out)
