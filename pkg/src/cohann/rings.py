"""Exact coefficient arithmetic, monomials, monomial orders, and polynomials.

Coefficients are exact: arbitrary-precision rationals (characteristic 0) or
residues modulo a prime p < 2**31.  Polynomials are immutable term lists kept
strictly descending in the ring's monomial order, so equal polynomials have
identical representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

MAX_PRIME = 2 ** 31
MAX_EXPONENT = 2 ** 20

Monomial = Tuple[int, ...]


class RingError(ValueError):
    """Invalid ring construction or mixed-ring operation."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class RationalField:
    """Arithmetic on Fraction values (always reduced, positive denominator)."""

    char = 0

    def from_int(self, n):
        return Fraction(n)

    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return 1 / a

    def div(self, a, b):
        return a / b

    def to_str(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash(("field", 0))


class PrimeField:
    """Arithmetic on residues in [0, p) for a prime p < 2**31."""

    __slots__ = ("p", "zero", "one")

    def __init__(self, p: int):
        if not isinstance(p, int) or not _is_prime(p):
            raise RingError(f"characteristic must be 0 or a prime, got {p!r}")
        if p >= MAX_PRIME:
            raise RingError(f"prime {p} exceeds the 2^31 cap")
        self.p = p
        self.zero = 0
        self.one = 1 % p

    @property
    def char(self) -> int:
        return self.p

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero residue")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return (a * self.inv(b)) % self.p

    def to_str(self, a) -> str:
        return str(a % self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("field", self.p))


def field_for(char: int):
    return RationalField() if char == 0 else PrimeField(char)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))

def mono_div(a: Monomial, b: Monomial) -> Optional[Monomial]:
    q = tuple(x - y for x, y in zip(a, b))
    return q if all(e >= 0 for e in q) else None

def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))

def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


@dataclass(frozen=True)
class MonomialOrder:
    """Total multiplicative monomial order.

    kind is one of "grevlex", "lex", "block"; for "block" the first
    `block` ring variables dominate: any monomial touching them ranks above
    every monomial in the remaining variables.
    """

    kind: str = "grevlex"
    block: int = 0

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "block"):
            raise RingError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and self.block <= 0:
            raise RingError("block order needs a positive leading-block size")


def _grevlex_key(exps: Monomial, weights: Optional[Monomial]):
    if weights is None:
        deg = sum(exps)
    else:
        deg = sum(e * w for e, w in zip(exps, weights))
    return (deg, tuple(-e for e in reversed(exps)))


@dataclass(frozen=True)
class PolyRing:
    """Polynomial ring over QQ or F_p in named commuting variables."""

    char: int
    var_names: Tuple[str, ...]
    order: MonomialOrder = MonomialOrder()
    weights: Optional[Tuple[int, ...]] = None
    field: object = field(init=False, compare=False, repr=False, default=None)

    def __post_init__(self):
        names = tuple(self.var_names)
        object.__setattr__(self, "var_names", names)
        if len(set(names)) != len(names) or not all(_is_name(v) for v in names):
            raise RingError(f"variable names must be distinct identifiers: {names}")
        if self.weights is not None:
            w = tuple(self.weights)
            if len(w) != len(names) or any(x <= 0 for x in w):
                raise RingError("weights must be positive, one per variable")
            object.__setattr__(self, "weights", w)
        if self.order.kind == "block" and self.order.block >= len(names):
            raise RingError("elimination block must be a proper variable prefix")
        object.__setattr__(self, "field", field_for(self.char))

    @property
    def arity(self) -> int:
        return len(self.var_names)

    def degree(self, exps: Monomial) -> int:
        if self.weights is None:
            return sum(exps)
        return sum(e * w for e, w in zip(exps, self.weights))

    def key(self, exps: Monomial):
        """Sort key; larger key = larger monomial."""
        kind = self.order.kind
        if kind == "grevlex":
            return _grevlex_key(exps, self.weights)
        if kind == "lex":
            return exps
        k = self.order.block
        w = self.weights
        return (
            _grevlex_key(exps[:k], None if w is None else w[:k]),
            _grevlex_key(exps[k:], None if w is None else w[k:]),
        )

    # -- constructors -----------------------------------------------------

    def zero(self) -> "Polynomial":
        return Polynomial(self, ())

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, n) -> "Polynomial":
        c = self.field.from_int(n) if isinstance(n, int) else n
        if c == self.field.zero:
            return self.zero()
        return Polynomial(self, (((0,) * self.arity, c),))

    def var(self, i: int) -> "Polynomial":
        if not 0 <= i < self.arity:
            raise RingError(f"variable index {i} out of range")
        exps = tuple(1 if j == i else 0 for j in range(self.arity))
        return Polynomial(self, ((exps, self.field.one),))

    def gens(self):
        return [self.var(i) for i in range(self.arity)]

    def monomial(self, exps: Sequence[int], coeff=1) -> "Polynomial":
        exps = tuple(exps)
        if len(exps) != self.arity or any(e < 0 for e in exps):
            raise RingError(f"bad exponent vector {exps}")
        c = self.field.from_int(coeff) if isinstance(coeff, int) else coeff
        if c == self.field.zero:
            return self.zero()
        return Polynomial(self, ((exps, c),))

    def poly(self, items: Iterable[Tuple[Monomial, object]]) -> "Polynomial":
        """Build a canonical polynomial from (exponents, coefficient) pairs."""
        acc = {}
        zero = self.field.zero
        for exps, c in items:
            exps = tuple(exps)
            c = self.field.from_int(c) if isinstance(c, int) else c
            cur = acc.get(exps)
            c = c if cur is None else self.field.add(cur, c)
            if c == zero:
                acc.pop(exps, None)
            else:
                acc[exps] = c
        terms = tuple(sorted(acc.items(), key=lambda t: self.key(t[0]), reverse=True))
        return Polynomial(self, terms)

    def parse(self, text: str) -> "Polynomial":
        from .parser import parse_poly

        return parse_poly(text, self)


def _is_name(s: str) -> bool:
    return s.isidentifier()


class Polynomial:
    """Immutable polynomial: term list strictly descending in the ring order."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Tuple[Tuple[Monomial, object], ...]):
        self.ring = ring
        self.terms = terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ring.char, self.ring.var_names, self.terms))

    # -- leading data ------------------------------------------------------

    def lead_monomial(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return self.terms[0][0]

    def lead_coeff(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.terms[0][1]

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(self.ring.degree(m) for m, _ in self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(self.terms[0][0]))

    def constant_value(self):
        for m, c in self.terms:
            if not any(m):
                return c
        return self.ring.field.zero

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise RingError("polynomials from different rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return self.ring.poly(list(self.terms) + list(other.terms))

    def __neg__(self) -> "Polynomial":
        neg = self.ring.field.neg
        return Polynomial(self.ring, tuple((m, neg(c)) for m, c in self.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        fld = self.ring.field
        acc = {}
        zero = fld.zero
        for ma, ca in self.terms:
            for mb, cb in other.terms:
                m = mono_mul(ma, mb)
                c = fld.mul(ca, cb)
                cur = acc.get(m)
                c = c if cur is None else fld.add(cur, c)
                if c == zero:
                    acc.pop(m, None)
                else:
                    acc[m] = c
        terms = tuple(sorted(acc.items(), key=lambda t: self.ring.key(t[0]), reverse=True))
        return Polynomial(self.ring, terms)

    def scale(self, c) -> "Polynomial":
        fld = self.ring.field
        c = fld.from_int(c) if isinstance(c, int) else c
        if c == fld.zero:
            return self.ring.zero()
        return Polynomial(self.ring, tuple((m, fld.mul(cc, c)) for m, cc in self.terms))

    def term_mul(self, exps: Monomial, coeff) -> "Polynomial":
        fld = self.ring.field
        if coeff == fld.zero:
            return self.ring.zero()
        return Polynomial(
            self.ring,
            tuple((mono_mul(m, exps), fld.mul(c, coeff)) for m, c in self.terms),
        )

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n = base_needed
        return result

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.lead_coeff()))

    # -- calculus and structure --------------------------------------------

    def partial_derivative(self, var_index: int) -> "Polynomial":
        if not 0 <= var_index < self.ring.arity:
            raise RingError(f"variable index {var_index} out of range")
        items = []
        for m, c in self.terms:
            e = m[var_index]
            if e == 0:
                continue
            m2 = tuple(x - 1 if j == var_index else x for j, x in enumerate(m))
            items.append((m2, self.ring.field.mul(c, self.ring.field.from_int(e))))
        return self.ring.poly(items)

    def is_homogeneous(self) -> bool:
        if not self.terms:
            return True
        degs = {self.ring.degree(m) for m, _ in self.terms}
        return len(degs) == 1

    def map_to(self, target: PolyRing, images: Sequence["Polynomial"]) -> "Polynomial":
        """Ring map sending variable i to images[i]; coefficients carried over."""
        if len(images) != self.ring.arity:
            raise RingError("one image per variable required")
        out = target.zero()
        for m, c in self.terms:
            part = target.const(1).scale(_carry_coeff(c, self.ring, target))
            for i, e in enumerate(m):
                if e:
                    part = part * (images[i] ** e)
            out = out + part
        return out

    def __str__(self) -> str:
        from .parser import format_poly

        return format_poly(self)

    def __repr__(self) -> str:
        return f"<poly {self}>"


def _carry_coeff(c, src: PolyRing, dst: PolyRing):
    if src.char != dst.char:
        raise RingError("coefficient fields differ")
    return c


class QuotientRing:
    """Quotient R = P/I with a cached reduced basis of the relation ideal.

    Elements of R are represented by I-normal forms in the ambient ring.
    """

    def __init__(self, ambient: PolyRing, relations: Sequence[Polynomial], max_pairs=None):
        from . import groebner

        self.ambient = ambient
        rels = [p for p in relations if not p.is_zero()]
        for p in rels:
            if p.ring != ambient:
                raise RingError("relation outside the ambient ring")
        self.relations = groebner.Ideal(ambient, rels)
        self.basis = self.relations.groebner_basis(max_pairs=max_pairs)
        if any(g.is_constant() for g in self.basis.elements):
            raise RingError("relations generate the unit ideal")

    def __eq__(self, other):
        return (
            isinstance(other, QuotientRing)
            and self.ambient == other.ambient
            and self.basis.elements == other.basis.elements
        )

    def __hash__(self):
        return hash((self.ambient, self.basis.elements))

    @property
    def char(self) -> int:
        return self.ambient.char

    @property
    def var_names(self):
        return self.ambient.var_names

    def normal_form(self, p: Polynomial) -> Polynomial:
        from . import groebner

        return groebner.normal_form(p, self.basis)

    def is_free(self) -> bool:
        return not self.basis.elements

    def parse(self, text: str) -> Polynomial:
        return self.normal_form(self.ambient.parse(text))

    def describe(self) -> str:
        rel = ", ".join(str(g) for g in self.basis.elements)
        return f"{_ring_label(self.ambient)}/({rel})" if rel else _ring_label(self.ambient)


def _ring_label(ring: PolyRing) -> str:
    base = "QQ" if ring.char == 0 else f"GF({ring.char})"
    return f"{base}[{','.join(ring.var_names)}]"
