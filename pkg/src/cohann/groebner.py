"""Buchberger engine for ideals and submodules of free modules.

One reduction core handles both cases: a polynomial is a rank-1 module
element.  Module terms are pairs (component, monomial); the default module
order is position-over-term with lower component index dominant, which also
serves as the elimination order behind syzygy computations.

Everything here is deterministic: pair selection follows the normal strategy
(minimal lcm degree, ties by generator index pair), reduction scans basis
elements in insertion order, and outputs are reduced bases in a fixed sort.
"""

from __future__ import annotations

import contextvars
import itertools
from contextlib import contextmanager
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .rings import (
    MonomialOrder,
    Polynomial,
    PolyRing,
    QuotientRing,
    RingError,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
)

DEFAULT_MAX_PAIRS = 200_000

_PAIR_ACC = contextvars.ContextVar("cohann_gb_pairs", default=None)


@contextmanager
def pair_counter():
    """Accumulate S-pair counts from every engine run in the with-block."""
    acc = [0]
    token = _PAIR_ACC.set(acc)
    try:
        yield acc
    finally:
        _PAIR_ACC.reset(token)


def _note_pairs(n: int):
    acc = _PAIR_ACC.get()
    if acc is not None:
        acc[0] += n


class BudgetExceededError(RuntimeError):
    """S-pair budget exhausted; carries the number of pairs processed."""

    def __init__(self, pairs: int):
        super().__init__(f"Groebner step budget exceeded after {pairs} pairs")
        self.pairs = pairs


# -- module term core ---------------------------------------------------------
#
# A vector is a tuple of ((component, exponents), coefficient) sorted strictly
# descending by the module key.  The zero vector is the empty tuple.


def pot_key(ring: PolyRing):
    """Position-over-term: lower component dominates, ring order inside."""
    rkey = ring.key

    def key(term):
        comp, exps = term
        return (-comp, rkey(exps))

    return key


def elim_key(ring: PolyRing, k: int):
    """Monomial block over position: terms touching the first k ring
    variables outrank every term free of them, regardless of component."""
    w = ring.weights
    rkey = ring.key

    def key(term):
        comp, exps = term
        head = exps[:k]
        deg = sum(head) if w is None else sum(e * x for e, x in zip(head, w))
        return ((deg, tuple(-e for e in reversed(head))), -comp, rkey(exps))

    return key


class ModuleEngine:
    """Buchberger and normal forms for rank-r free-module elements."""

    def __init__(self, ring: PolyRing, rank: int, key=None, max_pairs: Optional[int] = None):
        self.ring = ring
        self.rank = rank
        self.key = key or pot_key(ring)
        if max_pairs is None:
            max_pairs = DEFAULT_MAX_PAIRS
        if max_pairs <= 0:
            raise ValueError("pair budget must be positive")
        self.max_pairs = max_pairs
        self.field = ring.field

    # -- vector plumbing ---------------------------------------------------

    def vector(self, polys: Sequence[Polynomial]):
        if len(polys) != self.rank:
            raise RingError(f"expected {self.rank} components, got {len(polys)}")
        items = []
        for comp, p in enumerate(polys):
            if p.is_zero():
                continue
            if p.ring != self.ring:
                raise RingError("component from a different ring")
            items.extend(((comp, m), c) for m, c in p.terms)
        return self.normalize(items)

    def polys(self, v) -> Tuple[Polynomial, ...]:
        buckets = [[] for _ in range(self.rank)]
        for (comp, exps), c in v:
            buckets[comp].append((exps, c))
        return tuple(self.ring.poly(b) for b in buckets)

    def normalize(self, items):
        acc = {}
        zero = self.field.zero
        for tm, c in items:
            cur = acc.get(tm)
            c = c if cur is None else self.field.add(cur, c)
            if c == zero:
                acc.pop(tm, None)
            else:
                acc[tm] = c
        return tuple(sorted(acc.items(), key=lambda t: self.key(t[0]), reverse=True))

    def scale(self, v, c):
        mul = self.field.mul
        return tuple((tm, mul(cc, c)) for tm, cc in v)

    def shift(self, v, exps, c):
        """c * x^exps * v; sortedness is preserved by multiplicativity."""
        mul = self.field.mul
        return tuple(((comp, mono_mul(m, exps)), mul(cc, c)) for (comp, m), cc in v)

    def add_scaled(self, f, g, exps, c):
        """f + c * x^exps * g via linear merge of sorted term lists."""
        g2 = self.shift(g, exps, c)
        out = []
        i = j = 0
        nf, ng = len(f), len(g2)
        key = self.key
        add = self.field.add
        zero = self.field.zero
        while i < nf and j < ng:
            tf, cf = f[i]
            tg, cg = g2[j]
            if tf == tg:
                s = add(cf, cg)
                if s != zero:
                    out.append((tf, s))
                i += 1
                j += 1
            elif key(tf) > key(tg):
                out.append(f[i])
                i += 1
            else:
                out.append(g2[j])
                j += 1
        out.extend(f[i:])
        out.extend(g2[j:])
        return tuple(out)

    # -- reduction ----------------------------------------------------------

    def normal_form(self, v, basis):
        """Fully reduce v: no remaining term divisible by a basis lead.

        basis: sequence of monic nonzero vectors, scanned in given order.
        """
        by_comp = {}
        for g in basis:
            if g:
                (comp, exps), _ = g[0]
                by_comp.setdefault(comp, []).append((exps, g))
        done: List[tuple] = []
        work = v
        neg = self.field.neg
        while work:
            idx = None
            hit = None
            for t, ((comp, exps), c) in enumerate(work):
                for lead_exps, g in by_comp.get(comp, ()):
                    q = mono_div(exps, lead_exps)
                    if q is not None:
                        idx, hit = t, (q, g, c)
                        break
                if hit is not None:
                    break
            if hit is None:
                done.extend(work)
                break
            done.extend(work[:idx])
            q, g, c = hit
            work = self.add_scaled(work[idx:], g, q, neg(c))
        return tuple(done)

    def spair(self, f, g):
        (cf, mf), _ = f[0]
        (cg, mg), _ = g[0]
        if cf != cg:
            raise ValueError("S-pair needs equal lead components")
        lcm = mono_lcm(mf, mg)
        a = self.shift(f, mono_div(lcm, mf), self.field.one)
        return self.add_scaled(a, g, mono_div(lcm, mg), self.field.neg(self.field.one))

    def monic(self, v):
        return self.scale(v, self.field.inv(v[0][1]))

    # -- Buchberger ----------------------------------------------------------

    def buchberger(self, gens) -> list:
        """Reduced module Groebner basis of the given generator vectors.

        Normal selection strategy; product criterion in the ideal case and
        the chain criterion throughout.
        """
        G: List[tuple] = []
        pending = set()
        processed = 0

        def add_pairs(j):
            cj = G[j][0][0][0]
            for i in range(j):
                if G[i][0][0][0] == cj:
                    pending.add((i, j))

        for raw in gens:
            v = self.normal_form(raw, G)
            if v:
                G.append(self.monic(v))
                add_pairs(len(G) - 1)

        degree = self.ring.degree

        def pair_rank(ij):
            i, j = ij
            return (degree(mono_lcm(G[i][0][0][1], G[j][0][0][1])), i, j)

        while pending:
            best = min(pending, key=pair_rank)
            pending.discard(best)
            processed += 1
            if processed > self.max_pairs:
                _note_pairs(processed)
                raise BudgetExceededError(processed)
            i, j = best
            (comp, mi), _ = G[i][0]
            mj = G[j][0][0][1]
            lcm = mono_lcm(mi, mj)
            if self.rank == 1 and lcm == mono_mul(mi, mj):
                continue  # product criterion: valid for ideals only
            if self._chain_skip(i, j, comp, lcm, G, pending):
                continue
            h = self.normal_form(self.spair(G[i], G[j]), G)
            if h:
                G.append(self.monic(h))
                add_pairs(len(G) - 1)
        _note_pairs(processed)
        return self._reduce_basis(G)

    @staticmethod
    def _chain_skip(i, j, comp, lcm, G, pending) -> bool:
        # skip (i,j) when some G[k] divides the lcm and both companion
        # pairs were already treated (classical second criterion)
        for k in range(len(G)):
            if k == i or k == j:
                continue
            (ck, mk), _ = G[k][0]
            if ck != comp or not mono_divides(mk, lcm):
                continue
            p1 = (i, k) if i < k else (k, i)
            p2 = (j, k) if j < k else (k, j)
            if p1 not in pending and p2 not in pending:
                return True
        return False

    def _reduce_basis(self, G) -> list:
        order = sorted(range(len(G)), key=lambda i: self.key(G[i][0][0]))
        kept: List[int] = []
        for i in order:
            comp, exps = G[i][0][0]
            if not any(
                G[t][0][0][0] == comp and mono_divides(G[t][0][0][1], exps) for t in kept
            ):
                kept.append(i)
        minimal = [G[i] for i in kept]
        reduced = []
        for t, g in enumerate(minimal):
            others = minimal[:t] + minimal[t + 1 :]
            reduced.append(self.monic(self.normal_form(g, others)))
        reduced.sort(key=lambda g: self.key(g[0][0]), reverse=True)
        return reduced


# -- polynomial-level API ------------------------------------------------------


@dataclass(frozen=True)
class ReducedGroebnerBasis:
    """Canonical form of an ideal: monic, auto-reduced, sorted descending."""

    ring: PolyRing
    elements: Tuple[Polynomial, ...]
    order: MonomialOrder

    def __iter__(self):
        return iter(self.elements)

    def contains_one(self) -> bool:
        return any(g.is_constant() and not g.is_zero() for g in self.elements)


def _as_ambient(ring) -> PolyRing:
    return ring.ambient if isinstance(ring, QuotientRing) else ring


def buchberger(gens: Sequence[Polynomial], ring: Optional[PolyRing] = None,
               max_pairs: Optional[int] = None) -> ReducedGroebnerBasis:
    """Reduced Groebner basis of an ideal given by polynomial generators."""
    gens = [g for g in gens if not g.is_zero()]
    if ring is None:
        if not gens:
            raise RingError("cannot infer the ring of an empty generator list")
        ring = gens[0].ring
    ring = _as_ambient(ring)
    for g in gens:
        if g.ring != ring:
            raise RingError("generators from different rings")
    eng = ModuleEngine(ring, 1, max_pairs=max_pairs)
    basis = eng.buchberger([eng.vector([g]) for g in gens])
    elements = tuple(eng.polys(v)[0] for v in basis)
    return ReducedGroebnerBasis(ring, elements, ring.order)


def normal_form(p: Polynomial, basis) -> Polynomial:
    """Remainder of p with no term divisible by any basis lead; idempotent."""
    elems = basis.elements if isinstance(basis, ReducedGroebnerBasis) else tuple(basis)
    elems = [g for g in elems if not g.is_zero()]
    if not elems:
        return p
    ring = p.ring
    eng = ModuleEngine(ring, 1)
    vecs = [eng.vector([g.monic()]) for g in elems]
    return eng.polys(eng.normal_form(eng.vector([p]), vecs))[0]


class Ideal:
    """Ideal of a polynomial ring with a cached reduced basis."""

    def __init__(self, ring, generators: Sequence[Polynomial]):
        self.ring = _as_ambient(ring)
        gens = []
        for g in generators:
            if g.ring != self.ring:
                raise RingError("generator outside the ring")
            if not g.is_zero():
                gens.append(g)
        self.generators: Tuple[Polynomial, ...] = tuple(gens)
        self._gb: Optional[ReducedGroebnerBasis] = None

    def groebner_basis(self, max_pairs: Optional[int] = None) -> ReducedGroebnerBasis:
        if self._gb is None:
            self._gb = buchberger(self.generators, self.ring, max_pairs=max_pairs)
        return self._gb

    def contains(self, p: Polynomial, max_pairs: Optional[int] = None) -> bool:
        return normal_form(p, self.groebner_basis(max_pairs)).is_zero()

    def is_zero(self) -> bool:
        return not self.groebner_basis().elements

    def is_unit(self) -> bool:
        return self.groebner_basis().contains_one()

    def same_ideal(self, other: "Ideal") -> bool:
        return (
            self.ring == other.ring
            and self.groebner_basis().elements == other.groebner_basis().elements
        )

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators) or "0"
        return f"<ideal ({gens})>"


def ideal_membership(p: Polynomial, I: Ideal, max_pairs: Optional[int] = None) -> bool:
    return I.contains(p, max_pairs=max_pairs)


def syzygies(vectors: Sequence[Sequence[Polynomial]], rank: int, ring: PolyRing,
             max_pairs: Optional[int] = None) -> List[Tuple[Polynomial, ...]]:
    """Generators (a Groebner basis) of the syzygy module of the given
    rank-`rank` vectors: all (a_1..a_s) with sum a_i * v_i = 0.

    Computed by one Buchberger run on vectors augmented with unit tracking
    components, which the position-over-term order eliminates.
    """
    s = len(vectors)
    if s == 0:
        return []
    eng = ModuleEngine(ring, rank + s, max_pairs=max_pairs)
    gens = []
    zero = ring.zero()
    for i, vec in enumerate(vectors):
        if len(vec) != rank:
            raise RingError("vector of wrong rank")
        tail = [zero] * s
        tail[i] = ring.one()
        gens.append(eng.vector(list(vec) + tail))
    basis = eng.buchberger(gens)
    out = []
    for v in basis:
        if v and v[0][0][0] >= rank:  # lead beyond the carrier block: a syzygy
            polys = eng.polys(v)
            out.append(tuple(polys[rank:]))
    return out


class LiftSolver:
    """Expresses targets as combinations of fixed generator vectors.

    Builds the augmented basis once; each lift is then a single reduction.
    """

    def __init__(self, vectors: Sequence[Sequence[Polynomial]], rank: int,
                 ring: PolyRing, max_pairs: Optional[int] = None):
        self.ring = ring
        self.rank = rank
        self.count = len(vectors)
        self.eng = ModuleEngine(ring, rank + self.count, max_pairs=max_pairs)
        gens = []
        zero = ring.zero()
        for i, vec in enumerate(vectors):
            tail = [zero] * self.count
            tail[i] = ring.one()
            gens.append(self.eng.vector(list(vec) + tail))
        self.basis = self.eng.buchberger(gens)

    def reduce(self, target: Sequence[Polynomial]):
        zero = self.ring.zero()
        v = self.eng.vector(list(target) + [zero] * self.count)
        red = self.eng.normal_form(v, self.basis)
        polys = self.eng.polys(red)
        residue = polys[: self.rank]
        coeffs = tuple(-c for c in polys[self.rank :])
        return residue, coeffs

    def lift(self, target: Sequence[Polynomial]):
        """Coefficients c with target = sum c_i * v_i, or None if no member."""
        residue, coeffs = self.reduce(target)
        if any(not p.is_zero() for p in residue):
            return None
        return coeffs

    def contains(self, target: Sequence[Polynomial]) -> bool:
        residue, _ = self.reduce(target)
        return all(p.is_zero() for p in residue)


class Submodule:
    """Submodule of a free module R^rank with a cached reduced module basis."""

    def __init__(self, ring: PolyRing, rank: int, generators, max_pairs: Optional[int] = None):
        self.ring = _as_ambient(ring)
        self.rank = rank
        gens = [tuple(v) for v in generators]
        for v in gens:
            if len(v) != rank:
                raise RingError("generator vector of wrong rank")
        self.generators = [v for v in gens if any(not p.is_zero() for p in v)]
        self._eng = ModuleEngine(self.ring, rank, max_pairs=max_pairs)
        self._basis = None

    def basis(self):
        if self._basis is None:
            self._basis = self._eng.buchberger(
                [self._eng.vector(list(v)) for v in self.generators]
            )
        return self._basis

    def basis_vectors(self) -> List[Tuple[Polynomial, ...]]:
        return [self._eng.polys(v) for v in self.basis()]

    def contains(self, vec) -> bool:
        v = self._eng.vector(list(vec))
        return not self._eng.normal_form(v, self.basis())

    def normal_form(self, vec) -> Tuple[Polynomial, ...]:
        v = self._eng.vector(list(vec))
        return self._eng.polys(self._eng.normal_form(v, self.basis()))


# -- derived ideal calculus ----------------------------------------------------


def colon(I: Ideal, g: Polynomial, max_pairs: Optional[int] = None) -> Ideal:
    """(I : g) = {f : f*g in I}."""
    ring = I.ring
    if g.is_zero():
        return Ideal(ring, [ring.one()])
    vecs = [(g,)] + [(h,) for h in I.generators]
    syz = syzygies(vecs, 1, ring, max_pairs=max_pairs)
    gens = [s[0] for s in syz if not s[0].is_zero()]
    return Ideal(ring, _reduced_generators(gens, ring, max_pairs))


def colon_ideal(I: Ideal, J: Ideal, max_pairs: Optional[int] = None) -> Ideal:
    """(I : J) over all generators of J."""
    if not J.generators:
        return Ideal(I.ring, [I.ring.one()])
    result = None
    for g in J.generators:
        part = colon(I, g, max_pairs=max_pairs)
        result = part if result is None else intersect(result, part, max_pairs=max_pairs)
    return result


def intersect(I: Ideal, J: Ideal, max_pairs: Optional[int] = None) -> Ideal:
    """I meet J by the auxiliary-variable construction with elimination."""
    ring = I.ring
    if ring != J.ring:
        raise RingError("ideals in different rings")
    if not I.generators or not J.generators:
        return Ideal(ring, [])
    tname = _fresh_name("t", ring.var_names)
    ext = PolyRing(
        ring.char,
        (tname,) + ring.var_names,
        MonomialOrder("block", 1),
        None if ring.weights is None else (1,) + ring.weights,
    )
    t = ext.var(0)
    old = [ext.var(i + 1) for i in range(ring.arity)]
    gens = [t * f.map_to(ext, old) for f in I.generators]
    one_minus_t = ext.one() - t
    gens += [one_minus_t * g.map_to(ext, old) for g in J.generators]
    gb = buchberger(gens, ext, max_pairs=max_pairs)
    out = []
    for g in gb.elements:
        if all(m[0] == 0 for m, _ in g.terms):
            out.append(_drop_first_var(g, ring))
    return Ideal(ring, out)


def _drop_first_var(p: Polynomial, target: PolyRing) -> Polynomial:
    return target.poly([(m[1:], c) for m, c in p.terms])


def _fresh_name(stem: str, taken) -> str:
    name = stem
    while name in taken:
        name += "_"
    return name


def eliminate(I: Ideal, var_indices, max_pairs: Optional[int] = None) -> Ideal:
    """Generators of I meet k[remaining vars], returned in the original ring."""
    ring = I.ring
    idx = sorted(set(var_indices))
    if any(not 0 <= i < ring.arity for i in idx):
        raise RingError("variable index out of range")
    if not idx:
        return Ideal(ring, list(I.generators))
    if len(idx) >= ring.arity:
        raise RingError("cannot eliminate every variable")
    rest = [i for i in range(ring.arity) if i not in idx]
    perm = idx + rest
    names = tuple(ring.var_names[i] for i in perm)
    weights = None if ring.weights is None else tuple(ring.weights[i] for i in perm)
    ext = PolyRing(ring.char, names, MonomialOrder("block", len(idx)), weights)
    images_fwd = [None] * ring.arity
    for new_pos, old_pos in enumerate(perm):
        images_fwd[old_pos] = ext.var(new_pos)
    gens = [f.map_to(ext, images_fwd) for f in I.generators]
    gb = buchberger(gens, ext, max_pairs=max_pairs)
    k = len(idx)
    back = [None] * ext.arity
    for new_pos, old_pos in enumerate(perm):
        back[new_pos] = ring.var(old_pos)
    out = []
    for g in gb.elements:
        if all(all(e == 0 for e in m[:k]) for m, _ in g.terms):
            out.append(g.map_to(ring, back))
    return Ideal(ring, out)


def radical_membership(g: Polynomial, I: Ideal, max_pairs: Optional[int] = None) -> bool:
    """g in rad(I), decided with one auxiliary variable: 1 in I + (1 - t*g)."""
    ring = I.ring
    if g.is_zero():
        return True
    tname = _fresh_name("t", ring.var_names)
    ext = PolyRing(
        ring.char,
        ring.var_names + (tname,),
        MonomialOrder("grevlex"),
        None if ring.weights is None else ring.weights + (1,),
    )
    old = [ext.var(i) for i in range(ring.arity)]
    t = ext.var(ext.arity - 1)
    gens = [f.map_to(ext, old) for f in I.generators]
    gens.append(ext.one() - t * g.map_to(ext, old))
    gb = buchberger(gens, ext, max_pairs=max_pairs)
    return gb.contains_one()


def is_nonzerodivisor(g: Polynomial, R: QuotientRing, max_pairs: Optional[int] = None) -> bool:
    """True iff (I : g) = I for the relation ideal I of R."""
    if g.is_zero():
        return False
    quot = colon(R.relations, g, max_pairs=max_pairs)
    return quot.groebner_basis().elements == R.basis.elements


@dataclass(frozen=True)
class StandardMonomials:
    finite: bool
    monomials: Optional[Tuple[Tuple[int, ...], ...]]  # ascending in the ring order


def standard_monomials(R: QuotientRing) -> StandardMonomials:
    """Monomials irreducible by the lead terms of R's relation basis."""
    ring = R.ambient
    leads = [g.lead_monomial() for g in R.basis.elements]
    bounds = []
    for i in range(ring.arity):
        pure = [m[i] for m in leads if all(e == 0 for j, e in enumerate(m) if j != i) and m[i] > 0]
        if not pure:
            return StandardMonomials(False, None)
        bounds.append(min(pure))
    mons = []
    for exps in itertools.product(*(range(b) for b in bounds)):
        if not any(mono_divides(lm, exps) for lm in leads):
            mons.append(exps)
    mons.sort(key=ring.key)
    return StandardMonomials(True, tuple(mons))


def krull_dimension(R: QuotientRing) -> int:
    """Krull dimension via maximal variable sets independent of the lead ideal."""
    ring = R.ambient
    supports = [frozenset(i for i, e in enumerate(g.lead_monomial()) if e > 0)
                for g in R.basis.elements]
    best = 0
    n = ring.arity
    for size in range(n, -1, -1):
        for combo in itertools.combinations(range(n), size):
            s = set(combo)
            if all(not sup <= s for sup in supports):
                return size
    return best


def generic_rank(rows: Sequence[Sequence[Polynomial]]) -> int:
    """Rank over the fraction field via fraction-free elimination."""
    M = [list(r) for r in rows]
    if not M or not M[0]:
        return 0
    nrows, ncols = len(M), len(M[0])
    rank = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, nrows):
            if not M[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        piv = M[rank][col]
        for r in range(rank + 1, nrows):
            if M[r][col].is_zero():
                continue
            factor = M[r][col]
            M[r] = [piv * M[r][j] - factor * M[rank][j] for j in range(ncols)]
        rank += 1
        if rank == nrows:
            break
    return rank


def _reduced_generators(gens, ring, max_pairs=None):
    if not gens:
        return []
    return list(buchberger(gens, ring, max_pairs=max_pairs).elements)
