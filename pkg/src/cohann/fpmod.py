"""Finitely presented modules over quotient rings.

A module is R^g modulo the column span of a relation matrix with entries in
the ambient polynomial ring; the relation ideal of R acts through implicit
paddings f*e_i that every computation appends on demand.  Syzygies, free
resolutions, Hom modules, annihilators and element quotients all reduce to
the syzygy/lift primitives of the Groebner engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .rings import Polynomial, PolyRing, QuotientRing, RingError, mono_divides
from . import groebner
from .groebner import LiftSolver, Submodule, syzygies

Vector = Tuple[Polynomial, ...]


class NonHomogeneousError(ValueError):
    """Minimal resolutions require weighted-homogeneous input."""


def padding_vectors(ring: QuotientRing, rank: int) -> List[Vector]:
    """The vectors f*e_i for f in the reduced relation basis of the ring."""
    out = []
    zero = ring.ambient.zero()
    for i in range(rank):
        for f in ring.basis.elements:
            vec = [zero] * rank
            vec[i] = f
            out.append(tuple(vec))
    return out


def _nf_vector(ring: QuotientRing, vec: Sequence[Polynomial]) -> Vector:
    return tuple(ring.normal_form(p) for p in vec)


class FPModule:
    """R^free_rank modulo the span of the relation columns (plus I-paddings)."""

    def __init__(self, ring: QuotientRing, free_rank: int, relations: Sequence[Sequence[Polynomial]]):
        self.ring = ring
        self.free_rank = free_rank
        cols = []
        for col in relations:
            if len(col) != free_rank:
                raise RingError("relation column of wrong length")
            nf = _nf_vector(ring, col)
            if any(not p.is_zero() for p in nf):
                cols.append(nf)
        self.relations: Tuple[Vector, ...] = tuple(cols)
        self._carrier: Optional[Submodule] = None
        self._lift: Optional[LiftSolver] = None

    @classmethod
    def free(cls, ring: QuotientRing, rank: int) -> "FPModule":
        return cls(ring, rank, [])

    @classmethod
    def cyclic(cls, ring: QuotientRing, gens: Sequence[Polynomial]) -> "FPModule":
        """R/(gens) as a module."""
        return cls(ring, 1, [(g,) for g in gens])

    @classmethod
    def zero(cls, ring: QuotientRing) -> "FPModule":
        return cls(ring, 0, [])

    def padded_relations(self) -> List[Vector]:
        return list(self.relations) + padding_vectors(self.ring, self.free_rank)

    def carrier(self) -> Submodule:
        """The relation submodule of the free cover, paddings included."""
        if self._carrier is None:
            self._carrier = Submodule(self.ring.ambient, self.free_rank, self.padded_relations())
        return self._carrier

    def lift_solver(self) -> LiftSolver:
        if self._lift is None:
            self._lift = LiftSolver(self.padded_relations(), self.free_rank, self.ring.ambient)
        return self._lift

    def element_is_zero(self, vec: Sequence[Polynomial]) -> bool:
        if self.free_rank == 0:
            return True
        return self.carrier().contains(tuple(vec))

    def is_zero_module(self) -> bool:
        if self.free_rank == 0:
            return True
        unit = self.ring.ambient.one()
        zero = self.ring.ambient.zero()
        for i in range(self.free_rank):
            e = tuple(unit if j == i else zero for j in range(self.free_rank))
            if not self.element_is_zero(e):
                return False
        return True

    def __repr__(self):
        return f"<fpmodule rank {self.free_rank}, {len(self.relations)} relations>"


def syzygy_vectors(ring: QuotientRing, rank: int, gens: Sequence[Vector],
                   max_pairs: Optional[int] = None) -> List[Vector]:
    """Generators of the syzygy module over R of the given vectors in R^rank."""
    gens = list(gens)
    if not gens:
        return []
    full = gens + padding_vectors(ring, rank)
    syz = syzygies(full, rank, ring.ambient, max_pairs=max_pairs)
    out = []
    for s in syz:
        head = _nf_vector(ring, s[: len(gens)])
        if any(not p.is_zero() for p in head):
            out.append(head)
    return out


def syzygy(M: FPModule, max_pairs: Optional[int] = None) -> FPModule:
    """A syzygy module of M for the cover given by its presentation."""
    omega, _ = syzygy_with_embedding(M, max_pairs=max_pairs)
    return omega


def syzygy_with_embedding(M: FPModule, max_pairs: Optional[int] = None):
    """(Omega M, embedding columns into the cover R^g)."""
    gens = [col for col in M.relations]
    rels = syzygy_vectors(M.ring, M.free_rank, gens, max_pairs=max_pairs)
    return FPModule(M.ring, len(gens), rels), gens


@dataclass
class FreeResolution:
    """Chain of presentation matrices d_1..d_n; diffs[i] lists the columns of
    d_{i+1} as vectors in R^{ranks[i]}."""

    module: FPModule
    ranks: List[int]
    diffs: List[List[Vector]]
    minimal: bool

    @property
    def length(self) -> int:
        return len(self.diffs)

    def differential(self, i: int) -> List[Vector]:
        """Columns of d_i (1-based)."""
        return self.diffs[i - 1]

    def omega(self, n: int) -> FPModule:
        """Omega^n of the resolved module; needs length >= n+1."""
        if n == 0:
            return self.module
        if n + 1 > self.length:
            raise ValueError(f"resolution too short for omega^{n}")
        return FPModule(self.module.ring, self.ranks[n], self.diffs[n])

    def verify_complex(self) -> bool:
        """d_i . d_{i+1} = 0 over R, checked exactly."""
        ring = self.module.ring
        for i in range(len(self.diffs) - 1):
            left = self.diffs[i]
            for col in self.diffs[i + 1]:
                acc = [ring.ambient.zero()] * self.ranks[i]
                for j, c in enumerate(col):
                    if c.is_zero():
                        continue
                    for r in range(self.ranks[i]):
                        acc[r] = acc[r] + c * left[j][r]
                if any(not ring.normal_form(p).is_zero() for p in acc):
                    return False
        return True

    def has_unit_entries(self) -> bool:
        for cols in self.diffs:
            for col in cols:
                for p in col:
                    if p.is_constant() and not p.is_zero():
                        return True
        return False


def _infer_column_degree(ring: QuotientRing, col: Vector, row_degrees) -> Optional[int]:
    deg = None
    for r, p in enumerate(col):
        if p.is_zero():
            continue
        if not p.is_homogeneous():
            return None
        d = p.total_degree() + row_degrees[r]
        if deg is None:
            deg = d
        elif deg != d:
            return None
    return deg if deg is not None else -1


def _graded_input_ok(M: FPModule) -> bool:
    if any(not g.is_homogeneous() for g in M.ring.basis.elements):
        return False
    row_degrees = [0] * M.free_rank
    return all(
        _infer_column_degree(M.ring, col, row_degrees) is not None for col in M.relations
    )


def minimalize_generators(ring: QuotientRing, rank: int, gens: Sequence[Vector],
                          max_pairs: Optional[int] = None) -> List[Vector]:
    """Drop generators lying in the span of the others; repeats to a fixpoint."""
    gens = list(gens)
    changed = True
    while changed:
        changed = False
        for i in range(len(gens)):
            others = gens[:i] + gens[i + 1 :]
            sub = Submodule(ring.ambient, rank, others + padding_vectors(ring, rank),
                            max_pairs=max_pairs)
            if sub.contains(gens[i]):
                gens.pop(i)
                changed = True
                break
    return gens


def resolve(M: FPModule, length: int, minimal: bool = False,
            max_pairs: Optional[int] = None) -> FreeResolution:
    """Free resolution of M to homological degree `length`.

    With minimal=True the input must be weighted-homogeneous; each syzygy
    step then uses an irredundant generating set, so no differential carries
    a unit entry.
    """
    if minimal and not _graded_input_ok(M):
        raise NonHomogeneousError("minimal resolution requires homogeneous relations")
    ranks = [M.free_rank]
    diffs: List[List[Vector]] = []
    rank = M.free_rank
    gens: List[Vector] = list(M.relations)
    for step in range(length):
        if minimal:
            gens = minimalize_generators(M.ring, rank, gens, max_pairs=max_pairs)
        diffs.append(list(gens))
        ranks.append(len(gens))
        if step < length - 1:
            gens = syzygy_vectors(M.ring, rank, gens, max_pairs=max_pairs)
            rank = ranks[-1]
    res = FreeResolution(M, ranks, diffs, minimal)
    if minimal and res.has_unit_entries():
        raise NonHomogeneousError("minimalization left a unit entry")
    return res


def annihilator(M: FPModule, max_pairs: Optional[int] = None) -> groebner.Ideal:
    """{r : r M = 0} as an ideal of the ambient ring; contains the relations."""
    ring = M.ring
    P = ring.ambient
    if M.free_rank == 0:
        return groebner.Ideal(P, [P.one()])
    padded = M.padded_relations()
    result = None
    unit = P.one()
    zero = P.zero()
    for i in range(M.free_rank):
        e = tuple(unit if j == i else zero for j in range(M.free_rank))
        syz = syzygies([e] + padded, M.free_rank, P, max_pairs=max_pairs)
        gens = [s[0] for s in syz if not s[0].is_zero()]
        part = groebner.Ideal(P, gens)
        result = part if result is None else groebner.intersect(result, part, max_pairs=max_pairs)
    return groebner.Ideal(P, list(result.groebner_basis().elements))


def present_subquotient(ring: QuotientRing, rank: int, gens: Sequence[Vector],
                        sub_gens: Sequence[Vector],
                        max_pairs: Optional[int] = None) -> FPModule:
    """Present <gens> / (<sub_gens> + I-paddings) inside R^rank."""
    gens = list(gens)
    if not gens:
        return FPModule.zero(ring)
    full = gens + list(sub_gens) + padding_vectors(ring, rank)
    syz = syzygies(full, rank, ring.ambient, max_pairs=max_pairs)
    rels = [s[: len(gens)] for s in syz]
    return FPModule(ring, len(gens), rels)


def preimage_generators(ring: QuotientRing, columns: Sequence[Vector], target_rank: int,
                        target_sub: Sequence[Vector],
                        max_pairs: Optional[int] = None) -> List[Vector]:
    """Generators of {v : sum v_i columns[i] in <target_sub> + I-paddings}."""
    cols = list(columns)
    if not cols:
        return []
    full = cols + list(target_sub) + padding_vectors(ring, target_rank)
    syz = syzygies(full, target_rank, ring.ambient, max_pairs=max_pairs)
    out = []
    for s in syz:
        head = _nf_vector(ring, s[: len(cols)])
        out.append(head)
    # keep only a generating set with nonzero heads plus those recording
    # combinations of the columns that die in the target
    return [v for v in out if any(not p.is_zero() for p in v)]


def prune(M: FPModule) -> FPModule:
    """Remove generators made redundant by constant unit relation entries."""
    ring = M.ring
    fld = ring.ambient.field
    rank = M.free_rank
    cols = [list(col) for col in M.relations]
    while True:
        hit = None
        for j, col in enumerate(cols):
            for i, p in enumerate(col):
                if p.is_constant() and not p.is_zero():
                    hit = (i, j, p.constant_value())
                    break
            if hit:
                break
        if not hit:
            break
        i, j, c = hit
        pivot = cols[j]
        inv = fld.inv(c)
        new_cols = []
        for t, col in enumerate(cols):
            if t == j:
                continue
            factor = col[i]
            if factor.is_zero():
                reduced = col
            else:
                reduced = [col[r] - pivot[r].scale(inv) * factor for r in range(rank)]
            new_cols.append([reduced[r] for r in range(rank) if r != i])
        rank -= 1
        cols = [[ring.normal_form(p) for p in col] for col in new_cols]
    return FPModule(ring, rank, cols)


def elem_quotient(M: FPModule, a: Polynomial, max_pairs: Optional[int] = None):
    """(0 :_M a) and M/aM; the kernel comes with its embedding columns."""
    ring = M.ring
    P = ring.ambient
    a = ring.normal_form(a)
    g = M.free_rank
    padded = M.padded_relations()
    unit = P.one()
    zero = P.zero()
    scaled_units = []
    for i in range(g):
        vec = [zero] * g
        vec[i] = a
        scaled_units.append(tuple(vec))
    kernel_gens = preimage_generators(ring, scaled_units, g, M.relations, max_pairs=max_pairs)
    kernel = present_subquotient(ring, g, kernel_gens, padded, max_pairs=max_pairs)
    quotient = prune(FPModule(ring, g, list(M.relations) + scaled_units))
    return ElemQuotient(kernel=kernel, quotient=quotient, kernel_embedding=kernel_gens)


@dataclass
class ElemQuotient:
    kernel: FPModule
    quotient: FPModule
    kernel_embedding: List[Vector]


class ModuleMap:
    """Map between presented modules, given on cover generators.

    columns[i] is the image in the target cover of the i-th source generator;
    construction verifies that source relations land in target relations and
    stores the lifting coefficients as the witness.
    """

    def __init__(self, source: FPModule, target: FPModule, columns: Sequence[Vector],
                 max_pairs: Optional[int] = None):
        if len(columns) != source.free_rank:
            raise RingError("one image column per source generator required")
        self.source = source
        self.target = target
        self.columns = [_nf_vector(source.ring, c) for c in columns]
        self.witness = []
        solver = target.lift_solver()
        for rel in source.relations:
            img = self._apply_to(rel)
            coeffs = solver.lift(img)
            if coeffs is None:
                raise RingError("map does not carry relations into relations")
            self.witness.append(coeffs)

    def _apply_to(self, vec: Sequence[Polynomial]) -> Vector:
        ring = self.target.ring
        acc = [ring.ambient.zero()] * self.target.free_rank
        for i, c in enumerate(vec):
            if c.is_zero():
                continue
            col = self.columns[i]
            for r in range(self.target.free_rank):
                acc[r] = acc[r] + c * col[r]
        return _nf_vector(ring, acc)

    def apply(self, vec: Sequence[Polynomial]) -> Vector:
        return self._apply_to(vec)

    def compose(self, inner: "ModuleMap") -> "ModuleMap":
        """self after inner."""
        cols = [self._apply_to(c) for c in inner.columns]
        return ModuleMap(inner.source, self.target, cols)

    def is_zero_map(self) -> bool:
        return all(self.target.element_is_zero(c) for c in self.columns)

    @classmethod
    def identity(cls, M: FPModule) -> "ModuleMap":
        P = M.ring.ambient
        unit, zero = P.one(), P.zero()
        cols = [
            tuple(unit if j == i else zero for j in range(M.free_rank))
            for i in range(M.free_rank)
        ]
        return cls(M, M, cols)


def kernel_generators(f: ModuleMap, max_pairs: Optional[int] = None) -> List[Vector]:
    """Generators in the source cover of {v : f(v) = 0}."""
    return preimage_generators(
        f.source.ring, f.columns, f.target.free_rank, f.target.relations, max_pairs=max_pairs
    ) if f.source.free_rank else []


def is_injective(f: ModuleMap, max_pairs: Optional[int] = None) -> bool:
    for v in kernel_generators(f, max_pairs=max_pairs):
        if not f.source.element_is_zero(v):
            return False
    return True


def is_surjective(f: ModuleMap, max_pairs: Optional[int] = None) -> bool:
    target = f.target
    if target.free_rank == 0:
        return True
    sub = Submodule(
        target.ring.ambient,
        target.free_rank,
        f.columns + target.padded_relations(),
        max_pairs=max_pairs,
    )
    P = target.ring.ambient
    unit, zero = P.one(), P.zero()
    for i in range(target.free_rank):
        e = tuple(unit if j == i else zero for j in range(target.free_rank))
        if not sub.contains(e):
            return False
    return True


def composition_is_zero(f: ModuleMap, g: ModuleMap) -> bool:
    return g.compose(f).is_zero_map()


def is_exact_at_middle(f: ModuleMap, g: ModuleMap, max_pairs: Optional[int] = None) -> bool:
    """ker g = im f inside the middle module (composition checked separately)."""
    mid = f.target
    image = Submodule(
        mid.ring.ambient,
        mid.free_rank,
        f.columns + mid.padded_relations(),
        max_pairs=max_pairs,
    )
    for v in kernel_generators(g, max_pairs=max_pairs):
        if not image.contains(v):
            return False
    return True


def verify_short_exact(f: ModuleMap, g: ModuleMap, max_pairs: Optional[int] = None):
    """Check list for 0 -> source(f) -> middle -> target(g) -> 0."""
    checks = [
        ("composition-zero", composition_is_zero(f, g)),
        ("left-injective", is_injective(f, max_pairs=max_pairs)),
        ("middle-exact", is_exact_at_middle(f, g, max_pairs=max_pairs)),
        ("right-surjective", is_surjective(g, max_pairs=max_pairs)),
    ]
    return checks


def hom_module(M: FPModule, N: FPModule, max_pairs: Optional[int] = None) -> FPModule:
    """Presentation of Hom_R(M, N) via the kernel of the induced map on covers."""
    ring = M.ring
    P = ring.ambient
    h, g = N.free_rank, M.free_rank
    if h == 0 or g == 0:
        return FPModule.zero(ring)
    s = len(M.relations)
    # flat index of entry (col i < g, row k < h) is i*h + k
    if s == 0:
        kernel_gens = _flat_units(P, h * g)
    else:
        cols = []
        for i in range(g):
            for k in range(h):
                vec = [P.zero()] * (h * s)
                for j, rel in enumerate(M.relations):
                    vec[j * h + k] = rel[i]
                cols.append(tuple(vec))
        target_sub = _blocked_targets(N, s)
        kernel_gens = preimage_generators(ring, cols, h * s, target_sub, max_pairs=max_pairs)
    trivial = _blocked_targets(N, g)
    return present_subquotient(ring, h * g, kernel_gens, trivial, max_pairs=max_pairs)


def _flat_units(P: PolyRing, n: int) -> List[Vector]:
    unit, zero = P.one(), P.zero()
    return [tuple(unit if j == i else zero for j in range(n)) for i in range(n)]


def _blocked_targets(N: FPModule, blocks: int) -> List[Vector]:
    """Relation columns of N placed in every cover slot of N^blocks."""
    P = N.ring.ambient
    h = N.free_rank
    out = []
    for b in range(blocks):
        for rel in N.relations:
            vec = [P.zero()] * (h * blocks)
            for r in range(h):
                vec[b * h + r] = rel[r]
            out.append(tuple(vec))
    return out


def module_k_dimension(M: FPModule) -> Optional[int]:
    """k-dimension of M, or None when infinite."""
    if M.free_rank == 0:
        return 0
    ring = M.ring
    leads_by_comp = _module_leads(M)
    total = 0
    for comp in range(M.free_rank):
        count = _staircase_count(ring.ambient, leads_by_comp.get(comp, []))
        if count is None:
            return None
        total += count
    return total


def truncated_dimensions(M: FPModule, depth: int) -> List[int]:
    """dim_k M/(m^d M) for d = 1..depth; an isomorphism invariant."""
    ring = M.ring
    P = ring.ambient
    out = []
    for d in range(1, depth + 1):
        extra = []
        for exps in _monomials_of_degree(P.arity, d):
            for i in range(M.free_rank):
                vec = [P.zero()] * M.free_rank
                vec[i] = P.monomial(exps)
                extra.append(tuple(vec))
        quo = FPModule(ring, M.free_rank, list(M.relations) + extra)
        dim = module_k_dimension(quo)
        out.append(dim if dim is not None else -1)
    return out


def _monomials_of_degree(arity: int, d: int):
    if arity == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in _monomials_of_degree(arity - 1, d - first):
            yield (first,) + rest


def _module_leads(M: FPModule):
    basis = M.carrier().basis()
    by_comp = {}
    for v in basis:
        (comp, exps), _ = v[0]
        by_comp.setdefault(comp, []).append(exps)
    return by_comp


def _staircase_count(P: PolyRing, leads) -> Optional[int]:
    import itertools

    bounds = []
    for i in range(P.arity):
        pure = [m[i] for m in leads if m[i] > 0 and all(e == 0 for j, e in enumerate(m) if j != i)]
        if not pure:
            return None
        bounds.append(min(pure))
    count = 0
    for exps in itertools.product(*(range(b) for b in bounds)):
        if not any(mono_divides(lm, exps) for lm in leads):
            count += 1
    return count


def horseshoe_syzygies(f: ModuleMap, g: ModuleMap, max_pairs: Optional[int] = None):
    """Short exact sequence of syzygies induced by 0 -> L -> M -> N -> 0.

    Omega M is taken for the combined cover F_L + F_N -> M; returns the two
    syzygy-level maps plus the exactness check list for both rows.
    """
    L, M, N = f.source, f.target, g.target
    ring = M.ring
    P = ring.ambient
    input_checks = verify_short_exact(f, g, max_pairs=max_pairs)
    if not all(ok for _, ok in input_checks):
        return HorseshoeResult(None, None, input_checks, [], False)

    # lift N's cover generators through g
    n_solver = LiftSolver(g.columns + N.padded_relations(), N.free_rank, P)
    lifted = []
    unit, zero = P.one(), P.zero()
    for j in range(N.free_rank):
        e = tuple(unit if r == j else zero for r in range(N.free_rank))
        coeffs = n_solver.lift(e)
        if coeffs is None:
            raise RingError("surjection failed to lift a cover generator")
        lifted.append(tuple(coeffs[: M.free_rank]))

    combined = [tuple(col) for col in f.columns] + lifted
    omega_mid_gens = preimage_generators(ring, combined, M.free_rank, M.relations,
                                         max_pairs=max_pairs)
    rank_comb = L.free_rank + N.free_rank
    omega_mid = present_subquotient(ring, rank_comb, omega_mid_gens,
                                    padding_vectors(ring, rank_comb), max_pairs=max_pairs)

    omega_L, L_embed = syzygy_with_embedding(L, max_pairs=max_pairs)
    omega_N, N_embed = syzygy_with_embedding(N, max_pairs=max_pairs)

    # Omega L -> Omega M': w |-> (w, 0), expressed on omega_mid generators
    mid_solver = LiftSolver(omega_mid_gens + padding_vectors(ring, rank_comb),
                            rank_comb, P)
    left_cols = []
    for w in L_embed:
        target_vec = tuple(list(w) + [zero] * N.free_rank)
        coeffs = mid_solver.lift(target_vec)
        if coeffs is None:
            raise RingError("syzygy of L failed to land in the combined kernel")
        left_cols.append(tuple(coeffs[: len(omega_mid_gens)]))

    # Omega M' -> Omega N: (v, w) |-> w, expressed on omega_N generators
    n_sub_solver = LiftSolver(N_embed + padding_vectors(ring, N.free_rank),
                              N.free_rank, P)
    right_cols = []
    for gen in omega_mid_gens:
        tail = tuple(gen[L.free_rank :])
        coeffs = n_sub_solver.lift(tail)
        if coeffs is None:
            raise RingError("projection of a combined syzygy missed Omega N")
        right_cols.append(tuple(coeffs[: len(N_embed)]))

    lf = ModuleMap(omega_L, omega_mid, left_cols, max_pairs=max_pairs)
    rg = ModuleMap(omega_mid, omega_N, right_cols, max_pairs=max_pairs)
    out_checks = verify_short_exact(lf, rg, max_pairs=max_pairs)
    ok = all(flag for _, flag in input_checks + out_checks)
    return HorseshoeResult(lf, rg, input_checks, out_checks, ok)


@dataclass
class HorseshoeResult:
    left: Optional[ModuleMap]
    right: Optional[ModuleMap]
    input_checks: list
    output_checks: list
    passed: bool
