"""Ext modules, their annihilators, and the annihilation-certificate checks.

Ext^n(M, N) is presented as cocycles modulo coboundaries of Hom(F, N) along a
free resolution F of M; both sides are flattened matrix modules handled by
the subquotient machinery.  Witness ideals ann Ext^n(M, Omega^n M) bound the
level-n cohomology annihilator from above; their intersections over module
families give computable upper bounds, while certificates from the different
and Jacobian side bound it from below.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import List, Optional, Sequence, Tuple

from .rings import Polynomial, QuotientRing, RingError
from . import fpmod, groebner
from .fpmod import (
    FPModule,
    FreeResolution,
    ModuleMap,
    Vector,
    elem_quotient,
    padding_vectors,
    present_subquotient,
    preimage_generators,
    resolve,
    syzygy_vectors,
    verify_short_exact,
)
from .groebner import Ideal, LiftSolver
from .report import VerificationReport


@dataclass
class ExtPresentation:
    """Finitely presented model of Ext^n_R(M, N) with its annihilator."""

    source: FPModule
    target: FPModule
    degree: int
    fp_model: FPModule
    annihilator: Ideal
    resolution: FreeResolution
    flat_rank: int
    kernel_gens: List[Vector]
    relation_gens: List[Vector]

    def is_zero(self) -> bool:
        return self.fp_model.is_zero_module()

    def element_dies(self, flat_vec: Sequence[Polynomial]) -> bool:
        """Is the given cocycle zero in the model?"""
        if self.flat_rank == 0:
            return True
        sub = self._relation_submodule()
        return sub.contains(tuple(flat_vec))

    _rel_sub = None

    def _relation_submodule(self):
        if self._rel_sub is None:
            ring = self.source.ring
            self._rel_sub = groebner.Submodule(
                ring.ambient,
                self.flat_rank,
                list(self.relation_gens) + padding_vectors(ring, self.flat_rank),
            )
        return self._rel_sub


def ext_module(M: FPModule, N: FPModule, n: int,
               resolution: Optional[FreeResolution] = None,
               minimal: bool = False,
               max_pairs: Optional[int] = None) -> ExtPresentation:
    """Ext^n_R(M, N) as an FPModule; Ext^0 is Hom."""
    if n < 0:
        raise ValueError("negative cohomological degree")
    ring = M.ring
    if ring != N.ring:
        raise RingError("modules over different rings")
    P = ring.ambient
    if resolution is None or resolution.length < n + 1:
        resolution = resolve(M, n + 1, minimal=minimal, max_pairs=max_pairs)
    h = N.free_rank
    b_n = resolution.ranks[n]
    b_next = resolution.ranks[n + 1]
    flat = h * b_n
    if flat == 0:
        model = FPModule.zero(ring)
        return ExtPresentation(M, N, n, model, fpmod.annihilator(model, max_pairs=max_pairs),
                               resolution, 0, [], [])

    # cocycles: Phi with Phi . d_{n+1} falling into N's relations blockwise
    if b_next == 0:
        kernel_gens = fpmod._flat_units(P, flat)
    else:
        d_next = resolution.differential(n + 1)
        cols = []
        for i in range(b_n):
            for k in range(h):
                vec = [P.zero()] * (h * b_next)
                for j, col in enumerate(d_next):
                    vec[j * h + k] = col[i]
                cols.append(tuple(vec))
        target_sub = fpmod._blocked_targets(N, b_next)
        pre = preimage_generators(ring, cols, h * b_next, target_sub, max_pairs=max_pairs)
        kernel_gens = pre

    # coboundaries: Psi . d_n for Psi running over the matrix units, plus the
    # blockwise trivial maps into N's relations
    relation_gens: List[Vector] = []
    if n >= 1:
        d_n = resolution.differential(n)
        b_prev = resolution.ranks[n - 1]
        for i2 in range(b_prev):
            for k in range(h):
                vec = [P.zero()] * flat
                for j, col in enumerate(d_n):
                    vec[j * h + k] = col[i2]
                relation_gens.append(tuple(vec))
    relation_gens.extend(fpmod._blocked_targets(N, b_n))

    model = present_subquotient(ring, flat, kernel_gens, relation_gens, max_pairs=max_pairs)
    ann = fpmod.annihilator(model, max_pairs=max_pairs)
    return ExtPresentation(M, N, n, model, ann, resolution, flat, kernel_gens, relation_gens)


@dataclass
class CAWitness:
    """ann Ext^n(M, Omega^n M): by degree shifting this annihilates all of
    Ext^{>=n}(M, -)."""

    module: FPModule
    level: int
    ideal: Ideal
    ext: ExtPresentation


def ca_witness(M: FPModule, n: int, minimal: bool = False,
               max_pairs: Optional[int] = None) -> CAWitness:
    if n < 1:
        raise ValueError("witness level must be at least 1")
    res = resolve(M, n + 1, minimal=minimal, max_pairs=max_pairs)
    omega_n = res.omega(n)
    ext = ext_module(M, omega_n, n, resolution=res, max_pairs=max_pairs)
    return CAWitness(M, n, ext.annihilator, ext)


@dataclass
class CABound:
    """Intersection of member witnesses: an upper bound for the level-n
    cohomology annihilator."""

    level: int
    ideal: Ideal
    witnesses: List[CAWitness]


def ca_upper_bound(family: Sequence[FPModule], n: int,
                   max_pairs: Optional[int] = None) -> CABound:
    if not family:
        raise ValueError("empty witness family")
    witnesses = [ca_witness(M, n, max_pairs=max_pairs) for M in family]
    bound = None
    for w in witnesses:
        bound = w.ideal if bound is None else groebner.intersect(bound, w.ideal,
                                                                 max_pairs=max_pairs)
    bound = Ideal(bound.ring, list(bound.groebner_basis().elements))
    return CABound(n, bound, witnesses)


# -- chain self-maps and induced maps on Ext -----------------------------------


@dataclass
class ChainSelfMap:
    """Lift of a module endomorphism to a chain self-map of a resolution.

    maps[i] lists the columns of the level-i square matrix F_i -> F_i.
    """

    resolution: FreeResolution
    maps: List[List[Vector]]

    def level(self, i: int) -> List[Vector]:
        return self.maps[i]

    def is_zero_on_module(self) -> bool:
        M = self.resolution.module
        return all(M.element_is_zero(col) for col in self.maps[0])


def lift_endomorphism(a: Polynomial, M: FPModule, res: FreeResolution,
                      max_pairs: Optional[int] = None) -> ChainSelfMap:
    """Chain self-map lifting multiplication by the central element a."""
    P = M.ring.ambient
    a = M.ring.normal_form(a)
    cols0 = []
    for i in range(M.free_rank):
        col = [P.zero()] * M.free_rank
        col[i] = a
        cols0.append(tuple(col))
    return lift_chain_map(cols0, M, res, max_pairs=max_pairs)


def lift_chain_map(cols0: Sequence[Vector], M: FPModule, res: FreeResolution,
                   max_pairs: Optional[int] = None) -> ChainSelfMap:
    """Lift the cover endomorphism given by cols0 through the resolution."""
    ring = M.ring
    P = ring.ambient
    maps = [list(cols0)]
    for i in range(1, res.length + 1):
        d_i = res.differential(i)
        rank_prev = res.ranks[i - 1]
        solver = LiftSolver(list(d_i) + padding_vectors(ring, rank_prev), rank_prev, P,
                            max_pairs=max_pairs)
        level_cols = []
        prev = maps[i - 1]
        for col in d_i:
            target = [P.zero()] * rank_prev
            for r, c in enumerate(col):
                if c.is_zero():
                    continue
                img = prev[r]
                for t in range(rank_prev):
                    target[t] = target[t] + c * img[t]
            target = tuple(ring.normal_form(p) for p in target)
            coeffs = solver.lift(target)
            if coeffs is None:
                raise RingError("chain lift failed; resolution not exact?")
            level_cols.append(tuple(coeffs[: len(d_i)]))
        maps.append(level_cols)
    return ChainSelfMap(res, maps)


def compose_level(chain: ChainSelfMap, i: int, times: int, ring: QuotientRing) -> List[Vector]:
    """Columns of the i-th level map composed with itself `times` times."""
    base = chain.maps[i]
    rank = len(base)
    P = ring.ambient
    unit, zero = P.one(), P.zero()
    cur = [tuple(unit if r == j else zero for r in range(rank)) for j in range(rank)]
    for _ in range(times):
        nxt = []
        for col in cur:
            acc = [P.zero()] * rank
            for r, c in enumerate(col):
                if c.is_zero():
                    continue
                for t in range(rank):
                    acc[t] = acc[t] + c * base[r][t]
            nxt.append(tuple(ring.normal_form(p) for p in acc))
        cur = nxt
    return cur


def induced_images(ext: ExtPresentation, level_cols: Sequence[Vector],
                   scale: Optional[Polynomial] = None) -> List[Vector]:
    """Images of the Ext model's cocycle generators under composition with the
    level-n chain map (optionally scaled by a ring element)."""
    ring = ext.source.ring
    P = ring.ambient
    h = ext.target.free_rank
    b_n = ext.resolution.ranks[ext.degree]
    out = []
    for phi in ext.kernel_gens:
        img = [P.zero()] * ext.flat_rank
        for j in range(b_n):
            col = level_cols[j]
            for r, c in enumerate(col):
                if c.is_zero():
                    continue
                for k in range(h):
                    img[j * h + k] = img[j * h + k] + c * phi[r * h + k]
        if scale is not None:
            img = [scale * p for p in img]
        out.append(tuple(ring.normal_form(p) for p in img))
    return out


def induced_is_zero(ext: ExtPresentation, level_cols: Sequence[Vector],
                    scale: Optional[Polynomial] = None) -> bool:
    if ext.flat_rank == 0:
        return True
    return all(ext.element_dies(img) for img in induced_images(ext, level_cols, scale))


# -- the splitting sequence of the degree-one annihilation remark ---------------


def verify_splitting_sequence(M: FPModule, a: Polynomial,
                              max_pairs: Optional[int] = None) -> VerificationReport:
    """Build and verify 0 -> (0:_M a) -> M + Omega M -> Omega(M/aM) -> 0.

    Requires a to annihilate Ext^1(M, Omega M); Omega(M/aM) is taken for the
    cover induced from M's cover.
    """
    report = VerificationReport("splitting-sequence")
    ring = M.ring
    P = ring.ambient
    a = ring.normal_form(a)
    res = resolve(M, 2, max_pairs=max_pairs)
    omega = res.omega(1)
    u_cols = res.differential(1)
    ext1 = ext_module(M, omega, 1, resolution=res, max_pairs=max_pairs)
    hyp = ext1.annihilator.contains(a)
    report.add("hypothesis-a-kills-ext1", hyp,
               "a annihilates Ext^1(M, Omega M)" if hyp else "hypothesis fails")
    if not hyp:
        return report

    g = M.free_rank
    rels = list(M.relations)
    sigma_cols = _solve_sigma(ring, g, rels, u_cols, a, max_pairs=max_pairs)
    report.add("sigma-lift", sigma_cols is not None,
               "found sigma with cover . sigma = a . id")
    if sigma_cols is None:
        return report

    eq = elem_quotient(M, a, max_pairs=max_pairs)
    kernel, kappa = eq.kernel, eq.kernel_embedding

    # middle term M + Omega M, block presentation
    mid_rank = g + omega.free_rank
    zero = P.zero()
    mid_rels = [tuple(list(col) + [zero] * omega.free_rank) for col in M.relations]
    mid_rels += [tuple([zero] * g + list(col)) for col in omega.relations]
    middle = FPModule(ring, mid_rank, mid_rels)

    # Omega(M/aM) w.r.t. the induced cover: generated by U-gens and a*e_i
    aunits = []
    for i in range(g):
        col = [zero] * g
        col[i] = a
        aunits.append(tuple(col))
    uprime = list(u_cols) + aunits
    omega_quot = FPModule(ring, len(uprime), syzygy_vectors(ring, g, uprime,
                                                            max_pairs=max_pairs))

    omega_solver = LiftSolver(list(u_cols) + padding_vectors(ring, g), g, P,
                              max_pairs=max_pairs)
    uprime_solver = LiftSolver(uprime + padding_vectors(ring, g), g, P,
                               max_pairs=max_pairs)

    # iota: kernel -> middle, m |-> (m, -sigma(m))
    iota_cols = []
    ok = True
    for kap in kappa:
        sk = _apply_columns(ring, sigma_cols, kap)
        coeffs = omega_solver.lift(sk)
        if coeffs is None:
            ok = False
            break
        col = list(kap) + [-c for c in coeffs[: len(u_cols)]]
        iota_cols.append(tuple(col))
    report.add("iota-construction", ok, "sigma images of the kernel lie in Omega M")
    if not ok:
        return report

    # phi: middle -> Omega(M/aM): e_i |-> sigma(e_i), w_k |-> w_k
    phi_cols = []
    for i in range(g):
        coeffs = uprime_solver.lift(sigma_cols[i])
        if coeffs is None:
            ok = False
            break
        phi_cols.append(tuple(coeffs[: len(uprime)]))
    if ok:
        for k, w in enumerate(u_cols):
            coeffs = uprime_solver.lift(w)
            if coeffs is None:
                ok = False
                break
            phi_cols.append(tuple(coeffs[: len(uprime)]))
    report.add("phi-construction", ok, "middle generators land in Omega(M/aM)")
    if not ok:
        return report

    iota = ModuleMap(kernel, middle, iota_cols, max_pairs=max_pairs)
    phi = ModuleMap(middle, omega_quot, phi_cols, max_pairs=max_pairs)
    for name, passed in verify_short_exact(iota, phi, max_pairs=max_pairs):
        report.add(name, passed)
    report.payload["middle_rank"] = mid_rank
    report.payload["omega_quotient_generators"] = len(uprime)
    return report


def _apply_columns(ring: QuotientRing, cols: Sequence[Vector], vec: Sequence[Polynomial]) -> Vector:
    P = ring.ambient
    rank = len(cols[0]) if cols else len(vec)
    acc = [P.zero()] * rank
    for i, c in enumerate(vec):
        if c.is_zero():
            continue
        for r in range(rank):
            acc[r] = acc[r] + c * cols[i][r]
    return tuple(ring.normal_form(p) for p in acc)


def _solve_sigma(ring: QuotientRing, g: int, rels: List[Vector], u_cols: List[Vector],
                 a: Polynomial, max_pairs: Optional[int] = None) -> Optional[List[Vector]]:
    """Columns s_i = a e_i + u_i with every relation mapped to zero in R^g."""
    P = ring.ambient
    zero = P.zero()
    s = len(rels)
    if s == 0:
        out = []
        for i in range(g):
            col = [zero] * g
            col[i] = a
            out.append(tuple(col))
        return out
    w_all = list(u_cols) + padding_vectors(ring, g)
    q = len(w_all)
    flat_rank = g * s
    gens = []
    for i in range(g):
        for k in range(q):
            vec = [zero] * flat_rank
            for j, rel in enumerate(rels):
                if rel[i].is_zero():
                    continue
                w = w_all[k]
                for r in range(g):
                    if not w[r].is_zero():
                        vec[j * g + r] = vec[j * g + r] + rel[i] * w[r]
            gens.append(tuple(ring.normal_form(p) for p in vec))
    target = [zero] * flat_rank
    for j, rel in enumerate(rels):
        for r in range(g):
            target[j * g + r] = ring.normal_form(-(a * rel[r]))
    solver = LiftSolver(gens + padding_vectors(ring, flat_rank), flat_rank, P,
                        max_pairs=max_pairs)
    coeffs = solver.lift(tuple(target))
    if coeffs is None:
        return None
    out = []
    for i in range(g):
        col = [zero] * g
        col[i] = a
        for k in range(q):
            c = coeffs[i * q + k]
            if c.is_zero():
                continue
            w = w_all[k]
            col = [col[r] + c * w[r] for r in range(g)]
        out.append(tuple(ring.normal_form(p) for p in col))
    return out


# -- descent to a finite subalgebra ---------------------------------------------


def descent_check(R: QuotientRing, sub, a: Polynomial, n: int,
                  test_modules: Sequence[FPModule],
                  test_targets: Sequence[FPModule],
                  max_pairs: Optional[int] = None) -> VerificationReport:
    """Instance check of the square-times-conductor descent annihilation:
    for each sample pair, a^2 I^n kills Ext_A^{>=n} of the pushforward."""
    from . import different

    report = VerificationReport("descent")
    a = R.normal_form(a)
    fin = different.finiteness_check(R, sub, max_pairs=max_pairs)
    report.add("module-finite", fin.finite,
               "base ring is a finite module over the subalgebra" if fin.finite
               else "not module-finite")
    if not fin.finite:
        return report

    if a.is_zero():
        report.add("element-in-witnesses", True, "zero element, trivially in")
        report.add("annihilation", True, "zero acts as zero")
        return report

    for M in test_modules:
        w = ca_witness(M, n, max_pairs=max_pairs)
        if not w.ideal.contains(a):
            report.add("element-in-witnesses", False,
                       "candidate missing from a witness ideal")
            return report
    report.add("element-in-witnesses", True,
               f"candidate lies in every level-{n} witness of the samples")

    A_ring = sub.base_quotient()
    R_push = different.pushforward(FPModule.free(R, 1), R, sub, max_pairs=max_pairs)
    omega_A = fpmod.syzygy(R_push, max_pairs=max_pairs)
    ext1 = ext_module(R_push, omega_A, 1, max_pairs=max_pairs)
    I_A = ext1.annihilator
    report.payload["conductor_ideal"] = [str(g) for g in I_A.groebner_basis().elements]

    if I_A.is_unit():
        power_gens = [A_ring.ambient.one()]
    else:
        basis = list(I_A.groebner_basis().elements)
        power_gens = [_product(A_ring.ambient, combo)
                      for combo in combinations_with_replacement(basis, n)]

    all_ok = True
    for M in test_modules:
        M_A = different.pushforward(M, R, sub, max_pairs=max_pairs)
        phi0 = different.pushforward_action(a, M, R, sub, max_pairs=max_pairs)
        res_A = resolve(M_A, n + 3, max_pairs=max_pairs)
        chain = lift_chain_map(phi0, M_A, res_A, max_pairs=max_pairs)
        for N in test_targets:
            for m in range(n, n + 3):
                ext = ext_module(M_A, N, m, resolution=res_A, max_pairs=max_pairs)
                if ext.flat_rank == 0 or ext.is_zero():
                    continue
                squared = compose_level(chain, m, 2, A_ring)
                for qgen in power_gens:
                    if not induced_is_zero(ext, squared, scale=qgen):
                        all_ok = False
                        report.add(f"annihilation-deg{m}", False,
                                   "a^2 I^n failed to kill a pushforward Ext class")
                        break
                if not all_ok:
                    break
            if not all_ok:
                break
        if not all_ok:
            break
    if all_ok:
        report.add("annihilation", True,
                   f"a^2 I^{n} kills Ext^{n}..Ext^{n+2} on all sample pairs")
    return report


def _product(P, polys):
    out = P.one()
    for p in polys:
        out = out * p
    return out
