"""Rings of torus-manifold bundles over a base with a presented cohomology or K-ring.

Bundle elements are polynomials over the fiber variables (``x1..xd``,
``y1..yd`` or ``x_F``) together with the base ring's non-unit basis names,
e.g. ``x1 - x2 - t``. Normal forms are maps from basis elements of the
fiber to base-ring vectors.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .baserings import BaseCohomRing, BaseKRing, split_base
from .charpair import CharacteristicPair, GeneralFacePoset, Q_ID
from .exactalg import IntPoly, LatticeQuotient, LaurentPoly
from .facering import (
    RankMismatch,
    TorsionDetected,
    face_monomials,
    graded_rank_and_basis,
    is_face_monomial,
    linear_form,
    min_nonfaces,
    squarefree,
    standard_basis,
    sym_decompose,
)
from .kfacering import (
    TruncatedKRing,
    character_relation_y,
    default_rt_basis,
    RTBasis,
    sr_relation_y,
)
from .presentation import Presentation


class FuelExhausted(RuntimeError):
    pass


DEGREE_NOTE = (
    "degrees follow deg x_F = 2*codim(F), the only assignment making relation (i) homogeneous; "
    "with it the vertex generators sit in degree 2n and the facet generators in degree 2"
)


def fuel(pair_n: int, base) -> int:
    env = os.environ.get("TORMAN_FUEL")
    if env:
        return int(env)
    return base.nil * (2 * pair_n + 1)


@dataclass
class BundleNormalForm:
    """``sum_k coefficients[b_k] * b_k`` with base-ring vector coefficients."""

    basis: tuple
    coefficients: dict
    base: object = field(repr=False)
    fiber_vars: tuple = ()

    def __post_init__(self):
        if set(self.coefficients) != set(self.basis):
            raise ValueError("normal form must list exactly the basis elements")

    def __eq__(self, other):
        return isinstance(other, BundleNormalForm) and self.basis == other.basis and self.coefficients == other.coefficients

    def is_zero(self) -> bool:
        return not any(any(v) for v in self.coefficients.values())

    def __add__(self, other):
        return BundleNormalForm(self.basis, {b: self.base.add(self.coefficients[b], other.coefficients[b]) for b in self.basis}, self.base, self.fiber_vars)

    def __sub__(self, other):
        return BundleNormalForm(self.basis, {b: self.base.sub(self.coefficients[b], other.coefficients[b]) for b in self.basis}, self.base, self.fiber_vars)

    def scale(self, beta_vec):
        return BundleNormalForm(self.basis, {b: self.base.mul(beta_vec, v) for b, v in self.coefficients.items()}, self.base, self.fiber_vars)

    def label(self, b) -> str:
        p = _as_poly(b, self.fiber_vars)
        return str(p) if len(p) == 1 else f"({p})"

    def to_poly(self, fiber_vars: Sequence[str] | None = None) -> LaurentPoly:
        fiber_vars = tuple(fiber_vars or self.fiber_vars)
        allv = fiber_vars + self.base.variables
        out = LaurentPoly.zero(allv)
        for b, v in self.coefficients.items():
            out = out + self.base.to_poly(v, allv) * _as_poly(b, fiber_vars).embed(allv)
        return out

    def to_json(self) -> dict:
        return {
            "basis_names": list(self.base.names),
            "terms": [{"basis": self.label(b), "coefficient": list(v)} for b, v in self.coefficients.items()],
        }

    def __str__(self):
        parts = []
        for b in self.basis:
            v = self.coefficients[b]
            if any(v):
                parts.append(f"({self.base.format(v)})*{self.label(b)}")
        return " + ".join(parts) if parts else "0"


def _as_poly(b, fiber_vars) -> LaurentPoly:
    if isinstance(b, LaurentPoly):
        return b.embed(tuple(fiber_vars))
    return IntPoly.monomial(b, tuple(fiber_vars))


# ---------------------------------------------------------------------------
# Cohomology: R(B, (Q, Lambda))
# ---------------------------------------------------------------------------


def build_R(pair: CharacteristicPair, base: BaseCohomRing) -> Presentation:
    allv = pair.x_names + base.variables
    rels = [("i", squarefree(pair, s).embed(allv)) for s in min_nonfaces(pair)]
    for u in standard_basis(pair.n):
        rel = linear_form(pair, u).embed(allv) - base.to_poly(base.char_class(u), allv)
        if rel:
            rels.append(("ii", rel))
    coeff = "Z" if base.rank == 1 else "H*(B)"
    return Presentation(f"R(B, (Q, Lambda)) over base of rank {base.rank}", pair.x_names, rels,
                        coefficients=coeff, base_variables=base.variables)


def _eval_sym(pair, base, c: LaurentPoly):
    """Evaluate a Sym(M) polynomial at ``t_j -> c_1(xi_{e_j})``."""
    gens = [base.char_class(u) for u in standard_basis(pair.n)]
    out = base.zero()
    for e, k in c.terms.items():
        if sum(e) >= base.nil:
            continue
        v = base.scale(k, base.unit())
        for g, a in zip(gens, e):
            if a:
                v = base.mul(v, base.power(g, a))
        out = base.add(out, v)
    return out


def _basis_key(pair, basis):
    if basis is None:
        return tuple(graded_rank_and_basis(pair).monomials)
    out = []
    for b in basis:
        if isinstance(b, LaurentPoly):
            if not b.is_monomial():
                raise ValueError(f"basis element {b} is not a monomial")
            (e,) = b.embed(pair.x_names).terms
            out.append(e)
        else:
            out.append(tuple(b))
    return tuple(out)


def reduce_R(pair: CharacteristicPair, base: BaseCohomRing, elem: LaurentPoly, basis=None) -> BundleNormalForm:
    """Normal form of ``elem`` over the basis monomials of the fiber face ring.

    Each base component is decomposed over Sym(M) in the face ring and the
    Sym(M)-coefficients are then evaluated in the base. Fiber components of
    x-degree at least ``n + nil(B)`` have coefficients of degree at least
    ``nil(B)`` and vanish.
    """
    keys = _basis_key(pair, basis)
    cap = pair.n + base.nil
    limit = fuel(pair.n, base)
    out = {b: base.zero() for b in keys}
    for beta, p in split_base(elem, base, pair.x_names).items():
        p = p.to_intpoly()
        ev = base.basis(beta)
        for D, comp in p.homogeneous_components().items():
            if D >= cap:
                continue
            if D > limit:
                raise FuelExhausted(f"degree {D} exceeds fuel {limit}")
            for b, c in sym_decompose(pair, comp, keys).items():
                out[b] = base.add(out[b], base.mul(ev, _eval_sym(pair, base, c)))
    return BundleNormalForm(keys, out, base, pair.x_names)


def multiply_R(pair: CharacteristicPair, base: BaseCohomRing, nf1: BundleNormalForm, nf2: BundleNormalForm) -> BundleNormalForm:
    p = nf1.to_poly() * nf2.to_poly()
    return reduce_R(pair, base, p, basis=nf1.basis)


@dataclass
class RankReport:
    rank: int
    expected: int
    graded_ranks: dict
    torsion: tuple = ()

    @property
    def ok(self) -> bool:
        return self.rank == self.expected and not self.torsion

    def to_json(self) -> dict:
        return {"rank": self.rank, "expected": self.expected, "ok": self.ok,
                "graded_ranks": {str(k): v for k, v in self.graded_ranks.items()}, "torsion": list(self.torsion)}

    def __str__(self):
        return f"Z-rank {self.rank} (expected {self.expected}){'' if not self.torsion else f', torsion {list(self.torsion)}'}"


@lru_cache(maxsize=256)
def _graded_total_ring(pair, base, D):
    """Degree-D piece of ``H*(B)[x]/I`` as a lattice quotient (deg x_i = 2)."""
    keys, rels = [], []
    for beta in range(base.rank):
        rest = D - base.degrees[beta]
        if rest >= 0 and rest % 2 == 0:
            keys += [(m, beta) for m in face_monomials(pair, rest // 2)]
    for gamma in range(base.rank):
        rest = D - 2 - base.degrees[gamma]
        if rest < 0 or rest % 2:
            continue
        eg = base.basis(gamma)
        for mu in face_monomials(pair, rest // 2):
            for u in standard_basis(pair.n):
                row: dict = {}
                for e, c in linear_form(pair, u).terms.items():
                    m2 = tuple(a + b for a, b in zip(e, mu))
                    if is_face_monomial(pair, m2):
                        row[(m2, gamma)] = row.get((m2, gamma), 0) + c
                for beta, c in enumerate(base.mul(base.char_class(u), eg)):
                    if c:
                        row[(mu, beta)] = row.get((mu, beta), 0) - c
                rels.append(row)
    return LatticeQuotient(keys, rels)


def graded_coordinates_R(pair: CharacteristicPair, base: BaseCohomRing, elem: LaurentPoly) -> dict:
    """Coordinates of ``elem`` from the graded presentation, independent of the Sym(M) route."""
    out = {}
    by_deg: dict[int, dict] = {}
    for beta, p in split_base(elem, base, pair.x_names).items():
        for e, c in p.to_intpoly().terms.items():
            if is_face_monomial(pair, e):
                D = 2 * sum(e) + base.degrees[beta]
                by_deg.setdefault(D, {})[(e, beta)] = c
    for D, vec in sorted(by_deg.items()):
        for k, c in _graded_total_ring(pair, base, D).reduce(vec).items():
            if c:
                out[(D, k)] = c
    return out


def verify_rank_R(pair: CharacteristicPair, base: BaseCohomRing) -> RankReport:
    """Z-rank of ``H*(B)[x]/I`` from its graded pieces; raises RankMismatch unless it is ``rank(B) * m``."""
    m = len(pair.vertices)
    top = 2 * pair.n + base.top_degree
    graded, torsion = {}, []
    for D in range(top + 3):
        q = _graded_total_ring(pair, base, D)
        graded[D] = q.rank
        torsion += [t for t in q.torsion]
    if any(graded[D] for D in range(top + 1, top + 3)):
        raise RankMismatch("ring does not vanish above the expected top degree")
    rep = RankReport(sum(graded.values()), base.rank * m, {k: v for k, v in graded.items() if k <= top}, tuple(torsion))
    if not rep.ok:
        raise RankMismatch(str(rep))
    return rep


# ---------------------------------------------------------------------------
# K-theory: the ring over K*(B)
# ---------------------------------------------------------------------------


def build_RK(pair: CharacteristicPair, base: BaseKRing) -> Presentation:
    allv = pair.y_names + base.variables
    rels = [("i", sr_relation_y(pair, s, allv)) for s in min_nonfaces(pair)]
    for u in standard_basis(pair.n):
        rel = character_relation_y(pair, u, base.to_poly(base.xi(u), allv), allv)
        if rel:
            rels.append(("ii", rel))
    coeff = "Z" if base.rank == 1 else "K*(B)"
    return Presentation(f"K-ring of the bundle over base of rank {base.rank}", pair.y_names, rels,
                        coefficients=coeff, laurent=True, base_variables=base.variables)


def _eval_rt(pair, base, c: LaurentPoly):
    out = base.zero()
    for u, k in c.terms.items():
        out = base.add(out, base.scale(k, base.xi(u)))
    return out


def reduce_RK(pair: CharacteristicPair, base: BaseKRing, elem: LaurentPoly, basis=None) -> BundleNormalForm:
    """Normal form over an RT-basis of the K-theoretic face ring.

    RT-coefficients are pushed into the base by ``chi^u -> [xi_u]``.
    """
    B = default_rt_basis(pair) if basis is None else RTBasis(pair, basis)
    keys = tuple(B.elements)
    out = {b: base.zero() for b in keys}
    for beta, p in split_base(elem, base, pair.y_names).items():
        ev = base.basis(beta)
        for b, c in B.decompose(p).items():
            out[b] = base.add(out[b], base.mul(ev, _eval_rt(pair, base, c)))
    return BundleNormalForm(keys, out, base, pair.y_names)


def verify_rank_RK(pair: CharacteristicPair, base: BaseKRing) -> RankReport:
    """Z-rank of the bundle K-ring via an x-adically truncated presentation."""
    T = TruncatedKRing(pair, base)
    rep = RankReport(T.rank, base.rank * len(pair.vertices), {"N": T.N}, T.torsion)
    if not rep.ok:
        raise RankMismatch(str(rep))
    return rep


# ---------------------------------------------------------------------------
# Face-acyclic orbit spaces
# ---------------------------------------------------------------------------


class FaceAcyclicRing:
    """The ring on generators ``x_F`` (one per proper face, ``x_Q = 1``) over H*(B).

    Relations (i) ``x_G x_H - x_{G v H} * sum_{E in G & H} x_E`` for
    incomparable faces and (ii) ``sum_i <u, v_i> x_{Q_i} - c_1(xi_u)``.
    Everything is graded with ``deg x_F = 2 codim F``, so each degree is a
    finite lattice quotient.
    """

    def __init__(self, poset: GeneralFacePoset, base: BaseCohomRing):
        self.poset = poset
        self.base = base
        self.face_ids = tuple(f.id for f in poset.faces)
        self.generators = tuple(poset.x_name(f) for f in self.face_ids)
        self.variables = self.generators + base.variables
        self.gen_degrees = tuple(2 * poset.codim(f) for f in self.face_ids)
        self.relations = self._relations()
        self.notes = [DEGREE_NOTE]
        self._quot: dict[int, LatticeQuotient] = {}
        self.top = 2 * poset.n + max(base.degrees)
        self._check()

    def _x(self, f) -> IntPoly:
        if f == Q_ID:
            return IntPoly.one(self.variables)
        return IntPoly.var(self.poset.x_name(f), self.variables)

    def _relations(self):
        P = self.poset
        rels = []
        for g, h in itertools.combinations(self.face_ids, 2):
            if P.leq(g, h) or P.leq(h, g):
                continue
            s = IntPoly.zero(self.variables)
            for e in P.meet_components(g, h):
                s = s + self._x(e)
            rel = self._x(g) * self._x(h) - self._x(P.join(g, h)) * s
            if rel:
                rels.append(("i", rel))
        for u in standard_basis(P.n):
            rel = IntPoly.zero(self.variables)
            for f in P.facets:
                a = sum(x * y for x, y in zip(u, P.lam[f]))
                if a:
                    rel = rel + self._x(f) * IntPoly.constant(a, self.variables)
            rel = rel - self.base.to_poly(self.base.char_class(u), self.variables)
            if rel:
                rels.append(("ii", rel))
        return rels

    def presentation(self) -> Presentation:
        coeff = "Z" if self.base.rank == 1 else "H*(B)"
        return Presentation("ring of the bundle over a face-acyclic orbit space", self.generators, list(self.relations),
                            coefficients=coeff, base_variables=self.base.variables, notes=list(self.notes),
                            extras={"degrees": dict(zip(self.generators, self.gen_degrees))})

    # grading -----------------------------------------------------------

    def _split(self, p: LaurentPoly) -> dict:
        """``{(fiber exponent, beta): coeff}`` for a polynomial over ``self.variables``."""
        p = p.embed(self.variables).to_intpoly()
        fiber = split_base(p, self.base, self.generators)
        out: dict = {}
        for beta, q in fiber.items():
            for e, c in q.terms.items():
                out[(e, beta)] = out.get((e, beta), 0) + c
        return out

    def _deg(self, key) -> int:
        e, beta = key
        return sum(a * d for a, d in zip(e, self.gen_degrees)) + self.base.degrees[beta]

    def _monomials(self, D: int):
        """Fiber exponents of weighted degree D."""
        gens = list(self.gen_degrees)
        out = []

        def rec(i, left, acc):
            if i == len(gens):
                if left == 0:
                    out.append(tuple(acc))
                return
            for k in range(left // gens[i] + 1):
                rec(i + 1, left - k * gens[i], acc + [k])

        if D >= 0:
            rec(0, D, [])
        return out

    def quotient(self, D: int) -> LatticeQuotient:
        if D in self._quot:
            return self._quot[D]
        keys = [(e, beta) for beta in range(self.base.rank) for e in self._monomials(D - self.base.degrees[beta])]
        # prefer low-codimension monomials as basis: pivot on the rest first
        keys.sort(key=lambda k: (max((self.gen_degrees[i] for i, a in enumerate(k[0]) if a), default=0), k[0], -k[1]), reverse=True)
        rels = []
        rel_parts = [(self._split(r), r) for _, r in self.relations]
        for parts, _ in rel_parts:
            degs = {self._deg(k) for k in parts}
            if len(degs) != 1:
                raise ValueError("relation is not homogeneous under deg x_F = 2 codim F")
            dr = degs.pop()
            for gamma in range(self.base.rank):
                for mu in self._monomials(D - dr - self.base.degrees[gamma]):
                    row: dict = {}
                    for (e, beta), c in parts.items():
                        m2 = tuple(a + b for a, b in zip(e, mu))
                        for b2, k in enumerate(self.base.mul(self.base.basis(beta), self.base.basis(gamma))):
                            if k:
                                row[(m2, b2)] = row.get((m2, b2), 0) + c * k
                    rels.append(row)
        q = LatticeQuotient(keys, rels)
        self._quot[D] = q
        return q

    def _check(self):
        width = max(self.gen_degrees + tuple(self.base.degrees))
        for D in range(self.top + 1, self.top + width + 1):
            if self.quotient(D).rank or self.quotient(D).torsion:
                raise RankMismatch(f"ring does not vanish in degree {D}")
        torsion = [t for D in range(self.top + 1) for t in self.quotient(D).torsion]
        if torsion:
            raise TorsionDetected(f"torsion {torsion}")
        m = len(self.poset.vertices)
        if self.total_rank != self.base.rank * m:
            raise RankMismatch(f"Z-rank {self.total_rank}, expected {self.base.rank * m}")

    @property
    def graded_ranks(self) -> list[int]:
        return [self.quotient(D).rank for D in range(self.top + 1)]

    @property
    def total_rank(self) -> int:
        return sum(self.graded_ranks)

    def reduce(self, p: LaurentPoly) -> dict:
        """Coordinates ``{(degree, basis key): coeff}`` of ``p`` in the graded Z-basis."""
        by_deg: dict[int, dict] = {}
        for k, c in self._split(p).items():
            by_deg.setdefault(self._deg(k), {})[k] = c
        out = {}
        for D, vec in sorted(by_deg.items()):
            if D > self.top:
                continue
            for k, c in self.quotient(D).reduce(vec).items():
                if c:
                    out[(D, k)] = c
        return out

    def key_poly(self, key) -> LaurentPoly:
        e, beta = key
        return IntPoly.monomial(e, self.generators).embed(self.variables) * self.base.to_poly(self.base.basis(beta), self.variables)

    def basis(self) -> list:
        return [(D, k) for D in range(self.top + 1) for k in self.quotient(D).basis]


def face_acyclic_ring(poset: GeneralFacePoset, base: BaseCohomRing) -> FaceAcyclicRing:
    return FaceAcyclicRing(poset, base)


def pair_to_poset_poly(pair: CharacteristicPair, poset: GeneralFacePoset, p: LaurentPoly, base) -> LaurentPoly:
    """``x_i -> x_{Q_i}`` for a poset built by ``GeneralFacePoset.from_pair``."""
    target = tuple(poset.x_name(f.id) for f in poset.faces) + base.variables
    images = {x: IntPoly.var(poset.x_name(f"F{i}"), target) for i, x in enumerate(pair.x_names, start=1)}
    images.update({v: IntPoly.var(v, target) for v in base.variables})
    return p.embed(pair.x_names + base.variables).substitute(images, target)


def emit_conjecture_SJ(poset: GeneralFacePoset, base: BaseKRing) -> Presentation:
    """The conjectural K-ring presentation on generators ``x_F`` (emitted, not computed)."""
    P = poset
    gens = tuple(P.x_name(f.id) for f in P.faces)
    variables = gens + base.variables
    x = {f.id: IntPoly.var(P.x_name(f.id), variables) for f in P.faces}
    x[Q_ID] = IntPoly.one(variables)
    rels = []
    ids = [f.id for f in P.faces]
    for g, h in itertools.combinations(ids, 2):
        if P.leq(g, h) or P.leq(h, g):
            continue
        s = IntPoly.zero(variables)
        for e in P.meet_components(g, h):
            s = s + x[e]
        rel = x[g] * x[h] - x[P.join(g, h)] * s
        if rel:
            rels.append(("i", rel))
    one = IntPoly.one(variables)
    for u in standard_basis(P.n):
        pos, neg = one, one
        for f in P.facets:
            a = sum(p * q for p, q in zip(u, P.lam[f]))
            if a > 0:
                pos = pos * (one - x[f]) ** a
            elif a < 0:
                neg = neg * (one - x[f]) ** (-a)
        rel = pos - base.to_poly(base.xi(u), variables) * neg
        if rel:
            rels.append(("ii", rel))
    return Presentation("CONJECTURAL K-ring of the bundle over a face-acyclic orbit space", gens, rels,
                        coefficients="Z" if base.rank == 1 else "K*(B)", base_variables=base.variables,
                        notes=["CONJECTURAL: emitted presentation only; no normal forms or rank claims are made"],
                        extras={"status": "CONJECTURAL"})
