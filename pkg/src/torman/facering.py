"""The face ring Z[Q] and the cohomology ring H*(X) it presents.

Monomials are exponent tuples of length ``d`` in the facet variables
``x1..xd``. A monomial is nonzero in Z[Q] exactly when its support is a
simplex of the nerve; every computation prunes the other monomials first.

Graded pieces of H*(X) are lattice quotients: degree-k face monomials
modulo the products ``l_u * mu`` of the linear forms with degree-(k-1)
face monomials. Cohomological degree is twice the polynomial degree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .charpair import CharacteristicPair, Face, dual_vectors
from .exactalg import IntMatrix, IntPoly, LaurentPoly, LatticeQuotient, snf
from .presentation import Presentation

Monomial = tuple[int, ...]


class TorsionDetected(ArithmeticError):
    """A graded piece has torsion, which a valid pair never produces."""


class RankMismatch(ArithmeticError):
    pass


class DecompositionFailed(ArithmeticError):
    """The chosen monomials do not form a free basis over Sym(M)."""


def min_nonfaces(pair: CharacteristicPair) -> list[Face]:
    """Minimal subsets of ``1..d`` that are not simplices of the nerve."""
    out = []
    for k in range(1, pair.d + 1):
        for s in itertools.combinations(range(1, pair.d + 1), k):
            if pair.is_face(s):
                continue
            if all(pair.is_face(t) for t in itertools.combinations(s, k - 1)):
                out.append(s)
    return out


def squarefree(pair: CharacteristicPair, s: Sequence[int], names=None) -> IntPoly:
    names = names or pair.x_names
    e = [0] * pair.d
    for i in s:
        e[i - 1] = 1
    return IntPoly.monomial(e, names)


def linear_form(pair: CharacteristicPair, u: Sequence[int]) -> IntPoly:
    """``sum_i <u, v_i> x_i``."""
    terms = {}
    for i in range(1, pair.d + 1):
        c = pair.pairing(u, i)
        if c:
            e = [0] * pair.d
            e[i - 1] = 1
            terms[tuple(e)] = c
    return IntPoly(pair.x_names, terms)


def standard_basis(n: int) -> list[tuple[int, ...]]:
    return [tuple(int(i == j) for i in range(n)) for j in range(n)]


def cohomology_presentation(pair: CharacteristicPair) -> Presentation:
    rels = [("i", squarefree(pair, s)) for s in min_nonfaces(pair)]
    rels += [("ii", linear_form(pair, u)) for u in standard_basis(pair.n)]
    return Presentation(title=f"H*(X) for {pair.d} facets, n={pair.n}", generators=pair.x_names, relations=rels)


def is_face_monomial(pair: CharacteristicPair, e: Monomial) -> bool:
    return pair.is_face(i + 1 for i, x in enumerate(e) if x)


def prune(pair: CharacteristicPair, p: LaurentPoly) -> IntPoly:
    """Drop monomials supported on non-faces (they vanish in Z[Q])."""
    return IntPoly(p.variables, {e: c for e, c in p.terms.items() if is_face_monomial(pair, e)})


def _compositions(total: int, parts: int):
    """Tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for cut in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cut + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def _weak_compositions(total: int, parts: int):
    for c in _compositions(total + parts, parts):
        yield tuple(x - 1 for x in c)


def face_monomials(pair: CharacteristicPair, k: int) -> list[Monomial]:
    """Degree-k monomials supported on faces, in descending lex order."""
    out = []
    for s in pair.simplices:
        if (k == 0) != (len(s) == 0) or len(s) > k:
            continue
        for comp in _compositions(k, len(s)):
            e = [0] * pair.d
            for i, x in zip(s, comp):
                e[i - 1] = x
            out.append(tuple(e))
    return sorted(out, reverse=True)


def _mul_terms(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


@dataclass
class GradedBasis:
    """Monomial Z-basis of H*(X), keyed by cohomological degree."""

    pieces: dict[int, tuple[Monomial, ...]]
    divisors: dict[int, tuple[int, ...]]
    variables: tuple[str, ...]

    @property
    def monomials(self) -> list[Monomial]:
        return [m for deg in sorted(self.pieces) for m in self.pieces[deg]]

    @property
    def ranks(self) -> list[int]:
        top = max(self.pieces, default=0)
        return [len(self.pieces.get(k, ())) for k in range(top + 1)]

    @property
    def total(self) -> int:
        return sum(len(v) for v in self.pieces.values())

    def degree_of(self, m: Monomial) -> int:
        return 2 * sum(m)

    def as_polys(self) -> list[IntPoly]:
        return [IntPoly.monomial(m, self.variables) for m in self.monomials]

    def to_json(self) -> dict:
        return {
            "ranks": self.ranks,
            "basis": {str(k): [str(IntPoly.monomial(m, self.variables)) for m in v] for k, v in sorted(self.pieces.items())},
            "elementary_divisors": {str(k): list(v) for k, v in sorted(self.divisors.items())},
        }


class FaceRing:
    """Cached linear algebra for one characteristic pair."""

    def __init__(self, pair: CharacteristicPair):
        self.pair = pair
        self.lin = [linear_form(pair, u).terms for u in standard_basis(pair.n)]
        self._quot: dict[int, LatticeQuotient] = {}
        self._sym: dict[tuple, tuple] = {}
        self._lpow: dict[tuple, dict] = {}

    def quotient(self, k: int) -> LatticeQuotient:
        """Degree-k piece (polynomial degree) of H*(X) as a lattice quotient."""
        if k not in self._quot:
            keys = face_monomials(self.pair, k)
            keyset = set(keys)
            rels = []
            if k >= 1:
                for mu in face_monomials(self.pair, k - 1):
                    for form in self.lin:
                        r = _mul_terms(form, {mu: 1})
                        rels.append({e: c for e, c in r.items() if e in keyset})
            self._quot[k] = LatticeQuotient(keys, rels)
        return self._quot[k]

    def graded_basis(self, max_degree: int | None = None) -> GradedBasis:
        pair = self.pair
        if max_degree is None:
            max_degree = 2 * pair.n
        if max_degree < 2 * pair.n:
            raise ValueError(f"max_degree must be at least 2n = {2 * pair.n}")
        pieces, divisors = {}, {}
        for k in range(max_degree // 2 + 1):
            q = self.quotient(k)
            divisors[2 * k] = q.divisors
            if q.torsion:
                raise TorsionDetected(f"H^{2 * k} has elementary divisors {q.torsion}")
            if k > pair.n and q.rank:
                raise RankMismatch(f"H^{2 * k} has rank {q.rank} above the top degree {2 * pair.n}")
            pieces[2 * k] = tuple(q.basis)
        total = sum(len(v) for v in pieces.values())
        m = len(pair.vertices)
        if total != m:
            raise RankMismatch(f"total rank {total} differs from the vertex count {m}")
        for k in range(1, max_degree + 1, 2):
            pieces.setdefault(k, ())
        return GradedBasis(dict(sorted(pieces.items())), divisors, pair.x_names)

    # normal forms -----------------------------------------------------
    def reduce(self, poly: LaurentPoly) -> dict[Monomial, int]:
        if poly.variables != self.pair.x_names:
            poly = poly.embed(self.pair.x_names)
        out: dict = {}
        for k, comp in prune(self.pair, poly).homogeneous_components().items():
            out.update(self.quotient(k).reduce(comp.terms))
        return out

    # Sym(M)-module structure -----------------------------------------
    def _lpower(self, alpha: tuple[int, ...]) -> dict:
        if alpha not in self._lpow:
            if sum(alpha) == 0:
                self._lpow[alpha] = {(0,) * self.pair.d: 1}
            else:
                j = next(i for i, a in enumerate(alpha) if a)
                rest = list(alpha)
                rest[j] -= 1
                prod = _mul_terms(self._lpower(tuple(rest)), self.lin[j])
                self._lpow[alpha] = {e: c for e, c in prod.items() if is_face_monomial(self.pair, e)}
        return self._lpow[alpha]

    def sym_system(self, D: int, basis: tuple[Monomial, ...]):
        """Inverse of the degree-D matrix with columns ``l^alpha * b``."""
        key = (D, basis)
        if key not in self._sym:
            rows = face_monomials(self.pair, D)
            rindex = {e: i for i, e in enumerate(rows)}
            cols = []
            for b in basis:
                db = sum(b)
                if db > D:
                    continue
                for alpha in _weak_compositions(D - db, self.pair.n):
                    cols.append((alpha, b))
            if len(cols) != len(rows):
                raise DecompositionFailed(
                    f"degree {2 * D}: {len(cols)} module generators for {len(rows)} face monomials"
                )
            entries = {}
            for j, (alpha, b) in enumerate(cols):
                for e, c in _mul_terms(self._lpower(alpha), {b: 1}).items():
                    if e in rindex:
                        entries[(rindex[e], j)] = c
            A = IntMatrix(len(rows), len(cols), entries)
            res = snf(A)
            if any(d != 1 for d in res.diag):
                raise DecompositionFailed(f"degree {2 * D}: basis is not free over Sym(M) (divisors {res.diag})")
            inv = res.right @ res.left
            self._sym[key] = (rindex, cols, inv)
        return self._sym[key]

    def sym_decompose(self, poly: LaurentPoly, basis: Sequence[Monomial]) -> dict[Monomial, IntPoly]:
        pair = self.pair
        if poly.variables != pair.x_names:
            poly = poly.embed(pair.x_names)
        basis = tuple(basis)
        coeffs: dict[Monomial, dict] = {b: {} for b in basis}
        for D, comp in prune(pair, poly).homogeneous_components().items():
            rindex, cols, inv = self.sym_system(D, basis)
            vec = [0] * len(rindex)
            for e, c in comp.terms.items():
                vec[rindex[e]] = c
            sol = inv.apply(vec)
            for (alpha, b), c in zip(cols, sol):
                if c:
                    coeffs[b][alpha] = coeffs[b].get(alpha, 0) + c
        return {b: IntPoly(pair.t_names, t) for b, t in coeffs.items()}


@lru_cache(maxsize=64)
def face_ring(pair: CharacteristicPair) -> FaceRing:
    return FaceRing(pair)


@lru_cache(maxsize=64)
def _default_basis(pair: CharacteristicPair) -> GradedBasis:
    return face_ring(pair).graded_basis()


def graded_rank_and_basis(pair: CharacteristicPair, max_degree: int | None = None) -> GradedBasis:
    if max_degree is None or max_degree == 2 * pair.n:
        return _default_basis(pair)
    return face_ring(pair).graded_basis(max_degree)


def reduce_H(pair: CharacteristicPair, poly: LaurentPoly) -> dict[Monomial, int]:
    """Coordinates of the class of ``poly`` in the monomial basis of H*(X)."""
    return face_ring(pair).reduce(poly)


def normal_form_poly(pair: CharacteristicPair, coords: Mapping[Monomial, int]) -> IntPoly:
    return IntPoly(pair.x_names, dict(coords))


def vertex_restrict_H(pair: CharacteristicPair, poly: LaurentPoly, a: Sequence[int]) -> IntPoly:
    """Localise at vertex ``a``: ``x_i -> u_i`` (dual basis at a) for ``i in a``, else 0."""
    u = dual_vectors(pair, a)
    tn = pair.t_names
    images = {}
    for i, name in enumerate(pair.x_names, start=1):
        if i in u:
            images[name] = IntPoly(tn, {tuple(int(j == k) for j in range(pair.n)): c for k, c in enumerate(u[i]) if c})
        else:
            images[name] = IntPoly.zero(tn)
    if poly.variables != pair.x_names:
        poly = poly.embed(pair.x_names)
    return poly.substitute(images, tn)


def _basis_monomials(pair, basis) -> tuple[Monomial, ...]:
    if basis is None:
        return tuple(graded_rank_and_basis(pair).monomials)
    if isinstance(basis, GradedBasis):
        return tuple(basis.monomials)
    out = []
    for b in basis:
        if isinstance(b, LaurentPoly):
            if not b.is_monomial() or next(iter(b.terms.values())) != 1:
                raise ValueError(f"{b} is not a monic monomial")
            out.append(next(iter(b.terms)))
        else:
            out.append(tuple(b))
    return tuple(out)


def sym_decompose(pair: CharacteristicPair, poly: LaurentPoly, basis=None) -> dict[Monomial, IntPoly]:
    """Write ``poly`` in Z[Q] as ``sum_k c_k(t) * b_k`` with ``c_k`` in Sym(M) = Z[t1..tn].

    Here ``t_j`` acts as the linear form of the j-th standard character.
    """
    return face_ring(pair).sym_decompose(poly, _basis_monomials(pair, basis))


def sym_reconstruct(pair: CharacteristicPair, coeffs: Mapping[Monomial, LaurentPoly]) -> IntPoly:
    """Inverse of :func:`sym_decompose`, pruned to face monomials."""
    lin = [linear_form(pair, u) for u in standard_basis(pair.n)]
    images = {t: lin[j] for j, t in enumerate(pair.t_names)}
    acc = IntPoly.zero(pair.x_names)
    for b, c in coeffs.items():
        acc = acc + c.substitute(images, pair.x_names) * IntPoly.monomial(b, pair.x_names)
    return prune(pair, acc)
