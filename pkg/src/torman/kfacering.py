"""The K-theoretic face ring and its vertex-restriction model.

Elements of the K-theoretic face ring are Laurent polynomials in
``y1..yd``. At a vertex ``a = {i_1 < ... < i_n}`` the ring RT_a is
Laurent in variables ``z{i}`` (``i`` in ``a``), where ``z{i}`` stands for
the character of the dual vector ``u_i``. Because the dual vectors at two
vertices agree on their common facets modulo the annihilator, restriction
to ``RT_{a v b}`` is simply "set ``z{i}`` to 1 for ``i`` outside ``a & b``".

RT itself is Laurent in ``t1..tn`` (characters of the standard basis of M).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .charpair import CharacteristicPair, Face, dual_vectors, join
from .exactalg import (
    IntPoly,
    LatticeQuotient,
    LaurentPoly,
    NotInRing,
    Singular,
    solve_over_laurent_fraction_field,
)
from .facering import (
    graded_rank_and_basis,
    face_monomials,
    is_face_monomial,
    min_nonfaces,
    standard_basis,
)
from .presentation import Presentation


class IncompatibleTuple(ValueError):
    pass


class BasisNotFree(ArithmeticError):
    pass


def z_names(a: Sequence[int]) -> tuple[str, ...]:
    return tuple(f"z{i}" for i in sorted(a))


def _one_minus(var: str, variables) -> LaurentPoly:
    return IntPoly.one(variables) - IntPoly.var(var, variables)


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------


def character_exponents(pair: CharacteristicPair, u: Sequence[int]) -> tuple[int, ...]:
    """``(<u, v_1>, ..., <u, v_d>)``."""
    return tuple(pair.pairing(u, i) for i in range(1, pair.d + 1))


def character_relation_x(pair: CharacteristicPair, u: Sequence[int], xi: LaurentPoly | None = None, variables=None) -> LaurentPoly:
    """``prod_{a_i>0} (1-x_i)^{a_i} - xi * prod_{a_j<0} (1-x_j)^{-a_j}``; ``xi`` defaults to 1."""
    variables = tuple(variables or pair.x_names)
    pos = IntPoly.one(variables)
    neg = IntPoly.one(variables)
    for i, a in enumerate(character_exponents(pair, u)):
        f = _one_minus(pair.x_names[i], variables)
        if a > 0:
            pos = pos * f**a
        elif a < 0:
            neg = neg * f ** (-a)
    if xi is None:
        xi = IntPoly.one(variables)
    return pos - xi * neg


def character_relation_y(pair: CharacteristicPair, u: Sequence[int], xi: LaurentPoly | None = None, variables=None) -> LaurentPoly:
    """``prod_i y_i^{<u, v_i>} - xi``; ``xi`` defaults to 1."""
    variables = tuple(variables or pair.y_names)
    mono = LaurentPoly.monomial(
        tuple(character_exponents(pair, u)) + (0,) * (len(variables) - pair.d), variables
    )
    if xi is None:
        xi = IntPoly.one(variables)
    return mono - xi


def sr_relation_y(pair: CharacteristicPair, s: Sequence[int], variables=None) -> LaurentPoly:
    variables = tuple(variables or pair.y_names)
    out = IntPoly.one(variables)
    for i in s:
        out = out * _one_minus(pair.y_names[i - 1], variables)
    return out


def k_presentation(pair: CharacteristicPair, variant: str = "y") -> Presentation:
    """K*(X) presented in ``x_i = 1 - [L_i]`` ("x") or ``y_i = [L_i]`` ("y")."""
    if variant == "x":
        from .facering import squarefree

        rels = [("i", squarefree(pair, s)) for s in min_nonfaces(pair)]
        rels += [("ii", character_relation_x(pair, u)) for u in standard_basis(pair.n)]
        return Presentation(f"K*(X), x-form ({pair.d} facets, n={pair.n})", pair.x_names, rels,
                            extras={"variant": "x"})
    if variant == "y":
        rels = [("i", sr_relation_y(pair, s)) for s in min_nonfaces(pair)]
        rels += [("ii", character_relation_y(pair, u)) for u in standard_basis(pair.n)]
        return Presentation(f"K*(X), Laurent y-form ({pair.d} facets, n={pair.n})", pair.y_names, rels,
                            laurent=True, extras={"variant": "y"})
    raise ValueError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# Restriction tuples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RestrictionTuple:
    values: tuple[tuple[Face, LaurentPoly], ...]

    @classmethod
    def from_dict(cls, d: Mapping[Face, LaurentPoly]) -> RestrictionTuple:
        return cls(tuple(sorted(((tuple(k), v) for k, v in d.items()), key=lambda kv: kv[0])))

    def as_dict(self) -> dict[Face, LaurentPoly]:
        return dict(self.values)

    def __getitem__(self, a) -> LaurentPoly:
        return self.as_dict()[tuple(a)]

    @property
    def vertices(self) -> list[Face]:
        return [a for a, _ in self.values]

    def _zip(self, other, op):
        d, e = self.as_dict(), other.as_dict()
        if d.keys() != e.keys():
            raise ValueError("tuples are indexed by different vertex sets")
        return RestrictionTuple.from_dict({a: op(d[a], e[a]) for a in d})

    def __add__(self, other):
        return self._zip(other, lambda p, q: p + q)

    def __sub__(self, other):
        return self._zip(other, lambda p, q: p - q)

    def __mul__(self, other):
        return self._zip(other, lambda p, q: p * q)

    def is_zero(self) -> bool:
        return all(v.is_zero() for _, v in self.values)

    def to_json(self) -> dict:
        return {"vertices": [list(a) for a, _ in self.values], "values": [v.to_json() for _, v in self.values]}

    @classmethod
    def from_json(cls, data) -> RestrictionTuple:
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_dict({tuple(a): LaurentPoly.from_json(v) for a, v in zip(data["vertices"], data["values"])})

    def __str__(self):
        return "(" + ", ".join(f"{list(a)}: {v}" for a, v in self.values) + ")"


def _y_embed(pair, p: LaurentPoly) -> LaurentPoly:
    return p if p.variables == pair.y_names else p.embed(pair.y_names)


def phi_restrict(pair: CharacteristicPair, p: LaurentPoly, a: Sequence[int]) -> LaurentPoly:
    """Image at vertex ``a``: ``y_i -> z{i}`` for ``i in a``, ``y_i -> 1`` otherwise."""
    a = tuple(sorted(a))
    zv = z_names(a)
    images = {}
    for i, name in enumerate(pair.y_names, start=1):
        images[name] = IntPoly.var(f"z{i}", zv) if i in a else IntPoly.one(zv)
    return _y_embed(pair, p).substitute(images, zv)


def phi(pair: CharacteristicPair, p: LaurentPoly) -> RestrictionTuple:
    return RestrictionTuple.from_dict({a: phi_restrict(pair, p, a) for a in pair.vertices})


def restrict_to_join(r: LaurentPoly, a: Sequence[int], b: Sequence[int]) -> LaurentPoly:
    """Project an element of RT_a to RT_{a v b}; the augmentation when ``a v b = Q``."""
    common = join(a, b)
    target = z_names(common)
    images = {v: (IntPoly.var(v, target) if int(v[1:]) in common else IntPoly.one(target)) for v in r.variables}
    return r.substitute(images, target)


@dataclass
class CompatibilityReport:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def check_compatibility(pair: CharacteristicPair, t: RestrictionTuple) -> CompatibilityReport:
    d = t.as_dict()
    if set(d) != set(pair.vertices):
        raise ValueError("tuple is not indexed by the vertices of the pair")
    for a, b in itertools.combinations(pair.vertices, 2):
        ra, rb = restrict_to_join(d[a], a, b), restrict_to_join(d[b], b, a)
        if ra != rb:
            return CompatibilityReport(False, (a, b, ra, rb))
    return CompatibilityReport(True)


def interpolate(pair: CharacteristicPair, t: RestrictionTuple) -> LaurentPoly:
    """A Laurent polynomial in ``y`` whose restriction tuple is ``t``.

    Sweeps the vertices in lexicographic order. At each vertex the residual
    value is lifted by ``z{i} -> y_i`` and subtracted; compatibility keeps
    earlier vertices at zero, which is checked as we go.
    """
    residual = t.as_dict()
    if set(residual) != set(pair.vertices):
        raise ValueError("tuple is not indexed by the vertices of the pair")
    out = LaurentPoly.zero(pair.y_names)
    done: list[Face] = []
    for a in pair.vertices:
        val = residual[a]
        if not val.is_zero():
            lift = val.substitute({f"z{i}": IntPoly.var(f"y{i}", pair.y_names) for i in a}, pair.y_names)
            out = out + lift
            for b in pair.vertices:
                residual[b] = residual[b] - phi_restrict(pair, lift, b)
        done.append(a)
        for b in done:
            if not residual[b].is_zero():
                raise IncompatibleTuple(f"residual at vertex {list(b)} is {residual[b]} after processing {list(a)}")
    return out


# ---------------------------------------------------------------------------
# RT-algebra structure
# ---------------------------------------------------------------------------


def _t_embed(pair, r: LaurentPoly) -> LaurentPoly:
    return r if r.variables == pair.t_names else r.embed(pair.t_names)


def iota(pair: CharacteristicPair, r: LaurentPoly) -> LaurentPoly:
    """``chi^u -> prod_i y_i^{<u, v_i>}``."""
    r = _t_embed(pair, r)
    terms: dict = {}
    for u, c in r.terms.items():
        e = character_exponents(pair, u)
        terms[e] = terms.get(e, 0) + c
    return LaurentPoly(pair.y_names, terms)


def zeta_at_vertex(pair: CharacteristicPair, r: LaurentPoly, a: Sequence[int]) -> LaurentPoly:
    """``chi^u -> prod_j z{i_j}^{<u, v_{i_j}>}``; an isomorphism RT -> RT_a."""
    a = tuple(sorted(a))
    r = _t_embed(pair, r)
    terms: dict = {}
    for u, c in r.terms.items():
        e = tuple(pair.pairing(u, i) for i in a)
        terms[e] = terms.get(e, 0) + c
    return LaurentPoly(z_names(a), terms)


def zeta_inverse(pair: CharacteristicPair, q: LaurentPoly, a: Sequence[int]) -> LaurentPoly:
    """``z{i} -> chi^{u_i}`` with ``u_i`` the dual basis at ``a``."""
    a = tuple(sorted(a))
    u = dual_vectors(pair, a)
    terms: dict = {}
    for e, c in q.terms.items():
        w = [0] * pair.n
        for i, k in zip(a, e):
            for j in range(pair.n):
                w[j] += k * u[i][j]
        terms[tuple(w)] = terms.get(tuple(w), 0) + c
    return LaurentPoly(pair.t_names, terms)


def zeta(pair: CharacteristicPair, r: LaurentPoly) -> RestrictionTuple:
    return RestrictionTuple.from_dict({a: zeta_at_vertex(pair, r, a) for a in pair.vertices})


# ---------------------------------------------------------------------------
# RT-module decomposition
# ---------------------------------------------------------------------------


def transplanted_basis(pair: CharacteristicPair) -> list[LaurentPoly]:
    """Cohomology basis monomials with ``x_i -> 1 - y_i``."""
    images = {x: _one_minus(y, pair.y_names) for x, y in zip(pair.x_names, pair.y_names)}
    return [b.substitute(images, pair.y_names) for b in graded_rank_and_basis(pair).as_polys()]


class RTBasis:
    """A candidate RT-basis of the K-theoretic face ring with its restriction matrix."""

    def __init__(self, pair: CharacteristicPair, elements: Sequence[LaurentPoly]):
        self.pair = pair
        self.elements = [_y_embed(pair, b) for b in elements]
        m = len(pair.vertices)
        if len(self.elements) != m:
            raise BasisNotFree(f"need exactly {m} basis elements, got {len(self.elements)}")
        self.matrix = [
            [zeta_inverse(pair, phi_restrict(pair, b, a), a) for b in self.elements] for a in pair.vertices
        ]

    def coefficients_of_tuple(self, t: RestrictionTuple) -> list[LaurentPoly]:
        d = t.as_dict()
        rhs = [zeta_inverse(self.pair, d[a], a) for a in self.pair.vertices]
        try:
            return solve_over_laurent_fraction_field(self.matrix, rhs)
        except Singular as exc:
            raise BasisNotFree("restriction matrix is singular") from exc
        except NotInRing as exc:
            raise BasisNotFree("coefficients are not Laurent polynomials") from exc

    def decompose(self, p: LaurentPoly) -> dict[LaurentPoly, LaurentPoly]:
        coeffs = self.coefficients_of_tuple(phi(self.pair, p))
        return dict(zip(self.elements, coeffs))

    def reconstruct(self, coeffs: Mapping[LaurentPoly, LaurentPoly]) -> LaurentPoly:
        out = LaurentPoly.zero(self.pair.y_names)
        for b, c in coeffs.items():
            out = out + iota(self.pair, c) * b
        return out

    def verify(self) -> None:
        """Raise BasisNotFree unless the elements form an RT-basis.

        The RT-span contains 1 and is closed under multiplication by every
        ``y_i^{+-1}`` iff it is the whole ring; independence comes from the
        solve being unique.
        """
        pair = self.pair
        self.decompose(IntPoly.one(pair.y_names))
        for b in self.elements:
            for i in range(pair.d):
                for s in (1, -1):
                    e = [0] * pair.d
                    e[i] = s
                    self.decompose(b * LaurentPoly.monomial(e, pair.y_names))


def _candidate_bases(pair: CharacteristicPair):
    yield transplanted_basis(pair)
    m = len(pair.vertices)
    monos = []
    for s in sorted(pair.simplices, key=lambda s: (len(s), s)):
        e = [0] * pair.d
        for i in s:
            e[i - 1] = 1
        monos.append(LaurentPoly.monomial(e, pair.y_names))
    for combo in itertools.combinations(monos[1:], m - 1):
        yield [monos[0], *combo]


@lru_cache(maxsize=64)
def default_rt_basis(pair: CharacteristicPair) -> RTBasis:
    """The transplanted basis, or the first free square-free y-monomial set."""
    last = None
    for cand in _candidate_bases(pair):
        try:
            B = RTBasis(pair, cand)
            B.verify()
            return B
        except BasisNotFree as exc:
            last = exc
    raise BasisNotFree(f"no free basis found among candidates: {last}")


def rt_decompose(pair: CharacteristicPair, p: LaurentPoly, basis: Sequence[LaurentPoly] | None = None) -> dict[LaurentPoly, LaurentPoly]:
    """Coefficients ``c_k`` in RT with ``p = sum_k iota(c_k) * b_k``."""
    B = default_rt_basis(pair) if basis is None else RTBasis(pair, basis)
    return B.decompose(p)


def augment_to_KX(pair: CharacteristicPair, decomposition: Mapping[LaurentPoly, LaurentPoly]) -> dict[LaurentPoly, int]:
    """Apply ``chi^u -> 1`` to each RT-coefficient."""
    return {b: c.coefficient_sum() for b, c in decomposition.items()}


def reduce_KX(pair: CharacteristicPair, p: LaurentPoly) -> dict[LaurentPoly, int]:
    return augment_to_KX(pair, rt_decompose(pair, p))


# ---------------------------------------------------------------------------
# Independent membership test and truncated presentation
# ---------------------------------------------------------------------------


def face_ring_representative(pair: CharacteristicPair, p: LaurentPoly) -> IntPoly:
    """Clear denominators by a y-monomial, set ``y = 1 - x`` and prune non-faces.

    Zero exactly when ``p`` lies in the ideal of the K-theoretic face ring,
    since y-monomials are non-zero-divisors of the face ring.
    """
    p = _y_embed(pair, p)
    shift = tuple(-min(0, m) for m in p.min_exponents())
    P = p.scale_monomial(shift).to_intpoly()
    images = {y: _one_minus(x, pair.x_names) for x, y in zip(pair.x_names, pair.y_names)}
    X = P.substitute(images, pair.x_names)
    return IntPoly(pair.x_names, {e: c for e, c in X.terms.items() if is_face_monomial(pair, e)})


def in_face_ring_ideal(pair: CharacteristicPair, p: LaurentPoly) -> bool:
    return face_ring_representative(pair, p).is_zero()


class TruncatedKRing:
    """``K*(B) (x) Z[x] / (J' + (x)^N)`` as a lattice quotient.

    With ``base=None`` this is K*(X) from the x-form presentation. ``N`` is
    increased until the rank stabilises, which certifies that the
    truncation does not change the ring.
    """

    def __init__(self, pair: CharacteristicPair, base=None, N: int | None = None, max_extra: int = 4):
        self.pair = pair
        self.base = base
        start = N if N is not None else pair.n + (base.nil if base is not None else 1)
        N = start
        prev = self._build(N)
        for _ in range(max_extra):
            nxt = self._build(N + 1)
            if nxt.rank == prev.rank and not nxt.torsion and not prev.torsion:
                break
            prev, N = nxt, N + 1
        else:
            raise ArithmeticError("truncated K-ring rank did not stabilise")
        self.quot = prev
        self.N = self._N = N

    @property
    def rank(self) -> int:
        return self.quot.rank

    @property
    def torsion(self) -> tuple[int, ...]:
        return self.quot.torsion

    def _base_rank(self):
        return self.base.rank if self.base is not None else 1

    def _xi(self, u):
        if self.base is None:
            return (1,)
        return self.base.xi(u)

    def _bmul(self, a, b):
        if self.base is None:
            return (a[0] * b[0],)
        return self.base.mul(a, b)

    def _truncate(self, terms: Mapping) -> dict:
        return {e: c for e, c in terms.items() if sum(e) < self._N and is_face_monomial(self.pair, e)}

    def _build(self, N: int) -> LatticeQuotient:
        self._N = N
        pair = self.pair
        monos = [m for k in range(N) for m in face_monomials(pair, k)]
        r = self._base_rank()
        keys = sorted(((mu, beta) for mu in monos for beta in range(r)), key=lambda k: (sum(k[0]), k[0], -k[1]), reverse=True)
        rels = []
        xv = pair.x_names
        for u in standard_basis(pair.n):
            pos = IntPoly.one(xv)
            neg = IntPoly.one(xv)
            for i, a in enumerate(character_exponents(pair, u)):
                f = _one_minus(xv[i], xv)
                if a > 0:
                    pos = pos * f**a
                elif a < 0:
                    neg = neg * f ** (-a)
            pos_t, neg_t = self._truncate(pos.terms), self._truncate(neg.terms)
            xi = self._xi(u)
            unit = (1,) + (0,) * (r - 1)
            for mu in monos:
                for gamma in range(r):
                    eg = tuple(int(j == gamma) for j in range(r))
                    row: dict = {}
                    for sign, part, coeff in ((1, pos_t, unit), (-1, neg_t, xi)):
                        bvec = self._bmul(eg, coeff)
                        for e, c in part.items():
                            m2 = tuple(a + b for a, b in zip(e, mu))
                            if sum(m2) >= N or not is_face_monomial(pair, m2):
                                continue
                            for beta, k in enumerate(bvec):
                                if k:
                                    row[(m2, beta)] = row.get((m2, beta), 0) + sign * c * k
                    rels.append(row)
        return LatticeQuotient(keys, rels)

    def coordinates(self, parts: Mapping[int, LaurentPoly]) -> dict:
        """Normal form of ``sum_beta e_beta * p_beta`` with ``p_beta`` Laurent in y."""
        pair = self.pair
        vec: dict = {}
        inv_images = {}
        for x, y in zip(pair.x_names, pair.y_names):
            inv = IntPoly(pair.x_names, {tuple(k * int(x == z) for z in pair.x_names): 1 for k in range(self._N)})
            inv_images[y] = inv
        for beta, p in parts.items():
            p = _y_embed(pair, p)
            acc: dict = {}
            for e, c in p.terms.items():
                term = {(0,) * pair.d: c}
                for i, k in enumerate(e):
                    if k:
                        f = (_one_minus(pair.x_names[i], pair.x_names) if k > 0 else inv_images[pair.y_names[i]])
                        fk = f ** abs(k)
                        term = self._truncate(_mul(term, self._truncate(fk.terms)))
                for te, tc in term.items():
                    acc[te] = acc.get(te, 0) + tc
            for te, tc in self._truncate(acc).items():
                if tc:
                    vec[(te, beta)] = vec.get((te, beta), 0) + tc
        return self.quot.reduce(vec)


def _mul(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return out


@lru_cache(maxsize=64)
def truncated_kx(pair: CharacteristicPair) -> TruncatedKRing:
    return TruncatedKRing(pair)
