"""Finitely presented base rings H*(B) and K*(B).

A base ring is a free Z-module with basis ``e_0 = 1, e_1, ...`` and a
multiplication table ``mult[i][j]`` giving ``e_i * e_j`` as an integer
vector. Elements are tuples of integers in that basis.
"""

from __future__ import annotations

import itertools
import json
from math import comb
from pathlib import Path
from typing import Mapping, Sequence

from .exactalg import IntMatrix, LaurentPoly, NoSolution, solve_integer

Vec = tuple[int, ...]


class InvalidBase(ValueError):
    pass


def _parse_u_key(key: str) -> int:
    k = key.strip().lower()
    for prefix in ("u_", "u", "e_", "e"):
        if k.startswith(prefix) and k[len(prefix):].isdigit():
            return int(k[len(prefix):]) - 1
    raise InvalidBase(f"cannot read character index from {key!r}")


class _TableRing:
    kind = "ring"

    def __init__(self, names: Sequence[str], degrees: Sequence[int], mult):
        self.names = tuple(str(s) for s in names)
        self.degrees = tuple(int(d) for d in degrees)
        r = len(self.names)
        if r == 0:
            raise InvalidBase("base ring needs at least the unit")
        if len(self.degrees) != r:
            raise InvalidBase("basis names and degrees disagree")
        try:
            self.mult = tuple(tuple(tuple(int(c) for c in mult[i][j]) for j in range(r)) for i in range(r))
        except (IndexError, TypeError) as exc:
            raise InvalidBase(f"multiplication table is not {r}x{r}x{r}") from exc
        if any(len(v) != r for row in self.mult for v in row):
            raise InvalidBase(f"multiplication table entries must have length {r}")

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def variables(self) -> tuple[str, ...]:
        """Names usable as polynomial variables (all but the unit)."""
        return self.names[1:]

    # vector arithmetic ------------------------------------------------
    def zero(self) -> Vec:
        return (0,) * self.rank

    def unit(self) -> Vec:
        return self.basis(0)

    def basis(self, i: int) -> Vec:
        return tuple(int(i == j) for j in range(self.rank))

    def add(self, a: Vec, b: Vec) -> Vec:
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a: Vec, b: Vec) -> Vec:
        return tuple(x - y for x, y in zip(a, b))

    def scale(self, c: int, a: Vec) -> Vec:
        return tuple(c * x for x in a)

    def mul(self, a: Vec, b: Vec) -> Vec:
        out = [0] * self.rank
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if y:
                    for k, c in enumerate(self.mult[i][j]):
                        if c:
                            out[k] += x * y * c
        return tuple(out)

    def power(self, a: Vec, k: int) -> Vec:
        result = self.unit()
        for _ in range(k):
            result = self.mul(result, a)
        return result

    def is_zero(self, a: Vec) -> bool:
        return not any(a)

    def mult_matrix(self, a: Vec) -> IntMatrix:
        """Matrix of ``b -> a * b`` in the standard basis."""
        cols = [self.mul(a, self.basis(j)) for j in range(self.rank)]
        return IntMatrix(self.rank, self.rank, {(i, j): cols[j][i] for j in range(self.rank) for i in range(self.rank) if cols[j][i]})

    def inverse(self, a: Vec) -> Vec:
        try:
            x = solve_integer(self.mult_matrix(a), list(self.unit()))
        except NoSolution:
            raise InvalidBase(f"{self.format(a)} is not invertible in the base ring") from None
        return tuple(x)

    # rendering --------------------------------------------------------
    def to_poly(self, a: Vec, variables: Sequence[str]) -> LaurentPoly:
        """The element as a polynomial linear in the basis-name variables."""
        variables = tuple(variables)
        terms = {}
        for i, c in enumerate(a):
            if not c:
                continue
            e = [0] * len(variables)
            if i:
                e[variables.index(self.names[i])] = 1
            terms[tuple(e)] = terms.get(tuple(e), 0) + c
        return LaurentPoly(variables, terms)

    def format(self, a: Vec) -> str:
        return str(self.to_poly(a, self.variables)) if self.variables else str(a[0])

    def from_monomial(self, exps: Sequence[int]) -> Vec:
        """Product of basis elements named by the (nonnegative) exponent vector over ``variables``."""
        out = self.unit()
        for i, k in enumerate(exps):
            if k < 0:
                raise InvalidBase(f"negative power of base element {self.names[i + 1]}")
            for _ in range(k):
                out = self.mul(out, self.basis(i + 1))
        return out

    # checks -----------------------------------------------------------
    def _check_table(self, graded: bool):
        r = self.rank
        if self.degrees[0] != 0:
            raise InvalidBase("basis element 0 must be the unit in degree 0")
        for j in range(r):
            if self.mult[0][j] != self.basis(j) or self.mult[j][0] != self.basis(j):
                raise InvalidBase("basis element 0 is not a two-sided unit")
        for i, j in itertools.product(range(r), repeat=2):
            sign = (-1) ** (self.degrees[i] * self.degrees[j]) if graded else 1
            if self.mult[i][j] != self.scale(sign, self.mult[j][i]):
                raise InvalidBase(f"multiplication is not (graded-)commutative at ({self.names[i]}, {self.names[j]})")
            if graded:
                for k, c in enumerate(self.mult[i][j]):
                    if c and self.degrees[k] != self.degrees[i] + self.degrees[j]:
                        raise InvalidBase(f"{self.names[i]}*{self.names[j]} has a component of the wrong degree")
        for i, j, k in itertools.product(range(r), repeat=3):
            ei, ej, ek = self.basis(i), self.basis(j), self.basis(k)
            if self.mul(self.mul(ei, ej), ek) != self.mul(ei, self.mul(ej, ek)):
                raise InvalidBase(f"multiplication is not associative at {self.names[i]}, {self.names[j]}, {self.names[k]}")

    def augmentation_ideal(self) -> list[Vec]:
        return [self.basis(i) for i in range(1, self.rank)]

    def nilpotency_order(self) -> int:
        """Least ``N`` with ``I^N = 0`` for the span ``I`` of the non-unit basis elements."""
        gens = self.augmentation_ideal()
        for g in gens:
            for h in gens:
                if self.mul(g, h)[0]:
                    raise InvalidBase("non-unit basis elements do not span an ideal")
        level = [g for g in gens if any(g)]
        N = 1
        limit = self.rank + 1
        while level:
            N += 1
            if N > limit:
                raise InvalidBase("augmentation ideal is not nilpotent")
            nxt = {self.mul(a, g) for a in level for g in gens}
            level = [v for v in nxt if any(v)]
        return N

    def _base_json(self) -> dict:
        return {
            "basis": [{"name": n, "degree": d} for n, d in zip(self.names, self.degrees)],
            "mult": [[list(v) for v in row] for row in self.mult],
        }


def _parse_basis(data):
    try:
        basis = data["basis"]
        names = [b["name"] if isinstance(b, Mapping) else str(b) for b in basis]
        degrees = [int(b.get("degree", 0)) if isinstance(b, Mapping) else 0 for b in basis]
        return names, degrees, data["mult"]
    except (KeyError, TypeError) as exc:
        raise InvalidBase(f"malformed base ring: {exc}") from exc


class BaseCohomRing(_TableRing):
    """H*(B) with the Chern-class assignment ``u -> c_1(xi_u)``."""

    kind = "cohomology"

    def __init__(self, names, degrees, mult, char_class: Mapping[int, Sequence[int]], n: int | None = None):
        super().__init__(names, degrees, mult)
        if n is None:
            n = max(char_class, default=-1) + 1
        self.n = n
        self.char = {j: tuple(int(c) for c in char_class.get(j, self.zero())) for j in range(n)}
        for j, v in self.char.items():
            if len(v) != self.rank:
                raise InvalidBase(f"char class of u_{j + 1} has wrong length")
        self._check_table(graded=True)
        for j, v in self.char.items():
            for k, c in enumerate(v):
                if c and self.degrees[k] != 2:
                    raise InvalidBase(f"c_1(xi_u{j + 1}) has a component outside degree 2")
        for k in range(1, self.rank):
            if self.degrees[k] <= 0:
                raise InvalidBase("non-unit basis elements must have positive degree")
        self.nil = self.nilpotency_order()

    def char_class(self, u: Sequence[int]) -> Vec:
        """``c_1(xi_u)``, linear in ``u``."""
        if len(u) != self.n:
            raise InvalidBase(f"character {tuple(u)} does not match n={self.n}")
        out = self.zero()
        for j, c in enumerate(u):
            if c:
                out = self.add(out, self.scale(c, self.char[j]))
        return out

    @property
    def top_degree(self) -> int:
        return max(self.degrees)

    @classmethod
    def point(cls, n: int) -> BaseCohomRing:
        return cls(["1"], [0], [[[1]]], {}, n=n)

    @classmethod
    def projective_space(cls, N: int, twists: Sequence[int], var: str = "t") -> BaseCohomRing:
        """H*(CP^N) = Z[t]/(t^{N+1}) with ``c_1(xi_{e_j}) = twists[j] * t``."""
        names = ["1"] + [var if k == 1 else f"{var}{k}" for k in range(1, N + 1)]
        r = N + 1
        mult = [[[int(k == i + j) for k in range(r)] for j in range(r)] for i in range(r)]
        char = {j: tuple(int(k == 1) * w for k in range(r)) for j, w in enumerate(twists)} if N >= 1 else {}
        return cls(names, [2 * k for k in range(r)], mult, char, n=len(twists))

    @classmethod
    def from_json(cls, data) -> BaseCohomRing:
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        names, degrees, mult = _parse_basis(data)
        raw = data.get("char_class", {})
        char = {_parse_u_key(k): v for k, v in raw.items()}
        return cls(names, degrees, mult, char, n=data.get("n"))

    def to_json(self) -> dict:
        out = self._base_json()
        out["n"] = self.n
        out["char_class"] = {f"u_{j + 1}": list(v) for j, v in self.char.items()}
        return out


class BaseKRing(_TableRing):
    """K*(B) with the line-bundle classes ``u -> [xi_u]``."""

    kind = "k-theory"

    def __init__(self, names, degrees, mult, line_class: Mapping[int, Sequence[int]], n: int | None = None):
        super().__init__(names, degrees, mult)
        if n is None:
            n = max(line_class, default=-1) + 1
        self.n = n
        self.line = {j: tuple(int(c) for c in line_class.get(j, self.unit())) for j in range(n)}
        self._check_table(graded=any(d % 2 for d in self.degrees))
        self.nil = self.nilpotency_order()
        self.line_inv = {}
        for j, v in self.line.items():
            if len(v) != self.rank:
                raise InvalidBase(f"line class of u_{j + 1} has wrong length")
            inv = self.inverse(v)
            if self.mul(v, inv) != self.unit():
                raise InvalidBase(f"inverse of [xi_u{j + 1}] failed verification")
            self.line_inv[j] = inv
            if any(self.power(self.sub(v, self.unit()), self.nil)):
                raise InvalidBase(f"[xi_u{j + 1}] - 1 is not nilpotent")
        self._xi_cache: dict = {}

    def xi(self, u: Sequence[int]) -> Vec:
        """``[xi_u] = prod_j [xi_{e_j}]^{u_j}``."""
        u = tuple(u)
        if len(u) != self.n:
            raise InvalidBase(f"character {u} does not match n={self.n}")
        if u not in self._xi_cache:
            out = self.unit()
            for j, c in enumerate(u):
                f = self.line[j] if c > 0 else self.line_inv[j]
                for _ in range(abs(c)):
                    out = self.mul(out, f)
            self._xi_cache[u] = out
        return self._xi_cache[u]

    @classmethod
    def point(cls, n: int) -> BaseKRing:
        return cls(["1"], [0], [[[1]]], {}, n=n)

    @classmethod
    def projective_space(cls, N: int, twists: Sequence[int], var: str = "s") -> BaseKRing:
        """K(CP^N) = Z[s]/(s^{N+1}), ``s = [O(1)] - 1``, with ``[xi_{e_j}] = (1+s)^{twists[j]}``."""
        names = ["1"] + [var if k == 1 else f"{var}{k}" for k in range(1, N + 1)]
        r = N + 1
        mult = [[[int(k == i + j) for k in range(r)] for j in range(r)] for i in range(r)]
        line = {}
        for j, w in enumerate(twists):
            if w >= 0:
                line[j] = tuple(comb(w, k) for k in range(r))
            else:
                # (1+s)^{-m} = sum_k (-1)^k C(m+k-1, k) s^k
                m = -w
                line[j] = tuple((-1) ** k * comb(m + k - 1, k) for k in range(r))
        return cls(names, [0] * r, mult, line, n=len(twists))

    @classmethod
    def from_json(cls, data) -> BaseKRing:
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        names, degrees, mult = _parse_basis(data)
        raw = data.get("line_class", {})
        line = {_parse_u_key(k): v for k, v in raw.items()}
        return cls(names, degrees, mult, line, n=data.get("n"))

    def to_json(self) -> dict:
        out = self._base_json()
        out["n"] = self.n
        out["line_class"] = {f"u_{j + 1}": list(v) for j, v in self.line.items()}
        return out


def load_base(source):
    """Load a cohomology (``char_class``) or K-theory (``line_class``) base ring."""
    data = json.loads(Path(source).read_text()) if isinstance(source, (str, Path)) else source
    if "line_class" in data:
        return BaseKRing.from_json(data)
    return BaseCohomRing.from_json(data)


def split_base(poly: LaurentPoly, base: _TableRing, fiber_vars: Sequence[str]) -> dict[int, LaurentPoly]:
    """Split a polynomial over ``fiber_vars + base.variables`` by base basis element."""
    fiber_vars = tuple(fiber_vars)
    allowed = set(fiber_vars) | set(base.variables)
    extra = [v for i, v in enumerate(poly.variables) if v not in allowed and any(e[i] for e in poly.terms)]
    if extra:
        raise InvalidBase(f"unknown variables {extra}")
    fpos = [poly.variables.index(v) if v in poly.variables else None for v in fiber_vars]
    bpos = [poly.variables.index(v) if v in poly.variables else None for v in base.variables]
    acc: dict[int, dict] = {}
    for e, c in poly.terms.items():
        fe = tuple(e[p] if p is not None else 0 for p in fpos)
        be = tuple(e[p] if p is not None else 0 for p in bpos)
        vec = base.from_monomial(be)
        for beta, k in enumerate(vec):
            if k:
                d = acc.setdefault(beta, {})
                d[fe] = d.get(fe, 0) + c * k
    out = {}
    for beta, t in acc.items():
        p = LaurentPoly(fiber_vars, t)
        if p:
            out[beta] = p
    return out


def join_base(parts: Mapping[int, LaurentPoly], base: _TableRing, fiber_vars: Sequence[str]) -> LaurentPoly:
    allv = tuple(fiber_vars) + base.variables
    acc = LaurentPoly.zero(allv)
    for beta, p in parts.items():
        b = base.to_poly(base.basis(beta), allv)
        acc = acc + b * p.embed(allv)
    return acc
