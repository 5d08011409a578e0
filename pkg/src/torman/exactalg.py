"""Exact arithmetic kernel.

Integer matrices with Smith normal form and integer solving, a lattice
quotient helper that picks monomial bases with unit pivots, and sparse
multivariate Laurent polynomials over the integers.

Nothing here touches floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class NoSolution(ValueError):
    """The right-hand side is not in the integer image of the matrix."""


class VariableMismatch(ValueError):
    pass


class NonInvertibleImage(ValueError):
    pass


class Singular(ValueError):
    pass


class NotInRing(ValueError):
    """A fraction-field solution exists but some entry is not a Laurent polynomial.

    ``numerators[i] / denominator`` is the i-th rational solution entry.
    """

    def __init__(self, numerators, denominator):
        super().__init__("solution has non-Laurent entries")
        self.numerators = numerators
        self.denominator = denominator


# ---------------------------------------------------------------------------
# Integer matrices
# ---------------------------------------------------------------------------


class IntMatrix:
    """Sparse integer matrix; absent entries are zero."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], int] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.rows = rows
        self.cols = cols
        self._entries = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError((i, j))
            if v:
                self._entries[(i, j)] = int(v)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v})

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, {(i, i): d for i, d in enumerate(diag)})

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self._entries.get(ij, 0)

    def items(self):
        return self._entries.items()

    def to_rows(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self._entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self._entries.items()})

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row: dict[int, list[tuple[int, int]]] = {}
        for (k, j), v in other._entries.items():
            by_row.setdefault(k, []).append((j, v))
        out: dict[tuple[int, int], int] = {}
        for (i, k), a in self._entries.items():
            for j, b in by_row.get(k, ()):
                out[(i, j)] = out.get((i, j), 0) + a * b
        return IntMatrix(self.rows, other.cols, out)

    def apply(self, vec: Sequence[int]) -> list[int]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = [0] * self.rows
        for (i, j), v in self._entries.items():
            out[i] += v * vec[j]
        return out

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return bareiss_det(self.to_rows())

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self._entries.items())))

    def __repr__(self):
        return f"IntMatrix({self.to_rows()!r})"


def _as_rows(A) -> list[list[int]]:
    if isinstance(A, IntMatrix):
        return A.to_rows()
    return [list(map(int, r)) for r in A]


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    M = [list(r) for r in rows]
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def unimodular_inverse(A) -> IntMatrix:
    """Exact inverse of a square integer matrix with determinant +-1."""
    rows = _as_rows(A)
    n = len(rows)
    M = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            raise Singular("matrix is singular")
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    inv = [r[n:] for r in M]
    if any(v.denominator != 1 for r in inv for v in r):
        raise ValueError("matrix is not unimodular")
    return IntMatrix.from_rows([[int(v) for v in r] for r in inv], n)


@dataclass(frozen=True)
class SNFResult:
    diag: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d)


def snf(A, transforms: bool = True) -> SNFResult:
    """Smith normal form: ``left @ A @ right == diagonal(diag)``.

    Pivots are chosen by smallest absolute value. ``diag`` has
    ``min(rows, cols)`` entries, nonnegative, each dividing the next
    (zeros trail). With ``transforms=False`` the unimodular factors are
    returned as empty placeholders, which is much cheaper on large inputs.
    """
    D = _as_rows(A)
    m = len(D)
    n = len(D[0]) if m else (A.cols if isinstance(A, IntMatrix) else 0)
    U = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        if V is not None:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, f):  # row dst += f * row src
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        if U is not None:
            U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for r in D:
            r[dst] += f * r[src]
        if V is not None:
            for r in V:
                r[dst] += f * r[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = D[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    if D[t][j]:
                        dirty = True
            if not dirty:
                # pivot must divide the whole remaining block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
                if bad is None:
                    break
                add_row(t, bad[0], 1)
                continue
            # a smaller remainder appeared; move it to the pivot slot
            best = min(
                [(abs(D[i][t]), i, t) for i in range(t, m) if D[i][t]]
                + [(abs(D[t][j]), t, j) for j in range(t, n) if D[t][j]]
            )
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
        if D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            if U is not None:
                U[t] = [-v for v in U[t]]
        t += 1

    diag = tuple(D[i][i] for i in range(min(m, n)))
    if transforms:
        left, right = IntMatrix.from_rows(U, m), IntMatrix.from_rows(V, n)
    else:
        left, right = IntMatrix(0, 0), IntMatrix(0, 0)
    return SNFResult(diag, left, right)


def elementary_divisors(A) -> tuple[int, ...]:
    """Nonzero invariant factors of ``A``."""
    return tuple(d for d in snf(A, transforms=False).diag if d)


def solve_integer(A, b: Sequence[int]) -> list[int]:
    """Some integer ``x`` with ``A @ x == b``; raises NoSolution otherwise."""
    rows = _as_rows(A)
    m = len(rows)
    n = A.cols if isinstance(A, IntMatrix) else (len(rows[0]) if m else 0)
    if len(b) != m:
        raise ValueError("dimension mismatch")
    res = snf(A)
    c = res.left.apply(list(b))
    y = [0] * n
    for i in range(m):
        d = res.diag[i] if i < len(res.diag) else 0
        if d == 0:
            if c[i]:
                raise NoSolution(f"row {i} of the reduced system is inconsistent")
        else:
            if c[i] % d:
                raise NoSolution(f"elementary divisor {d} does not divide {c[i]}")
            y[i] = c[i] // d
    return res.right.apply(y)


class BasisSelectionError(ValueError):
    """No set of monomial coordinates is complementary to the relations over Z."""


class LatticeQuotient:
    """The Z-module ``Z^keys / span(relations)`` with a coordinate basis.

    ``keys`` are listed in pivot-preference order: earlier keys are
    eliminated first, so the basis consists of the latest keys that work.
    Basis selection requires unit pivots; when the greedy order fails,
    other pivot sets are tried in preference order.
    """

    def __init__(self, keys: Sequence, relations: Iterable[Mapping], search_limit: int = 20000):
        self.keys = list(keys)
        self.index = {k: i for i, k in enumerate(self.keys)}
        rels = []
        for r in relations:
            row = {self.index[k]: v for k, v in r.items() if v}
            if row:
                rels.append(row)
        N = len(self.keys)
        self.divisors = elementary_divisors([[r.get(j, 0) for j in range(N)] for r in rels]) if rels else ()
        self.rank = N - len(self.divisors)
        self.torsion = tuple(d for d in self.divisors if d > 1)
        self._pivots: list[tuple[int, dict]] = []
        self.basis: list = []
        if self.torsion:
            return
        order = list(range(N))
        pivots = self._echelon(rels, order)
        if pivots is None:
            pivots = self._search(rels, search_limit)
        self._pivots = pivots
        pivot_cols = {p for p, _ in pivots}
        self.basis = [k for i, k in enumerate(self.keys) if i not in pivot_cols]
        self._basis_pos = {self.index[k]: n for n, k in enumerate(self.basis)}

    def _echelon(self, rels, order):
        rows = [dict(r) for r in rels]
        pivots = []
        for c in order:
            live = [r for r in rows if r.get(c)]
            if not live:
                continue
            # Euclid across the live rows until one row holds the gcd
            while len(live) > 1:
                live.sort(key=lambda r: abs(r[c]))
                head = live[0]
                for r in live[1:]:
                    q = r[c] // head[c]
                    for j, v in head.items():
                        nv = r.get(j, 0) - q * v
                        if nv:
                            r[j] = nv
                        else:
                            r.pop(j, None)
                live = [r for r in live if r.get(c)]
            head = live[0]
            if abs(head[c]) != 1:
                continue
            if head[c] < 0:
                for j in head:
                    head[j] = -head[j]
            rows = [r for r in rows if r is not head and r]
            pivots.append((c, head))
        if any(rows):
            return None
        return pivots

    def _search(self, rels, limit):
        N = len(self.keys)
        r = N - self.rank
        tried = 0
        for combo in itertools.combinations(range(N), r):
            tried += 1
            if tried > limit:
                break
            order = list(combo) + [c for c in range(N) if c not in combo]
            piv = self._echelon(rels, order)
            if piv is not None:
                return piv
        raise BasisSelectionError("no unimodular pivot set among the coordinate keys")

    def reduce(self, vec: Mapping) -> dict:
        """Coordinates of the class of ``vec`` in ``self.basis``."""
        if self.torsion:
            raise ValueError("quotient has torsion; no coordinate basis")
        v = {}
        for k, c in vec.items():
            if c:
                if k not in self.index:
                    raise KeyError(f"unknown coordinate {k!r}")
                v[self.index[k]] = v.get(self.index[k], 0) + c
        for c, row in self._pivots:
            f = v.get(c, 0)
            if f:
                for j, a in row.items():
                    nv = v.get(j, 0) - f * a
                    if nv:
                        v[j] = nv
                    else:
                        v.pop(j, None)
        out = {}
        for j, c in v.items():
            if c:
                out[self.keys[j]] = c
        return out


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------


def _fmt_var(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


class LaurentPoly:
    """Sparse Laurent polynomial with integer coefficients.

    ``variables`` is an ordered tuple of names; ``terms`` maps integer
    exponent vectors (negative entries allowed) to nonzero coefficients.
    Instances are treated as immutable.
    """

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], int] | None = None):
        self.variables = tuple(variables)
        nv = len(self.variables)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nv:
                raise ValueError(f"exponent vector {e} has wrong length for {self.variables}")
            if c:
                clean[e] = int(c)
        self._check(clean)
        self._terms = clean
        self._hash = None

    def _check(self, terms):
        pass

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, variables):
        return cls(variables)

    @classmethod
    def constant(cls, c: int, variables):
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def one(cls, variables):
        return cls.constant(1, variables)

    @classmethod
    def monomial(cls, exps: Sequence[int], variables, coeff: int = 1):
        return cls(variables, {tuple(exps): coeff})

    @classmethod
    def var(cls, name: str, variables):
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatch(f"{name} not among {variables}")
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls(variables, {tuple(e): 1})

    def _new(self, terms, other=None):
        cls = LaurentPoly
        if type(self) is IntPoly and (other is None or type(other) is IntPoly):
            if all(x >= 0 for e in terms for x in e):
                cls = IntPoly
        return cls(self.variables, terms)

    # inspection -------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_unit(self) -> bool:
        return len(self._terms) == 1 and abs(next(iter(self._terms.values()))) == 1

    def constant_term(self) -> int:
        return self._terms.get((0,) * len(self.variables), 0)

    def degree(self) -> int:
        """Maximum total degree of a term (``-1`` for zero)."""
        return max((sum(e) for e in self._terms), default=-1)

    def min_exponents(self) -> tuple[int, ...]:
        if not self._terms:
            return (0,) * len(self.variables)
        return tuple(min(e[i] for e in self._terms) for i in range(len(self.variables)))

    def homogeneous_components(self) -> dict[int, LaurentPoly]:
        out: dict[int, dict] = {}
        for e, c in self._terms.items():
            out.setdefault(sum(e), {})[e] = c
        return {d: self._new(t) for d, t in sorted(out.items())}

    def coefficient_sum(self) -> int:
        """Evaluation at the all-ones point (the augmentation)."""
        return sum(self._terms.values())

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.variables != self.variables:
                raise VariableMismatch(f"{self.variables} vs {other.variables}")
            return other
        if isinstance(other, int):
            return IntPoly.constant(other, self.variables)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self._terms)
        for e, c in other._terms.items():
            t[e] = t.get(e, 0) + c
        return self._new(t, other)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return self._new(t, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self._new({(0,) * len(self.variables): 1})
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> LaurentPoly:
        if not self.is_unit():
            raise NonInvertibleImage(f"{self} is not a unit of the Laurent ring")
        (e, c), = self._terms.items()
        return LaurentPoly(self.variables, {tuple(-x for x in e): c})

    def scale_monomial(self, shift: Sequence[int]) -> LaurentPoly:
        return LaurentPoly(self.variables, {tuple(a + b for a, b in zip(e, shift)): c for e, c in self._terms.items()})

    def exact_divide(self, other: LaurentPoly) -> LaurentPoly | None:
        """``self / other`` when it is a Laurent polynomial, else ``None``."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return LaurentPoly.zero(self.variables)
        sp, so = self.min_exponents(), other.min_exponents()
        P = {tuple(a - b for a, b in zip(e, sp)): c for e, c in self._terms.items()}
        Q = {tuple(a - b for a, b in zip(e, so)): c for e, c in other._terms.items()}
        lq = max(Q)
        lc = Q[lq]
        quot: dict = {}
        rem = P
        while rem:
            lr = max(rem)
            diff = tuple(a - b for a, b in zip(lr, lq))
            if min(diff) < 0 or rem[lr] % lc:
                return None
            f = rem[lr] // lc
            quot[diff] = f
            for e, c in Q.items():
                k = tuple(a + b for a, b in zip(e, diff))
                v = rem.get(k, 0) - f * c
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        shift = tuple(a - b for a, b in zip(sp, so))
        return LaurentPoly(self.variables, {tuple(a + b for a, b in zip(e, shift)): c for e, c in quot.items()})

    # variable handling ------------------------------------------------
    def substitute(self, images: Mapping[str, LaurentPoly], target_variables=None) -> LaurentPoly:
        return laurent_substitute(self, images, target_variables)

    def embed(self, variables: Sequence[str]) -> LaurentPoly:
        """Re-express in a variable list containing every variable used here."""
        variables = tuple(variables)
        pos = []
        for i, v in enumerate(self.variables):
            if v in variables:
                pos.append(variables.index(v))
            elif any(e[i] for e in self._terms):
                raise VariableMismatch(f"variable {v} is used but absent from {variables}")
            else:
                pos.append(None)
        t = {}
        for e, c in self._terms.items():
            ne = [0] * len(variables)
            for i, x in enumerate(e):
                if pos[i] is not None:
                    ne[pos[i]] += x
            t[tuple(ne)] = t.get(tuple(ne), 0) + c
        cls = IntPoly if type(self) is IntPoly else LaurentPoly
        return cls(variables, t)

    def to_intpoly(self) -> IntPoly:
        return IntPoly(self.variables, self._terms)

    # comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            return self._terms == ({(0,) * len(self.variables): other} if other else {})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.variables == other.variables and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    # rendering --------------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join(_fmt_var(v, x) for v, x in zip(self.variables, e) if x)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"{type(self).__name__}({str(self)!r}, variables={self.variables!r})"

    def to_latex(self) -> str:
        if not self._terms:
            return "0"
        out = ""
        for n, (e, c) in enumerate(self.items()):
            mono = " ".join(_latex_var(v, x) for v, x in zip(self.variables, e) if x)
            coef = abs(c)
            body = mono if mono and coef == 1 else (f"{coef}{mono and ' ' + mono}" if mono else str(coef))
            if n == 0:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "terms": [[list(e), c] for e, c in self.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> LaurentPoly:
        terms: dict = {}
        for e, c in data["terms"]:
            terms[tuple(e)] = terms.get(tuple(e), 0) + int(c)
        if all(x >= 0 for e in terms for x in e):
            return IntPoly(data["variables"], terms)
        return LaurentPoly(data["variables"], terms)


def _latex_var(name: str, e: int) -> str:
    base = name
    if len(name) > 1 and name[0].isalpha() and not name[1:].isalpha():
        sub = name[1:].lstrip("_")
        base = f"{name[0]}_{{{sub}}}"
    return base if e == 1 else f"{base}^{{{e}}}"


class IntPoly(LaurentPoly):
    """Laurent polynomial whose exponents are all nonnegative."""

    __slots__ = ()

    def _check(self, terms):
        for e in terms:
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent {e} in IntPoly")


def laurent_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p + q


def laurent_sub(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p - q


def laurent_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p * q


def laurent_substitute(p: LaurentPoly, images: Mapping[str, LaurentPoly], target_variables=None) -> LaurentPoly:
    """Apply the ring map sending each variable of ``p`` to ``images[var]``.

    Variables used with a negative exponent must map to units (signed
    monomials). ``target_variables`` is only needed when ``p`` is a constant
    and no image fixes the target ring.
    """
    missing = [v for v in p.variables if v not in images]
    if missing:
        raise KeyError(f"no image for {missing}")
    if target_variables is None:
        imgs = [images[v] for v in p.variables]
        if imgs:
            target_variables = imgs[0].variables
        else:
            raise ValueError("cannot infer target variables")
    target_variables = tuple(target_variables)
    imgs = []
    for v in p.variables:
        im = images[v]
        if isinstance(im, int):
            im = IntPoly.constant(im, target_variables)
        if im.variables != target_variables:
            raise VariableMismatch(f"image of {v} lives in {im.variables}")
        imgs.append(im)
    cache: dict[tuple[int, int], LaurentPoly] = {}

    def power(i, k):
        if (i, k) not in cache:
            if k < 0 and not imgs[i].is_unit():
                raise NonInvertibleImage(f"{p.variables[i]} appears with exponent {k} but maps to {imgs[i]}")
            cache[(i, k)] = imgs[i] ** k
        return cache[(i, k)]

    acc: dict = {}
    all_int = type(p) is IntPoly and all(type(im) is IntPoly for im in imgs)
    for e, c in p._terms.items():
        term = LaurentPoly.constant(c, target_variables)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
                if term.is_zero():
                    break
        for te, tc in term._terms.items():
            acc[te] = acc.get(te, 0) + tc
    if all_int:
        return IntPoly(target_variables, acc)
    return LaurentPoly(target_variables, acc)


# ---------------------------------------------------------------------------
# Fraction-free solving over Frac(Z[t^{+-1}])
# ---------------------------------------------------------------------------


def _div_exact(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    r = p.exact_divide(q)
    if r is None:
        raise ArithmeticError(f"inexact division {p} / {q} inside Bareiss elimination")
    return r


def solve_over_laurent_fraction_field(A: Sequence[Sequence[LaurentPoly]], b: Sequence[LaurentPoly]) -> list[LaurentPoly]:
    """Solve ``A x = b`` for a square Laurent matrix by Bareiss elimination.

    Raises Singular when ``det A == 0`` and NotInRing when the unique
    solution has a non-Laurent entry.
    """
    n = len(A)
    if any(len(r) != n for r in A) or len(b) != n:
        raise ValueError("A must be square and match b")
    if n == 0:
        return []
    variables = b[0].variables
    M = [list(A[i]) + [b[i]] for i in range(n)]
    prev = LaurentPoly.one(variables)
    for k in range(n):
        if M[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if swap is None:
                raise Singular("matrix is singular over the fraction field")
            M[k], M[swap] = M[swap], M[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                M[i][j] = _div_exact(M[i][j] * M[k][k] - M[i][k] * M[k][j], prev)
            M[i][k] = LaurentPoly.zero(variables)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    # X = det * x is integral (adjugate); back substitution divides exactly
    X: list[LaurentPoly] = [LaurentPoly.zero(variables)] * n
    for i in range(n - 1, -1, -1):
        acc = det * M[i][n]
        for j in range(i + 1, n):
            acc = acc - M[i][j] * X[j]
        X[i] = _div_exact(acc, M[i][i])
    out = []
    for Xi in X:
        q = Xi.exact_divide(det)
        if q is None:
            raise NotInRing(X, det)
        out.append(q)
    return out
