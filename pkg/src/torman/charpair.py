"""Characteristic pairs, fans and general face posets.

A :class:`CharacteristicPair` stores the orbit-space combinatorics as the
nerve of the facets (a simplicial complex on ``1..d``) together with the
``d x n`` matrix whose rows are the circle directions of the facets.
Faces are sorted tuples of facet indices; the empty tuple is ``Q`` itself.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from pathlib import Path
from typing import Mapping, Sequence

from .exactalg import IntMatrix, bareiss_det, snf, unimodular_inverse

Face = tuple[int, ...]


class InvalidInput(ValueError):
    """Input data violates a structural requirement."""


class NonUnimodularVertex(InvalidInput):
    pass


class NonSmoothCone(InvalidInput):
    pass


class RidgePairingFailure(InvalidInput):
    pass


@dataclass
class ValidationReport:
    valid: bool
    n_vertices: int
    problems: list[str] = field(default_factory=list)
    bad_vertices: dict[Face, int] = field(default_factory=dict)

    def summary(self) -> str:
        if self.valid:
            return f"valid, {self.n_vertices} vertices, χ={self.n_vertices}"
        return "invalid: " + "; ".join(self.problems)

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "vertices": self.n_vertices,
            "euler_characteristic": self.n_vertices if self.valid else None,
            "problems": self.problems,
            "bad_vertices": [{"vertex": list(v), "det": d} for v, d in self.bad_vertices.items()],
        }


@dataclass(frozen=True)
class CharacteristicPair:
    n: int
    lam: tuple[tuple[int, ...], ...]
    nerve_maximal: tuple[Face, ...]
    facet_names: tuple[str, ...] = ()

    def __post_init__(self):
        lam = tuple(tuple(int(x) for x in row) for row in self.lam)
        object.__setattr__(self, "lam", lam)
        mx = tuple(sorted({tuple(sorted(set(int(i) for i in s))) for s in self.nerve_maximal}))
        object.__setattr__(self, "nerve_maximal", mx)
        if not self.facet_names:
            object.__setattr__(self, "facet_names", tuple(f"Q{i}" for i in range(1, len(lam) + 1)))
        if len(self.facet_names) != len(lam):
            raise InvalidInput("facet_names and lambda disagree on the facet count")
        for row in lam:
            if len(row) != self.n:
                raise InvalidInput(f"lambda row {row} does not have length n={self.n}")
        for s in mx:
            for i in s:
                if not 1 <= i <= len(lam):
                    raise InvalidInput(f"nerve mentions facet {i} outside 1..{len(lam)}")

    @property
    def d(self) -> int:
        return len(self.lam)

    @property
    def x_names(self) -> tuple[str, ...]:
        return tuple(f"x{i}" for i in range(1, self.d + 1))

    @property
    def y_names(self) -> tuple[str, ...]:
        return tuple(f"y{i}" for i in range(1, self.d + 1))

    @property
    def t_names(self) -> tuple[str, ...]:
        return tuple(f"t{j}" for j in range(1, self.n + 1))

    def v(self, i: int) -> tuple[int, ...]:
        """Circle direction of facet ``i`` (1-based)."""
        return self.lam[i - 1]

    def pairing(self, u: Sequence[int], i: int) -> int:
        return sum(a * b for a, b in zip(u, self.lam[i - 1]))

    @cached_property
    def simplices(self) -> frozenset[Face]:
        out = set()
        for s in self.nerve_maximal:
            for k in range(len(s) + 1):
                out.update(itertools.combinations(s, k))
        return frozenset(out)

    def is_face(self, s) -> bool:
        return tuple(sorted(s)) in self.simplices

    @cached_property
    def vertices(self) -> tuple[Face, ...]:
        return tuple(sorted(s for s in self.simplices if len(s) == self.n))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "facets": list(self.facet_names),
            "nerve_maximal": [list(s) for s in self.nerve_maximal],
            "lambda": [list(r) for r in self.lam],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> CharacteristicPair:
        try:
            lam = data["lambda"]
            return cls(
                n=int(data["n"]),
                lam=lam,
                nerve_maximal=data["nerve_maximal"],
                facet_names=tuple(data.get("facets") or ()),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed characteristic pair: {exc}") from exc


def _primitive(row) -> bool:
    g = 0
    for x in row:
        g = gcd(g, x)
    return g == 1


def _extends_to_basis(rows) -> bool:
    if not rows:
        return True
    res = snf(rows, transforms=False)
    return all(d == 1 for d in res.diag) and len(res.diag) == len(rows)


def validate(pair: CharacteristicPair) -> ValidationReport:
    problems: list[str] = []
    bad: dict[Face, int] = {}
    if pair.d == 0:
        problems.append("no facets")
    if pair.n < 1:
        problems.append("torus rank must be positive")
    for i in range(1, pair.d + 1):
        if (i,) not in pair.simplices:
            problems.append(f"facet {i} is not a vertex of the nerve")
        if not _primitive(pair.v(i)):
            problems.append(f"v{i}={pair.v(i)} is not primitive")
    for s in pair.nerve_maximal:
        if len(s) > pair.n:
            problems.append(f"simplex {list(s)} has more than n={pair.n} facets")
    verts = pair.vertices if pair.n >= 1 else ()
    if not verts:
        problems.append("no vertices (fixed point set would be empty)")
    for a in verts:
        det = bareiss_det([pair.v(i) for i in a])
        if abs(det) != 1:
            bad[a] = det
            problems.append(f"vertex {list(a)} has determinant {det}")
    for s in pair.nerve_maximal:
        if len(s) < pair.n and not _extends_to_basis([pair.v(i) for i in s]):
            problems.append(f"directions at face {list(s)} are not part of a lattice basis")
    return ValidationReport(not problems, len(verts), problems, bad)


def vertices(pair: CharacteristicPair) -> list[Face]:
    return list(pair.vertices)


def euler_characteristic(pair: CharacteristicPair) -> int:
    return len(pair.vertices)


def join(a: Sequence[int], b: Sequence[int]) -> Face:
    """Minimal face containing both faces: the common facets."""
    return tuple(sorted(set(a) & set(b)))


def face_contains(big: Sequence[int], small: Sequence[int]) -> bool:
    """Whether face ``small`` lies inside face ``big`` (fewer facets = bigger face)."""
    return set(big) <= set(small)


def dual_basis_at_vertex(pair: CharacteristicPair, a: Sequence[int]) -> IntMatrix:
    """Rows ``u_{i_j}`` with ``<u_{i_j}, v_{i_k}> = delta_jk`` for ``a = (i_1 < ... < i_n)``."""
    a = tuple(sorted(a))
    if len(a) != pair.n:
        raise InvalidInput(f"{list(a)} is not a vertex")
    V = [pair.v(i) for i in a]
    det = bareiss_det(V)
    if abs(det) != 1:
        raise NonUnimodularVertex(f"vertex {list(a)} has determinant {det}")
    return unimodular_inverse(V).transpose()


def dual_vectors(pair: CharacteristicPair, a: Sequence[int]) -> dict[int, tuple[int, ...]]:
    U = dual_basis_at_vertex(pair, a).to_rows()
    return {i: tuple(U[j]) for j, i in enumerate(sorted(a))}


# ---------------------------------------------------------------------------
# Fans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fan:
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[Face, ...]
    complete: bool = True

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        object.__setattr__(self, "max_cones", tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones))

    @property
    def dim(self) -> int:
        return len(self.rays[0]) if self.rays else 0

    @classmethod
    def from_json(cls, data: Mapping) -> Fan:
        try:
            return cls(data["rays"], data["max_cones"], bool(data.get("complete", True)))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed fan: {exc}") from exc

    def to_json(self) -> dict:
        return {"rays": [list(r) for r in self.rays], "max_cones": [list(c) for c in self.max_cones], "complete": self.complete}


def check_fan(fan: Fan) -> None:
    n = fan.dim
    if not fan.complete:
        raise InvalidInput("fan is not declared complete")
    for r in fan.rays:
        if len(r) != n:
            raise InvalidInput("rays have inconsistent dimension")
        if not _primitive(r):
            raise NonSmoothCone(f"ray {r} is not primitive")
    for c in fan.max_cones:
        if len(c) != n:
            raise NonSmoothCone(f"maximal cone {list(c)} does not have {n} rays")
        if any(not 1 <= i <= len(fan.rays) for i in c):
            raise InvalidInput(f"cone {list(c)} refers to a missing ray")
        det = bareiss_det([fan.rays[i - 1] for i in c])
        if abs(det) != 1:
            raise NonSmoothCone(f"cone {list(c)} has determinant {det}")
    ridges: dict[Face, int] = {}
    for c in fan.max_cones:
        for r in itertools.combinations(c, n - 1):
            ridges[r] = ridges.get(r, 0) + 1
    for r, k in ridges.items():
        if k != 2:
            raise RidgePairingFailure(f"ridge {list(r)} lies in {k} maximal cones")


def from_fan(fan: Fan) -> CharacteristicPair:
    check_fan(fan)
    return CharacteristicPair(
        n=fan.dim,
        lam=fan.rays,
        nerve_maximal=fan.max_cones,
        facet_names=tuple(f"D{i}" for i in range(1, len(fan.rays) + 1)),
    )


# ---------------------------------------------------------------------------
# General face posets (face-acyclic orbit spaces)
# ---------------------------------------------------------------------------

Q_ID = "Q"


@dataclass(frozen=True)
class FaceRecord:
    id: str
    codim: int
    facets: tuple[str, ...]


class GeneralFacePoset:
    """Faces of a face-acyclic orbit space, with user-supplied join and meet tables.

    ``join[(G, H)]`` is the minimal face containing both (``"Q"`` allowed);
    ``meet[(G, H)]`` lists the connected components of ``G ∩ H``.
    Containment is read off the join table: ``E <= G`` iff ``join(E, G) == G``.
    """

    def __init__(self, n: int, faces: Sequence[FaceRecord], join_table, meet_table, lam: Mapping[str, Sequence[int]]):
        self.n = n
        self.faces = tuple(faces)
        self.by_id = {f.id: f for f in self.faces}
        if Q_ID in self.by_id:
            raise InvalidInput("the whole space Q is implicit; do not list it as a face")
        if len(self.by_id) != len(self.faces):
            raise InvalidInput("duplicate face ids")
        self._join: dict[frozenset, str] = {}
        for g, h, j in join_table:
            self._join[frozenset((g, h))] = j
        self._meet: dict[frozenset, tuple[str, ...]] = {}
        for g, h, comps in meet_table:
            self._meet[frozenset((g, h))] = tuple(comps)
        self.facets = tuple(f.id for f in self.faces if f.codim == 1)
        self.lam = {k: tuple(int(x) for x in v) for k, v in lam.items()}
        self._validate()

    def join(self, g: str, h: str) -> str:
        if g == h:
            return g
        if g == Q_ID or h == Q_ID:
            return Q_ID
        try:
            return self._join[frozenset((g, h))]
        except KeyError:
            raise InvalidInput(f"join table has no entry for ({g}, {h})") from None

    def meet_components(self, g: str, h: str) -> tuple[str, ...]:
        if g == h:
            return (g,)
        if g == Q_ID:
            return (h,)
        if h == Q_ID:
            return (g,)
        try:
            return self._meet[frozenset((g, h))]
        except KeyError:
            raise InvalidInput(f"meet table has no entry for ({g}, {h})") from None

    def leq(self, e: str, g: str) -> bool:
        """``e`` is contained in ``g``."""
        return self.join(e, g) == g

    def codim(self, f: str) -> int:
        return 0 if f == Q_ID else self.by_id[f].codim

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.faces if f.codim == self.n)

    def x_name(self, f: str) -> str:
        return f"x_{f}"

    def _validate(self):
        ids = [f.id for f in self.faces]
        known = set(ids) | {Q_ID}
        for f in self.faces:
            if not 1 <= f.codim <= self.n:
                raise InvalidInput(f"face {f.id} has codimension {f.codim} outside 1..{self.n}")
        for key, j in self._join.items():
            if j not in known or not key <= known:
                raise InvalidInput(f"join entry {sorted(key)} -> {j} mentions unknown faces")
        for key, comps in self._meet.items():
            if not set(comps) <= known or not key <= known:
                raise InvalidInput(f"meet entry {sorted(key)} mentions unknown faces")
        for g, h in itertools.combinations(ids, 2):
            j = self.join(g, h)
            self.meet_components(g, h)
            if self.codim(j) > min(self.codim(g), self.codim(h)):
                raise InvalidInput(f"join({g},{h})={j} is smaller than an argument")
        for g, h in itertools.combinations(ids, 2):
            j = self.join(g, h)
            for x in (g, h):
                if self.join(x, j) != j:
                    raise InvalidInput(f"join({g},{h})={j} does not contain {x}")
            for e in self.meet_components(g, h):
                if e == Q_ID or not (self.leq(e, g) and self.leq(e, h)):
                    raise InvalidInput(f"component {e} of {g}∩{h} is not contained in both")
        for f in self.facets:
            if f not in self.lam or len(self.lam[f]) != self.n:
                raise InvalidInput(f"facet {f} has no direction vector of length {self.n}")
        if not self.vertices:
            raise InvalidInput("poset has no vertices")

    @classmethod
    def from_json(cls, data: Mapping) -> GeneralFacePoset:
        try:
            faces = [FaceRecord(str(f["id"]), int(f["codim"]), tuple(f.get("facets", ()))) for f in data["faces"]]
            return cls(int(data["n"]), faces, data["join"], data["meet_components"], data["lambda"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"malformed face poset: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "faces": [{"id": f.id, "codim": f.codim, "facets": list(f.facets)} for f in self.faces],
            "join": [[*sorted(k), v] for k, v in self._join.items()],
            "meet_components": [[*sorted(k), list(v)] for k, v in self._meet.items()],
            "lambda": {k: list(v) for k, v in self.lam.items()},
        }

    @classmethod
    def from_pair(cls, pair: CharacteristicPair) -> GeneralFacePoset:
        """The face poset of a homology polytope (all prefaces connected)."""
        def fid(s):
            return "F" + "_".join(map(str, s))
        proper = sorted((s for s in pair.simplices if s), key=lambda s: (len(s), s))
        faces = [FaceRecord(fid(s), len(s), tuple(fid((i,)) for i in s)) for s in proper]
        joins, meets = [], []
        for s, t in itertools.combinations(proper, 2):
            j = join(s, t)
            joins.append([fid(s), fid(t), fid(j) if j else Q_ID])
            u = tuple(sorted(set(s) | set(t)))
            meets.append([fid(s), fid(t), [fid(u)] if pair.is_face(u) else []])
        lam = {fid((i,)): pair.v(i) for i in range(1, pair.d + 1)}
        return cls(pair.n, faces, joins, meets, lam)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def load_input(source) -> CharacteristicPair | GeneralFacePoset:
    """Load a pair, fan (converted to a pair) or face poset from JSON."""
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text())
    else:
        data = source
    if "rays" in data:
        return from_fan(Fan.from_json(data))
    if "faces" in data:
        return GeneralFacePoset.from_json(data)
    return CharacteristicPair.from_json(data)
