import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import PAIR_FILES, cp1_cohom_base, cp1_k_base, load, load_base_file, random_laurent, random_poly
from torman.baserings import BaseCohomRing, BaseKRing, split_base
from torman.bundlerings import (
    FuelExhausted,
    build_R,
    build_RK,
    emit_conjecture_SJ,
    face_acyclic_ring,
    fuel,
    graded_coordinates_R,
    multiply_R,
    pair_to_poset_poly,
    reduce_R,
    reduce_RK,
    verify_rank_R,
    verify_rank_RK,
)
from torman.charpair import GeneralFacePoset
from torman.exactalg import IntPoly, LaurentPoly
from torman.facering import cohomology_presentation, graded_rank_and_basis, linear_form, reduce_H, standard_basis
from torman.kfacering import TruncatedKRing, augment_to_KX, default_rt_basis, k_presentation, rt_decompose

PAIRS = {name.split(".")[0]: load(name) for name in PAIR_FILES}
CP1 = PAIRS["cp1"]
S4 = load("s4.poset.json")


def var(name, variables):
    return LaurentPoly.var(name, variables)


def test_build_R_cp1_over_cp1():
    B = cp1_cohom_base(1)
    assert build_R(CP1, B).relation_strings() == ["x1*x2", "x1 - x2 - t"]


@pytest.mark.parametrize("name", list(PAIRS))
def test_build_R_over_point_is_fiber_presentation(name):
    pair = PAIRS[name]
    pt = BaseCohomRing.point(pair.n)
    assert build_R(pair, pt).relation_strings() == cohomology_presentation(pair).relation_strings()


def test_reduce_R_examples():
    B = cp1_cohom_base(1)
    V = CP1.x_names + B.variables
    x1, x2 = var("x1", V), var("x2", V)
    t, one = (0, 1), (1, 0)
    assert reduce_R(CP1, B, x1).coefficients == {(0, 0): t, (0, 1): one}
    assert str(reduce_R(CP1, B, x1)) == "(t)*1 + (1)*x2"
    assert reduce_R(CP1, B, x1 * x2).is_zero()
    assert reduce_R(CP1, B, x2 * x2).coefficients == {(0, 0): (0, 0), (0, 1): (0, -1)}
    assert reduce_R(CP1, B, x1 * x1).coefficients == {(0, 0): (0, 0), (0, 1): (0, 1)}
    other = reduce_R(CP1, B, x2, basis=[(0, 0), (1, 0)])
    assert other.coefficients == {(0, 0): (0, -1), (1, 0): one}


def test_multiply_R():
    B = cp1_cohom_base(1)
    V = CP1.x_names + B.variables
    a = reduce_R(CP1, B, var("x1", V))
    b = reduce_R(CP1, B, var("x2", V))
    assert multiply_R(CP1, B, a, b).is_zero()
    assert multiply_R(CP1, B, a, a) == reduce_R(CP1, B, var("x1", V) ** 2)
    unit = reduce_R(CP1, B, LaurentPoly.one(V))
    assert multiply_R(CP1, B, unit, a) == a


def _bases():
    out = []
    for name, pair in PAIRS.items():
        out.append((name, BaseCohomRing.point(pair.n)))
        out.append((name, cp1_cohom_base(pair.n)))
        out.append((name, BaseCohomRing.projective_space(2, list(range(1, pair.n + 1)), "w")))
    return out


@pytest.mark.parametrize("name,base", _bases(), ids=lambda v: v if isinstance(v, str) else f"rank{v.rank}")
def test_rank_R(name, base):
    pair = PAIRS[name]
    rep = verify_rank_R(pair, base)
    assert rep.ok and rep.rank == base.rank * len(pair.vertices)


@pytest.mark.parametrize("name,base", _bases(), ids=lambda v: v if isinstance(v, str) else f"rank{v.rank}")
def test_character_relations_vanish_in_R(name, base):
    pair = PAIRS[name]
    V = pair.x_names + base.variables
    for u in standard_basis(pair.n):
        rel = linear_form(pair, u).embed(V) - base.to_poly(base.char_class(u), V)
        assert reduce_R(pair, base, rel).is_zero()


@pytest.mark.parametrize("name,base", _bases(), ids=lambda v: v if isinstance(v, str) else f"rank{v.rank}")
@pytest.mark.parametrize("seed", range(3))
def test_reduce_R_agrees_with_graded_presentation(name, base, seed):
    pair = PAIRS[name]
    rng = random.Random(seed)
    V = pair.x_names + base.variables
    p = random_poly(rng, V, terms=5, hi=2)
    nf = reduce_R(pair, base, p)
    assert graded_coordinates_R(pair, base, p - nf.to_poly()) == {}
    assert reduce_R(pair, base, nf.to_poly()) == nf


@pytest.mark.parametrize("name", list(PAIRS))
@given(seed=st.integers(0, 10**6))
def test_reduce_R_is_base_linear(name, seed):
    pair = PAIRS[name]
    B = cp1_cohom_base(pair.n)
    V = pair.x_names + B.variables
    rng = random.Random(seed)
    p, q = random_poly(rng, V, hi=2), random_poly(rng, V, hi=2)
    t = var("t", V)
    assert reduce_R(pair, B, p + q) == reduce_R(pair, B, p) + reduce_R(pair, B, q)
    assert reduce_R(pair, B, t * p) == reduce_R(pair, B, p).scale((0, 1))


@pytest.mark.parametrize("name", list(PAIRS))
@pytest.mark.parametrize("seed", range(5))
def test_point_base_matches_fiber_normal_form(name, seed):
    pair = PAIRS[name]
    pt = BaseCohomRing.point(pair.n)
    p = random_poly(random.Random(seed), pair.x_names, terms=5, hi=3)
    nf = reduce_R(pair, pt, p)
    expected = reduce_H(pair, p)
    assert {b: v[0] for b, v in nf.coefficients.items() if v[0]} == expected


def test_fuel_override(monkeypatch):
    B = cp1_cohom_base(1)
    assert fuel(1, B) == 6
    monkeypatch.setenv("TORMAN_FUEL", "0")
    V = CP1.x_names + B.variables
    with pytest.raises(FuelExhausted):
        reduce_R(CP1, B, var("x1", V))
    assert reduce_R(CP1, B, LaurentPoly.one(V)).coefficients[(0, 0)] == (1, 0)


# ---------------------------------------------------------------------------
# K-theory
# ---------------------------------------------------------------------------


def test_build_RK_cp1_over_cp1():
    K = cp1_k_base(1)
    assert build_RK(CP1, K).relation_strings() == ["y1*y2 - y1 - y2 + 1", "-s + y1*y2^-1 - 1"]


@pytest.mark.parametrize("name", list(PAIRS))
def test_build_RK_over_point_is_fiber_presentation(name):
    pair = PAIRS[name]
    assert build_RK(pair, BaseKRing.point(pair.n)).relation_strings() == k_presentation(pair).relation_strings()


def test_reduce_RK_examples():
    K = cp1_k_base(1)
    V = CP1.y_names + K.variables
    y1, y2 = var("y1", V), var("y2", V)
    one, b = default_rt_basis(CP1).elements
    # y1 = (1 + s) y2 and y2 = 1 - (1 - y2)
    assert reduce_RK(CP1, K, y2).coefficients == {one: (1, 0), b: (-1, 0)}
    assert reduce_RK(CP1, K, y1).coefficients == {one: (1, 1), b: (-1, -1)}
    assert reduce_RK(CP1, K, y1 * y2.inverse() - 1 - var("s", V)).is_zero()
    assert reduce_RK(CP1, K, (1 - y1) * (1 - y2)).is_zero()


@pytest.mark.parametrize("name", list(PAIRS))
def test_rank_RK(name):
    pair = PAIRS[name]
    for base in [BaseKRing.point(pair.n), cp1_k_base(pair.n)]:
        rep = verify_rank_RK(pair, base)
        assert rep.ok and rep.rank == base.rank * len(pair.vertices)


@pytest.mark.parametrize("name", list(PAIRS))
@pytest.mark.parametrize("seed", range(3))
def test_reduce_RK_agrees_with_truncation(name, seed):
    pair = PAIRS[name]
    K = cp1_k_base(pair.n)
    V = pair.y_names + K.variables
    rng = random.Random(seed)
    p = random_laurent(rng, pair.y_names, terms=3, lo=-1, hi=1).embed(V) * (1 + var("s", V) * rng.randint(-2, 2))
    nf = reduce_RK(pair, K, p)
    T = TruncatedKRing(pair, K)
    diff = p - nf.to_poly()
    assert T.coordinates(split_base(diff, K, pair.y_names)) == {}
    assert reduce_RK(pair, K, nf.to_poly()) == nf


@pytest.mark.parametrize("name", list(PAIRS))
@pytest.mark.parametrize("seed", range(4))
def test_point_base_K_matches_augmentation(name, seed):
    pair = PAIRS[name]
    pt = BaseKRing.point(pair.n)
    p = random_laurent(random.Random(seed), pair.y_names, terms=4)
    nf = reduce_RK(pair, pt, p)
    aug = augment_to_KX(pair, rt_decompose(pair, p))
    assert {b: v[0] for b, v in nf.coefficients.items() if v[0]} == {b: c for b, c in aug.items() if c}


# ---------------------------------------------------------------------------
# face-acyclic orbit spaces
# ---------------------------------------------------------------------------


def test_s4_relations_and_note():
    R = face_acyclic_ring(S4, load_base_file("cp1.base.json"))
    pres = R.presentation()
    assert pres.relation_strings() == ["x_G*x_H - x_a - x_b", "x_a*x_b", "x_G", "x_H - t"]
    assert any("codim" in n for n in pres.notes)
    assert R.graded_ranks == [1, 0, 1, 0, 1, 0, 1]
    assert R.total_rank == 4


def test_s4_over_point():
    R = face_acyclic_ring(S4, BaseCohomRing.point(2))
    assert R.graded_ranks == [1, 0, 0, 0, 1]
    xa = IntPoly.var("x_a", R.variables)
    xb = IntPoly.var("x_b", R.variables)
    assert R.reduce(xa) == {k: -c for k, c in R.reduce(xb).items()}
    assert R.reduce(xa * xb) == {}


@pytest.mark.parametrize("name", ["cp1", "cp2", "cp1xcp1", "hirzebruch1"])
def test_homology_polytope_poset_agrees_with_pair(name):
    pair = PAIRS[name]
    poset = GeneralFacePoset.from_pair(pair)
    for base in [BaseCohomRing.point(pair.n), cp1_cohom_base(pair.n)]:
        R = face_acyclic_ring(poset, base)
        assert R.total_rank == verify_rank_R(pair, base).rank
        ranks = R.graded_ranks
        expected = verify_rank_R(pair, base).graded_ranks
        assert ranks == [expected.get(D, 0) for D in range(len(ranks))]
        rng = random.Random(name)
        V = pair.x_names + base.variables
        for _ in range(4):
            p = random_poly(rng, V, terms=4, hi=2)
            nf = reduce_R(pair, base, p)
            lhs = R.reduce(pair_to_poset_poly(pair, poset, p, base))
            rhs = R.reduce(pair_to_poset_poly(pair, poset, nf.to_poly(), base))
            assert lhs == rhs


def test_emit_conjecture_is_labelled():
    pres = emit_conjecture_SJ(S4, cp1_k_base(2))
    assert "CONJECTURAL" in pres.title
    assert any("CONJECTURAL" in n for n in pres.notes)
    assert pres.to_json()["extras"]["status"] == "CONJECTURAL"
    assert "x_G*x_H - x_a - x_b" in pres.relation_strings()


@pytest.mark.parametrize("name", ["cp1", "cp2", "cp1xcp1", "hirzebruch1"])
def test_emit_conjecture_matches_build_RK_on_homology_polytopes(name):
    """Under x_{Q_i} = 1 - y_i the character family matches up to the unit prod y^{-a} over negative pairings."""
    pair = PAIRS[name]
    poset = GeneralFacePoset.from_pair(pair)
    for base in [BaseKRing.point(pair.n), cp1_k_base(pair.n)]:
        emitted = emit_conjecture_SJ(poset, base)
        target = pair.y_names + base.variables
        images = {poset.x_name(f.id): LaurentPoly.one(target) for f in poset.faces}
        for i, y in enumerate(pair.y_names, start=1):
            images[poset.x_name(f"F{i}")] = 1 - var(y, target)
        for v in base.variables:
            images[v] = var(v, target)
        got = [r.embed(tuple(emitted.generators) + base.variables).substitute(images, target) for r in emitted.family("ii")]
        want = build_RK(pair, base).family("ii")
        assert len(got) == len(want)
        for u, g, w in zip(standard_basis(pair.n), got, want):
            unit = LaurentPoly.one(target)
            for j, row in enumerate(pair.lam, start=1):
                a = sum(p * q for p, q in zip(u, row))
                if a < 0:
                    unit = unit * var(f"y{j}", target) ** (-a)
            assert g == w.embed(target) * unit


def test_graded_basis_used_by_point_base():
    for pair in PAIRS.values():
        pt = BaseCohomRing.point(pair.n)
        nf = reduce_R(pair, pt, LaurentPoly.one(pair.x_names))
        assert nf.basis == tuple(graded_rank_and_basis(pair).monomials)
