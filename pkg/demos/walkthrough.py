"""A tour of the library on the bundled fixtures.

    python demos/walkthrough.py
"""

from importlib import resources

from torman import (
    BaseCohomRing,
    BaseKRing,
    build_R,
    build_RK,
    default_rt_basis,
    face_acyclic_ring,
    graded_rank_and_basis,
    k_presentation,
    load_input,
    phi,
    reduce_KX,
    reduce_R,
    validate,
)
from torman.exactalg import LaurentPoly

DATA = resources.files("torman") / "data"


def banner(title):
    print(f"\n== {title}")


def main():
    cp2 = load_input(str(DATA / "cp2.pair.json"))
    f1 = load_input(str(DATA / "hirzebruch1.fan.json"))

    banner("validation")
    for pair in (cp2, f1):
        print(validate(pair).summary())

    banner("cohomology of the Hirzebruch surface")
    gb = graded_rank_and_basis(f1)
    print("graded ranks:", gb.ranks)
    print("monomial basis:", ", ".join(str(b) for b in gb.as_polys()))

    banner("K-ring of CP^2")
    print(k_presentation(cp2).to_text())
    print("RT-basis:", ", ".join(str(b) for b in default_rt_basis(cp2).elements))
    y1 = LaurentPoly.var("y1", cp2.y_names)
    p = (1 - y1) ** 3
    print(f"{p}  restricts to  {phi(cp2, p)}")
    print("augmented coordinates:", {str(b): c for b, c in reduce_KX(cp2, p).items() if c})

    banner("CP^2 bundle over CP^1")
    base = BaseCohomRing.projective_space(1, [0, 1])
    print(build_R(cp2, base).to_text())
    V = cp2.x_names + base.variables
    x1 = LaurentPoly.var("x1", V)
    print("x1^2 ->", reduce_R(cp2, base, x1 * x1))

    kbase = BaseKRing.projective_space(1, [0, 1])
    print(build_RK(cp2, kbase).to_text())

    banner("S^4 over a point and over CP^1")
    s4 = load_input(str(DATA / "s4.poset.json"))
    print("over a point:", face_acyclic_ring(s4, BaseCohomRing.point(2)).graded_ranks)
    ring = face_acyclic_ring(s4, base)
    print(ring.presentation().to_text())
    print("graded ranks:", ring.graded_ranks)


if __name__ == "__main__":
    main()
