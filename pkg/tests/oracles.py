"""Independent reference computations used to check the library."""

import itertools
from fractions import Fraction
from math import comb, gcd

from torman.exactalg import IntPoly, LaurentPoly


def determinantal_divisors(rows):
    """Elementary divisors from gcds of k x k minors (d_k = D_k / D_{k-1})."""
    m, n = len(rows), len(rows[0]) if rows else 0

    def det(M):
        M = [[Fraction(x) for x in r] for r in M]
        k, sign, out = len(M), 1, Fraction(1)
        for c in range(k):
            p = next((r for r in range(c, k) if M[r][c]), None)
            if p is None:
                return 0
            if p != c:
                M[c], M[p] = M[p], M[c]
                sign = -sign
            out *= M[c][c]
            for r in range(c + 1, k):
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
        return int(sign * out)

    D = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in itertools.combinations(range(m), k):
            for cs in itertools.combinations(range(n), k):
                g = gcd(g, det([[rows[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        D.append(g)
    return [D[k] // D[k - 1] for k in range(1, len(D))]


def h_vector(pair):
    """h-vector of the nerve from its f-vector; equals the even Betti numbers."""
    n = pair.n
    f = [0] * (n + 1)
    for s in pair.simplices:
        f[len(s)] += 1
    return [sum((-1) ** (i - k) * comb(n - k, i - k) * f[k] for k in range(i + 1)) for i in range(n + 1)]


def evaluate(p: LaurentPoly, point):
    """Value at a point with nonzero rational coordinates."""
    total = Fraction(0)
    for e, c in p.terms.items():
        v = Fraction(c)
        for x, k in zip(point, e):
            v *= Fraction(x) ** k
        total += v
    return total


def gkm_restrictions(pair, p):
    """Localisations of a cohomology class at every vertex (x_i -> u_i or 0)."""
    from torman.charpair import dual_vectors

    out = {}
    for a in pair.vertices:
        u = dual_vectors(pair, a)
        images = {}
        for i, name in enumerate(pair.x_names, start=1):
            if i in u:
                images[name] = IntPoly(pair.t_names, {tuple(int(j == k) for j in range(pair.n)): c for k, c in enumerate(u[i]) if c})
            else:
                images[name] = IntPoly.zero(pair.t_names)
        out[a] = p.embed(pair.x_names).substitute(images, pair.t_names)
    return out


def integrate(pair, p, taus=((3, 7, 11), (5, -2, 13))):
    """Top-degree integral by localisation: sum_a p|_a / prod_{i in a} u_i.

    Evaluated at generic rational points; agreement across points is
    checked, since a wrong answer would depend on the point.
    """
    from torman.charpair import dual_vectors

    top = {e: c for e, c in p.embed(pair.x_names).terms.items() if sum(e) == pair.n}
    q = IntPoly(pair.x_names, top)
    values = set()
    for tau in taus:
        tau = [Fraction(x) for x in tau[: pair.n]]
        total = Fraction(0)
        for a, r in gkm_restrictions(pair, q).items():
            u = dual_vectors(pair, a)
            euler = Fraction(1)
            for i in a:
                euler *= sum(c * x for c, x in zip(u[i], tau))
            total += evaluate(r, tau) / euler
        values.add(total)
    if len(values) != 1:
        raise AssertionError(f"localisation sum depends on the point: {values}")
    (v,) = values
    assert v.denominator == 1
    return int(v)


def same_class(pair, p, q, basis):
    """Equality in H*(X) through the Poincare pairing against ``basis``."""
    d = p - q
    return all(integrate(pair, d * IntPoly.monomial(b, pair.x_names)) == 0 for b in basis)
