from fractions import Fraction
from itertools import product

import pytest

from toricfam.arith import CycInt, ord_p
from toricfam.errors import DegreeViolation, PoleOnDomain
from toricfam.expsum import (
    LPolynomial,
    Mixed,
    NewtonPolygon,
    exp_sum,
    fiber_lpoly,
    hodge_polygon,
    newton_polygon,
    polygon_from_slopes,
)
from toricfam.ffield import FieldTower
from toricfam.toric import LaurentPoly, hodge_basis


def brute_sum(G, r, affine=()):
    """Oracle: evaluate G pointwise with field arithmetic, then apply the character."""
    t = G.tower
    lvl = G.level * r
    F = t.level(lvl)
    p = F.p
    acc = [0] * p
    axes = [range(F.order) if i in affine else range(1, F.order) for i in range(G.n)]
    for x in product(*axes):
        val = 0
        for mu, c in G.terms.items():
            term = int(t.embed(c, G.level, lvl))
            for xi, e in zip(x, mu):
                if e:
                    term = F.mul(term, F.pow(xi, e % (F.order - 1) if xi else e))
            val = F.add(val, term)
        acc[int(F.abs_trace[val])] += 1
    return CycInt.from_counts(p, acc)


def lp(p, terms, a=1):
    n = len(next(iter(terms)))
    return LaurentPoly(n, terms, FieldTower(p, a))


def test_sum_examples():
    assert exp_sum(lp(3, {(1,): 1})) == CycInt.from_int(3, -1)
    assert exp_sum(lp(3, {(1,): 1, (-1,): 1})) == CycInt.from_int(3, -1)
    zero = LaurentPoly(1, {}, FieldTower(3))
    assert exp_sum(zero, 2) == CycInt.from_int(3, 8)


@pytest.mark.parametrize(
    "p,a,terms,r,affine",
    [
        (3, 1, {(1,): 1, (-1,): 1}, 2, ()),
        (5, 1, {(3,): 2, (1,): 1}, 2, ()),
        (2, 1, {(1, 0): 1, (0, 1): 1, (-1, -1): 1}, 2, ()),
        (3, 1, {(2, 1): 1, (0, 1): 2}, 1, (0, 1)),
        (2, 2, {(3,): 3, (1,): 1}, 2, (0,)),
        (7, 1, {(1, 2): 3, (-1, 0): 1}, 1, ()),
    ],
)
def test_sum_matches_pointwise_oracle(p, a, terms, r, affine):
    G = lp(p, terms, a)
    space = Mixed(affine) if affine else "torus"
    assert exp_sum(G, r, space) == brute_sum(G, r, affine)


def test_pole_on_affine_domain():
    with pytest.raises(PoleOnDomain):
        exp_sum(lp(3, {(-1,): 1}), 1, "affine")


def test_lpoly_examples():
    assert fiber_lpoly(lp(3, {(1,): 1}), 1).to_lists() == [[1, 0], [-1, 0]]
    P = fiber_lpoly(lp(3, {(1,): 1, (-1,): 1}), 2)
    assert P.to_lists() == [[1, 0], [-1, 0], [3, 0]]
    P = fiber_lpoly(lp(5, {(3,): 1}), 3)
    assert P.degree == 3 and P.coeffs[0] == 1


def test_power_sums_equal_signed_char_sums():
    for G, N in [(lp(5, {(3,): 1}), 3), (lp(2, {(1, 0): 1, (0, 1): 1, (-1, -1): 1}), 3)]:
        P = fiber_lpoly(G, N)
        sign = (-1) ** G.n
        assert P.power_sums(len(P.char_sums)) == [s * sign for s in P.char_sums]


def test_wrong_degree_is_caught():
    with pytest.raises(DegreeViolation) as exc:
        fiber_lpoly(lp(3, {(1,): 1, (-1,): 1}), 1)
    assert exc.value.index >= 2


def test_lpolynomial_requires_unit_constant():
    with pytest.raises(ValueError):
        LPolynomial([CycInt.from_int(3, 2)])


def cyc(p, *cs):
    return [CycInt.from_int(p, c) for c in cs]


def test_newton_polygon_examples():
    assert newton_polygon(LPolynomial(cyc(3, 1, -1, 3)), 3).slopes == [0, 1]
    assert newton_polygon(LPolynomial(cyc(3, 1, -1)), 3).slopes == [0]
    assert newton_polygon(LPolynomial(cyc(5, 1, 5)), 5).slopes == [1]
    # q = 4: ord_q(4) = 1
    assert newton_polygon(LPolynomial(cyc(2, 1, 4)), 4).slopes == [1]


def test_hodge_polygon_examples():
    assert hodge_polygon(hodge_basis(lp(5, {(3,): 1}))).slopes == [0, Fraction(1, 3), Fraction(2, 3)]
    assert hodge_polygon(hodge_basis(lp(3, {(1,): 1, (-1,): 1}))).slopes == [0, 1]


def test_newton_above_hodge_for_cubic():
    G = lp(5, {(3,): 1})
    P = fiber_lpoly(G, 3)
    NP, HP = newton_polygon(P, 5), hodge_polygon(hodge_basis(G))
    assert NP.lies_on_or_above(HP)
    assert NP.extent == HP.extent == 3
    assert NP.vertices[-1][1] == HP.vertices[-1][1]  # both end at ord(q^N/2)


def test_polygon_helpers():
    poly = polygon_from_slopes([1, 0, Fraction(1, 2), Fraction(1, 2)])
    assert poly.slopes == [0, Fraction(1, 2), Fraction(1, 2), 1]
    assert poly.value_at(2) == Fraction(1, 2)
    low = NewtonPolygon.lower_hull([(0, 0), (1, 5), (2, 1)])
    assert low.vertices == ((0, 0), (2, 1))
    assert poly.lies_on_or_above(polygon_from_slopes([0, 0, 0, 0]))
    assert not polygon_from_slopes([0, 0, 0, 0]).lies_on_or_above(poly)
