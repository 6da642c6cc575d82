"""Single exponential sums: from character sums to an L-polynomial.

Run with ``python notebooks/01_fiber_polynomials.py``.
"""

from toricfam import (
    FieldTower,
    LaurentPoly,
    exp_sum,
    fiber_lpoly,
    hodge_basis,
    hodge_polygon,
    is_nondegenerate,
    newton_data,
    newton_polygon,
)

# The Kloosterman sum x + 1/x over F_3. Its Newton polytope is [-1, 1],
# so the L-polynomial should have degree 1! * vol = 2.
t3 = FieldTower(3)
klo = LaurentPoly(1, {(1,): 1, (-1,): 1}, t3)
print("Newton polytope vertices:", newton_data(klo).delta.vertices)
print("nondegenerate:", is_nondegenerate(klo))

# Character sums are elements of Z[zeta_3], printed on the basis 1, zeta.
for r in (1, 2, 3):
    print(f"S_{r} =", exp_sum(klo, r).to_list())

P = fiber_lpoly(klo, 2)
print("L-polynomial coefficients:", P.to_lists())  # 1 - T + 3T^2

# Newton polygon from 3-adic orders; Hodge polygon from the monomial basis
# of the graded Jacobian quotient. Here the two agree.
B = hodge_basis(klo)
print("basis:", B.monomials, "weights:", [str(w) for w in B.weights])
print("Newton slopes:", [str(s) for s in newton_polygon(P, 3).slopes])
print("Hodge slopes: ", [str(s) for s in hodge_polygon(B).slopes])

# x^3 over F_5: three basis monomials of weights 0, 1/3, 2/3. The Newton
# polygon sits on or above the Hodge polygon; with p = 2 mod 3 it is
# strictly above in the middle.
t5 = FieldTower(5)
cube = LaurentPoly(1, {(3,): 1}, t5)
P = fiber_lpoly(cube, 3)
NP, HP = newton_polygon(P, 5), hodge_polygon(hodge_basis(cube))
print("x^3 over F_5:", P.to_lists())
print("  Newton vertices:", NP.to_rows())
print("  Hodge vertices: ", HP.to_rows())
print("  Newton on or above Hodge:", NP.lies_on_or_above(HP))

# In characteristic 3 the same polynomial is degenerate: 3x^3 vanishes.
print("x^3 over F_3:", is_nondegenerate(LaurentPoly(1, {(3,): 1}, t3)))
