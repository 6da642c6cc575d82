"""Lattice-point tables W(j) and the lower bounds they give for Newton polygons."""

from fractions import Fraction

from toricfam import BoundProfile, FieldTower, LaurentPoly, build_polytope, dwork_np_lower_bound, hodge_basis, hodge_polygon

# The unit interval with a single basis column: every level j holds one
# lattice point, so the slopes are 0, 1, 2, ...
db = dwork_np_lower_bound(BoundProfile(Fraction(1), 1, [0], d=1), build_polytope([(1,)]), 2, j_max=6)
print("W:", db.W)
print("slopes:", [str(s) for s in db.polygon.slopes])

# The cubic family: Gamma = [0, 3/2] and fiber weights 0, 1/3, 2/3.
g = build_polytope([(Fraction(3, 2),)])
prof = BoundProfile.from_basis_weights(2, [0, Fraction(1, 3), Fraction(2, 3)])
db = dwork_np_lower_bound(prof, g, 2, j_max=9, k=3)
print("d =", db.d, "W:", db.W)
print("polygon vertices:", db.polygon.to_rows())
print("generic degree bound:", db.degree_bound, " total degree:", db.total_degree.to_json())

# With no parameters the table is just the basis weights, so the bound
# reproduces the Hodge polygon of the fiber.
f = LaurentPoly(2, {(1, 0): 1, (0, 1): 1, (-1, -1): 1}, FieldTower(5))
B = hodge_basis(f)
db = dwork_np_lower_bound(BoundProfile.from_basis_weights(5, B.weights), None, 5)
print("x + y + 1/(xy): table polygon == Hodge polygon:", db.polygon == hodge_polygon(B))
