"""Two conventions that matter for families over the affine line.

Both are checked here on families whose L-functions can be worked out by hand.
"""

from toricfam import FamilySpec, FieldTower, TensorPow, Sym, euler_series, ord_p, reconstruct
from toricfam.family import affine_base_bounds, gamma_family
from toricfam.toric import newton_data

# 1. Setting t = 0 in x + t leaves a family with no deformation, whose
#    relative polytope is the single point {0}. Its volume, measured in the
#    lattice of the zero subspace, is 1. The lower end of the degree window
#    depends on it.
lin = FamilySpec(FieldTower(2), 1, 1, {(1,): 1}, [(((1,), (0,)), 1)], base="affine")
rep = affine_base_bounds(gamma_family(lin), TensorPow(2), 1, 1)
print("volumes by zeroed parameter set:", rep["volumes_by_A"])
print("degree window:", [str(x) for x in rep["degree_window_scaled"]])

# S(t) = -Theta(t), so the sum of S(t)^2 over t is q and L = 1 / (1 - qT).
rf = reconstruct(euler_series(lin, TensorPow(2), 6), 3, 3)
print("x + t, TensorPow(2): R - S =", rf.R - rf.S)

# 2. With affine fibers, x^3 + t x on A^1 x A^1 has
#    L(Sym(1)) = 1 - 2T: only x = 0 survives the sum over t.
cub = FamilySpec(FieldTower(2), 1, 1, {(3,): 1}, [(((1,), (1,)), 1)], base="affine", fiber_space="affine")
delta = newton_data(cub.f).delta
rep = affine_base_bounds(gamma_family(cub), Sym(1), 3, 1, delta=delta, N_affine=2)
ser = euler_series(cub, Sym(1), 6)
print("affine fibers, Sym(1) series:", [c.num.to_list()[0] for c in ser.coeffs])
print("ord_2 of c_1:", ord_p(ser.coeffs[1], 2).value)
print("floor scaled by |L| N~:", rep["affine_fiber_floor_as_stated"])
print("floor scaled by |L|:   ", rep["affine_fiber_floor"])
