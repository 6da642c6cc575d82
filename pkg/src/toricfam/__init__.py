"""toricfam: exact character sums over finite-field tori and L-functions
of toric exponential-sum families.

The main entry points are re-exported here; see the submodules for the rest.
"""

from .arith import CycInt, CycRat, PadicVal, Rat, cyc_norm, ord_p
from .errors import ToricError
from .euler import LSeries, RationalFn, Verdict, euler_series, moment_oracle, reconstruct, verify
from .expsum import (
    LPolynomial,
    Mixed,
    NewtonPolygon,
    exp_sum,
    fiber_lpoly,
    hodge_polygon,
    newton_polygon,
)
from .family import (
    BoundProfile,
    Ext,
    FamilySpec,
    Prod,
    Sym,
    TensorPow,
    torus_base_bounds,
    affine_base_bounds,
    dwork_np_lower_bound,
    local_factor_transform,
    parse_linop,
    q_related_check,
    relative_polytope,
)
from .ffield import GF, FieldTower, build_tower, closed_points, trace
from .polytope import RationalPolytope, build_polytope, normalized_volume, poincare_series, weight
from .toric import GradedRing, LaurentPoly, cofacial, hodge_basis, is_nondegenerate, newton_data, upsilon

__version__ = "0.1.0"
