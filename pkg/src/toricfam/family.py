"""Families G = f + P over a torus or affine base: the relative polytope,
linear-algebra operations on reciprocal roots, and bound calculators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations, combinations_with_replacement, product
from math import comb, factorial, floor, lcm, prod

import sympy

from .arith import CycInt, CycRat, poly_divmod, poly_gcd, poly_trim
from .errors import (
    DegreeMismatch,
    DimensionDeficient,
    EmptyDeformation,
    ExtTooLarge,
    NotInCone,
    PoleOnDomain,
    UnboundedRequest,
    ValidationError,
    WeightOne,
)
from .expsum import LPolynomial, Mixed, NewtonPolygon
from .ffield import FieldTower
from .polytope import NOT_IN_CONE, RationalPolytope, _coord_box, build_polytope, lattice_points_up_to_weight
from .toric import LaurentPoly, newton_data, upsilon

# ------------------------------------------------------------ family data


@dataclass
class FamilySpec:
    """G(x, t) = f(x) + sum c * t^gamma * x^mu over a ``base`` of dimension s."""

    tower: FieldTower
    n: int
    s: int
    f_terms: dict
    P_terms: list  # [((gamma, mu), coefficient), ...]
    base: str = "torus"
    fiber_space: object = "torus"

    def __post_init__(self):
        self.f_terms = {tuple(int(x) for x in mu): int(c) for mu, c in dict(self.f_terms).items()}
        self.P_terms = [
            ((tuple(int(x) for x in g), tuple(int(x) for x in mu)), int(c)) for (g, mu), c in self.P_terms
        ]
        self.P_terms = [t for t in self.P_terms if t[1]]
        if self.base not in ("torus", "affine"):
            raise ValidationError(f"base must be 'torus' or 'affine', not {self.base!r}")
        for (g, mu), _ in self.P_terms:
            if len(g) != self.s or len(mu) != self.n:
                raise ValidationError(f"deformation term {(g, mu)} has the wrong shape")
            if self.base == "affine" and any(x < 0 for x in g):
                raise ValidationError(f"negative parameter exponent {g} over an affine base")

    @property
    def p(self) -> int:
        return self.tower.p

    @property
    def q(self) -> int:
        return self.tower.q

    @property
    def f(self) -> LaurentPoly:
        return LaurentPoly(self.n, self.f_terms, self.tower)

    @property
    def affine_vars(self) -> tuple:
        if self.fiber_space == "torus":
            return ()
        if self.fiber_space == "affine":
            return tuple(range(self.n))
        return tuple(sorted(self.fiber_space.S2))

    def fiber_degree(self) -> int:
        """N: n! vol(Delta) on the torus, or the alternating volume sum for mixed fibers."""
        if self.affine_vars:
            return int(upsilon(self.f, self.affine_vars))
        return int(factorial(self.n) * newton_data(self.f).delta.volume)

    def validate(self):
        nd = newton_data(self.f)
        w = nd.w
        for (g, mu), _ in self.P_terms:
            wm = w(mu)
            if wm is NOT_IN_CONE:
                raise NotInCone(f"deformation exponent {mu} is outside the cone of the Newton polyhedron")
            if wm >= 1:
                raise WeightOne(f"deformation exponent {mu} has weight {wm} >= 1")
        return nd

    def fiber(self, lam, level: int) -> LaurentPoly:
        """G(x, lambda) with lambda given as encodings in tower level ``level``."""
        tower = self.tower
        F = tower.level(level)
        pairs = [(mu, int(tower.embed(c, tower.a, level))) for mu, c in self.f_terms.items()]
        for (g, mu), c in self.P_terms:
            val = int(tower.embed(c, tower.a, level))
            for li, gi in zip(lam, g):
                if gi < 0 and li == 0:
                    raise PoleOnDomain(f"t^{g} has a pole at {tuple(lam)}")
                if gi:
                    val = int(F.mul(val, F.pow(int(li), gi))) if li else 0
            pairs.append((mu, val))
        return LaurentPoly.from_terms(tower, self.n, pairs, level)

    def total_space_poly(self) -> LaurentPoly:
        """G as a Laurent polynomial in (x, t)."""
        pairs = [(mu + (0,) * self.s, c) for mu, c in self.f_terms.items()]
        pairs += [(mu + g, c) for (g, mu), c in self.P_terms]
        return LaurentPoly.from_terms(self.tower, self.n + self.s, pairs)

    def with_zero_params(self, A) -> FamilySpec:
        """The family with t_i = 0 for i in A."""
        A = set(A)
        kept = [t for t in self.P_terms if all(t[0][0][i] == 0 for i in A)]
        return FamilySpec(self.tower, self.n, self.s, self.f_terms, kept, self.base, self.fiber_space)


def relative_polytope(spec: FamilySpec, allow_empty: bool = False) -> RationalPolytope:
    """Hull of 0 and gamma / (1 - w(mu)) over the deformation support."""
    nd = spec.validate()
    if not spec.P_terms:
        if not allow_empty:
            raise EmptyDeformation("the deformation P is zero")
        return build_polytope([(0,) * spec.s]) if spec.s else None
    pts = []
    for (g, mu), _ in spec.P_terms:
        wm = nd.w(mu)
        pts.append(tuple(Fraction(x) / (1 - wm) for x in g))
    return build_polytope(pts)


def optimality_check(spec: FamilySpec, gamma: RationalPolytope) -> tuple[bool, bool]:
    """(every support element has w_Gamma(gamma) + w(mu) <= 1, some attains equality)."""
    nd = newton_data(spec.f)
    vals = [gamma.weight_fn(g) + nd.w(mu) for (g, mu), _ in spec.P_terms]
    return all(v <= 1 for v in vals), any(v == 1 for v in vals)


def w_gamma_min(P: RationalPolytope):
    """Least weight of a lattice point of the cone with all coordinates >= 1; None if there is none."""
    s = P.ambient_dim
    if any(x < 0 for v in P.vertices for x in v):
        raise ValueError("polytope is not contained in the nonnegative orthant")
    if any(all(v[i] == 0 for v in P.vertices) for i in range(s)):
        return None
    ones = (1,) * s
    w = P.weight_fn
    if P.in_cone(ones):
        start = ones
    else:
        den = lcm(*(x.denominator for v in P.vertices for x in v))
        start = tuple(sum(int(v[i] * den) for v in P.vertices) for i in range(s))
    bound = w(start)
    best = bound
    for u, wu in lattice_points_up_to_weight(P, w, bound):
        if all(x >= 1 for x in u) and wu < best:
            best = wu
    return best


# ------------------------------------------------- linear algebra operations


class LinOp:
    def dim(self, N: int) -> int:
        raise NotImplementedError

    @property
    def order(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class Sym(LinOp):
    k: int

    def dim(self, N):
        return comb(N + self.k - 1, self.k)

    @property
    def order(self):
        return self.k

    def __str__(self):
        return f"Sym({self.k})"


@dataclass(frozen=True)
class Ext(LinOp):
    l: int

    def dim(self, N):
        if self.l > N:
            raise ExtTooLarge(f"Ext({self.l}) on a rank-{N} space")
        return comb(N, self.l)

    @property
    def order(self):
        return self.l

    def __str__(self):
        return f"Ext({self.l})"


@dataclass(frozen=True)
class TensorPow(LinOp):
    k: int

    def dim(self, N):
        return N**self.k

    @property
    def order(self):
        return self.k

    def __str__(self):
        return f"TensorPow({self.k})"


@dataclass(frozen=True)
class Prod(LinOp):
    ops: tuple

    def __init__(self, *ops):
        if len(ops) == 1 and isinstance(ops[0], (list, tuple)):
            ops = tuple(ops[0])
        object.__setattr__(self, "ops", tuple(ops))

    def dim(self, N):
        return prod(op.dim(N) for op in self.ops)

    @property
    def order(self):
        return sum(op.order for op in self.ops)

    def __str__(self):
        return "Prod(" + ", ".join(map(str, self.ops)) + ")"


_OP_TOKEN = re.compile(r"\s*(Sym|Ext|TensorPow|Prod|\(|\)|,|\d+)\s*")


def parse_linop(text: str) -> LinOp:
    """Parse expressions such as ``Sym(2)`` or ``Prod(Sym(1), Ext(2))``."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _OP_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValidationError(f"cannot parse operation {text!r} at offset {pos}")
        tokens.append(m.group(1))
        pos = m.end()
    it = iter(tokens + [None])
    tok = [next(it)]

    def take(expected=None):
        cur = tok[0]
        if expected is not None and cur != expected:
            raise ValidationError(f"expected {expected!r} in operation {text!r}, got {cur!r}")
        tok[0] = next(it)
        return cur

    def expr():
        name = take()
        take("(")
        if name == "Prod":
            args = [expr()]
            while tok[0] == ",":
                take(",")
                args.append(expr())
            take(")")
            return Prod(*args)
        num = take()
        if num is None or not num.isdigit() or int(num) < 1:
            raise ValidationError(f"operation {name} needs a positive integer in {text!r}")
        take(")")
        return {"Sym": Sym, "Ext": Ext, "TensorPow": TensorPow}[name](int(num))

    op = expr()
    if tok[0] is not None:
        raise ValidationError(f"trailing input in operation {text!r}")
    return op


def lin_op_dim(op: LinOp, N: int) -> tuple[int, int]:
    """(size of the transformed root multiset, tensor order |L|)."""
    return op.dim(N), op.order


# ------------------------------------------------------ local factor maps


def _zero(p):
    return CycInt.from_int(p, 0)


def _companion(P: LPolynomial) -> list[list[CycInt]]:
    """Companion matrix of X^N + c_1 X^(N-1) + ... + c_N, whose roots are the reciprocal roots."""
    N = P.degree
    p = P.p
    M = [[_zero(p) for _ in range(N)] for _ in range(N)]
    for i in range(1, N):
        M[i][i - 1] = CycInt.from_int(p, 1)
    for i in range(N):
        M[i][N - 1] = -P.coeffs[N - i]
    return M


def _sym_matrix(A, k, p):
    N = len(A)
    basis = list(combinations_with_replacement(range(N), k))
    index = {b: i for i, b in enumerate(basis)}
    M = [[_zero(p) for _ in basis] for _ in basis]
    for col, b in enumerate(basis):
        poly = {(): CycInt.from_int(p, 1)}
        for i in b:
            nxt: dict = {}
            for mono, c in poly.items():
                for j in range(N):
                    a = A[j][i]
                    if a:
                        key = tuple(sorted(mono + (j,)))
                        nxt[key] = nxt.get(key, _zero(p)) + c * a
            poly = nxt
        for mono, c in poly.items():
            M[index[mono]][col] = c
    return M


def _det(M, p):
    n = len(M)
    memo: dict = {}

    def minor(row, cols):
        if row == n:
            return CycInt.from_int(p, 1)
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = _zero(p)
        for idx, c in enumerate(cols):
            a = M[row][c]
            if a:
                term = a * minor(row + 1, cols[:idx] + cols[idx + 1 :])
                total = total + term if idx % 2 == 0 else total - term
        memo[key] = total
        return total

    return minor(0, tuple(range(n)))


def _ext_matrix(A, l, p):
    N = len(A)
    basis = list(combinations(range(N), l))
    return [[_det([[A[i][j] for j in J] for i in I], p) for J in basis] for I in basis]


def _kron(A, B):
    return [[a * b for a in ra for b in rb] for ra in A for rb in B]


def op_matrix(A, op: LinOp, p: int):
    if isinstance(op, Sym):
        return _sym_matrix(A, op.k, p)
    if isinstance(op, Ext):
        op.dim(len(A))
        return _ext_matrix(A, op.l, p)
    if isinstance(op, TensorPow):
        return reduce(_kron, [A] * op.k)
    if isinstance(op, Prod):
        return reduce(_kron, [op_matrix(A, o, p) for o in op.ops])
    raise TypeError(f"unknown operation {op!r}")


def det_one_minus(M, p: int) -> list[CycInt]:
    """Coefficients of det(1 - M T), via Faddeev-LeVerrier with exact integer division."""
    n = len(M)
    one = CycInt.from_int(p, 1)
    coeffs = [one]
    Mk = [[one if i == j else _zero(p) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        AM = [[sum((M[i][t] * Mk[t][j] for t in range(n) if M[i][t] and Mk[t][j]), _zero(p)) for j in range(n)] for i in range(n)]
        tr = sum((AM[i][i] for i in range(n)), _zero(p))
        c = (-tr).exact_div_int(k)
        coeffs.append(c)
        Mk = [[AM[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    return coeffs


def local_factor_transform(P: LPolynomial, op: LinOp, N: int | None = None) -> LPolynomial:
    """det(1 - L(Frob) T) for the reciprocal roots of P transformed by ``op``."""
    if N is not None and P.degree != N:
        raise DegreeMismatch(f"polynomial has degree {P.degree}, expected {N}")
    if P.degree == 0:
        return LPolynomial([CycInt.from_int(P.p, 1)])
    op.dim(P.degree)
    M = op_matrix(_companion(P), op, P.p)
    return LPolynomial(det_one_minus(M, P.p))


def op_power_sums(op: LinOp, psums, J: int, p: int) -> list[CycRat]:
    """Power sums p_1..p_J of the transformed root multiset.

    ``psums[i-1]`` is the i-th power sum of the fiber roots; entries up to
    ``J * op.order`` are required.
    """
    need = J * op.order
    if len(psums) < need:
        raise ValueError(f"need {need} fiber power sums, got {len(psums)}")
    ps = [CycRat(x) if isinstance(x, CycInt) else x for x in psums]
    out = []
    for j in range(1, J + 1):
        out.append(_op_psum(op, ps, j, p))
    return out


def _newton_symmetric(P, k, p, signed):
    # complete (signed=False) or elementary (signed=True) symmetric function of degree k
    e = [CycRat.from_int(p, 1)]
    for m in range(1, k + 1):
        acc = CycRat.from_int(p, 0)
        for i in range(1, m + 1):
            term = P[i - 1] * e[m - i]
            acc = acc - term if (signed and i % 2 == 0) else acc + term
        e.append(acc / m)
    return e[k]


def _op_psum(op, ps, j, p):
    if isinstance(op, TensorPow):
        x = ps[j - 1]
        out = CycRat.from_int(p, 1)
        for _ in range(op.k):
            out = out * x
        return out
    if isinstance(op, Sym):
        return _newton_symmetric([ps[i * j - 1] for i in range(1, op.k + 1)], op.k, p, signed=False)
    if isinstance(op, Ext):
        return _newton_symmetric([ps[i * j - 1] for i in range(1, op.l + 1)], op.l, p, signed=True)
    if isinstance(op, Prod):
        out = CycRat.from_int(p, 1)
        for o in op.ops:
            out = out * _op_psum(o, ps, j, p)
        return out
    raise TypeError(f"unknown operation {op!r}")


def basis_weights(op: LinOp, fiber_weights) -> tuple[list[Fraction], Fraction]:
    """Weights of the transformed basis (sorted) and their minimum."""
    ws = [Fraction(x) for x in fiber_weights]
    N = len(ws)

    def go(o):
        if isinstance(o, Sym):
            return [sum((ws[i] for i in c), Fraction(0)) for c in combinations_with_replacement(range(N), o.k)]
        if isinstance(o, Ext):
            o.dim(N)
            return [sum((ws[i] for i in c), Fraction(0)) for c in combinations(range(N), o.l)]
        if isinstance(o, TensorPow):
            return [sum(c, Fraction(0)) for c in product(ws, repeat=o.k)]
        if isinstance(o, Prod):
            parts = [go(x) for x in o.ops]
            return [sum(c, Fraction(0)) for c in product(*parts)]
        raise TypeError(f"unknown operation {o!r}")

    out = sorted(go(op))
    return out, (out[0] if out else None)


# ------------------------------------------------------------- bounds


@dataclass
class Bound:
    """An exact bound value (sympy expression) together with its integer floor."""

    value: object
    label: str

    @property
    def floor(self) -> int:
        return int(sympy.floor(self.value))

    @property
    def exact(self):
        v = sympy.nsimplify(self.value)
        if v.is_Rational:
            return Fraction(int(v.p), int(v.q))
        return v

    def to_json(self):
        return {"label": self.label, "value": str(self.exact), "floor": self.floor}


def _q(x) -> sympy.Expr:
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def total_degree_value(dimB, st, vol, bprime, k, s, d=None) -> sympy.Expr:
    """dim(B) s~! vol 2^(s~ [- 1/(s~ d b')] + (1/b')(1+1/s~)(k-rho)) (1 + 2^((1/b')(1+1/s~)))^rho."""
    st = int(st)
    if st == 0:
        return sympy.Integer(0)
    rho = min(s, k)
    inv_b = 1 / _q(bprime)
    expo = st + inv_b * (1 + sympy.Rational(1, st)) * (k - rho)
    if d is not None:
        expo -= sympy.Rational(1, st) / (d * _q(bprime))
    return _q(dimB) * sympy.factorial(st) * _q(vol) * sympy.Integer(2) ** expo * (
        1 + sympy.Integer(2) ** (inv_b * (1 + sympy.Rational(1, st)))
    ) ** rho


@dataclass
class BoundsReport:
    entries: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries[key]

    def to_json(self):
        out = {}
        for k, v in self.entries.items():
            out[k] = v.to_json() if isinstance(v, Bound) else _jsonable(v)
        return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, Bound):
        return v.to_json()
    return v


def torus_base_bounds(gamma: RationalPolytope, s: int, n: int, op: LinOp, N: int) -> BoundsReport:
    """Degree window and total-degree cap for a torus base."""
    LN, order = lin_op_dim(op, N)
    st = gamma.span_dim
    if st < 1:
        raise EmptyDeformation("the relative polytope is a point")
    vol = gamma.volume
    rep = BoundsReport()
    rep.entries["forced_equal"] = st < s
    hi = Fraction(factorial(s)) * vol * LN if st == s else Fraction(0)
    rep.entries["degree_lower"] = 0
    rep.entries["degree_upper"] = Bound(_q(hi), "degree upper bound, torus base")
    total = total_degree_value(LN, st, vol, 1, s + n * order, s)
    rep.entries["total_degree"] = Bound(total, "total degree bound, torus base")
    rep.entries["LN"] = LN
    rep.entries["order"] = order
    return rep


def gamma_family(spec: FamilySpec) -> dict:
    """Relative polytopes of the families with t_i = 0 for i in A, for every A."""
    out = {}
    for size in range(spec.s + 1):
        for A in combinations(range(spec.s), size):
            out[A] = relative_polytope(spec.with_zero_params(A), allow_empty=True)
    return out


def affine_base_bounds(
    gammas: dict,
    op: LinOp,
    N: int,
    n: int,
    delta: RationalPolytope | None = None,
    N_affine: int | None = None,
    basis_min_weight=None,
) -> BoundsReport:
    """Divisibility floors, degree window and total-degree cap for an affine base.

    ``gammas`` maps each tuple A of zeroed parameters to its relative polytope.
    """
    s = max(len(A) for A in gammas)
    gamma = gammas[()]
    LN, order = lin_op_dim(op, N)
    st = gamma.span_dim
    rep = BoundsReport()
    wG = w_gamma_min(gamma)
    rep.entries["w_gamma"] = wG
    rep.entries["divisibility_floor"] = wG
    even = odd = Fraction(0)
    per_A = {}
    for A, G in gammas.items():
        # a point spans the zero subspace, whose lattice measure gives it volume 1
        vol = G.volume if G is not None and G.span_dim else Fraction(1)
        term = factorial(s - len(A)) * vol
        per_A[",".join(map(str, A)) or "-"] = str(vol)
        if len(A) % 2:
            odd += term
        else:
            even += term
    rep.entries["volumes_by_A"] = per_A
    rep.entries["degree_window"] = (-odd, even)
    rep.entries["degree_window_scaled"] = (-odd * LN, even * LN)
    total = _q(LN) * sympy.factorial(st) * _q(gamma.volume) * sympy.Integer(6) ** s
    if st:
        total *= sympy.Integer(2) ** (st + (1 + sympy.Rational(1, st)) * n * order)
    rep.entries["total_degree"] = Bound(total, "total degree bound, affine base")
    if delta is not None and wG is not None:
        wD = w_gamma_min(delta)
        rep.entries["w_delta"] = wD
        if wD is not None:
            if N_affine is not None:
                LNt = op.dim(N_affine)
                rep.entries["affine_fiber_floor_as_stated"] = wG + wD * LNt
            rep.entries["affine_fiber_floor"] = wG + wD * order
    if basis_min_weight is not None and wG is not None:
        rep.entries["mixed_floor"] = wG + Fraction(basis_min_weight)
    return rep


# ------------------------------------------------ Dwork lower bound


@dataclass
class BoundProfile:
    """Data (b, e, s(j), d, dim B) of a lower-bound problem."""

    b: Fraction
    e: int
    s_weights: list
    d: int | None = None

    @property
    def dim_B(self) -> int:
        return len(self.s_weights)

    @classmethod
    def from_basis_weights(cls, p: int, weights, d: int | None = None) -> BoundProfile:
        """b = 1/(p-1), e = p-1, s(j) = (p-1) w(j)."""
        return cls(Fraction(1, p - 1), p - 1, [Fraction(p - 1) * Fraction(w) for w in weights], d)


@dataclass
class DworkBound:
    d: int
    W: dict
    polygon: NewtonPolygon
    degree_bound: Fraction
    forced_equal: bool
    total_degree: Bound | None


def _smallest_d(profile: BoundProfile, p: int, D: int) -> int:
    bprime = profile.b * (p - 1)
    dens = [(bprime / D).denominator] + [(Fraction(x) / profile.e).denominator for x in profile.s_weights]
    return lcm(*dens)


def dwork_np_lower_bound(
    profile: BoundProfile,
    gamma: RationalPolytope | None,
    p: int,
    j_max: int | None = None,
    k: int | None = None,
    budget: int = 1 << 21,
) -> DworkBound:
    """W(j) table and the lower convex hull of (sum W, (1/d) sum j W)."""
    bprime = profile.b * (p - 1)
    if bprime <= 0:
        raise ValueError("b must be positive")
    cs = [Fraction(x) / profile.e for x in profile.s_weights]
    if gamma is None or gamma.span_dim == 0:
        s = gamma.ambient_dim if gamma is not None else 0
        # a point in a zero-dimensional space has volume 1
        D, st, vol = 1, 0, Fraction(1 if s == 0 else 0)
    else:
        D, s, st, vol = gamma.weight_fn.D, gamma.ambient_dim, gamma.span_dim, gamma.volume
    d = profile.d or _smallest_d(profile, p, D)
    if (d * bprime / D).denominator != 1 or any((d * c).denominator != 1 for c in cs):
        raise ValueError(f"d = {d} does not clear the denominators of the profile")
    if j_max is None:
        j_max = int(d * max(cs, default=Fraction(0))) + (d * 2 if st else 0)
    W = {j: 0 for j in range(j_max + 1)}
    if st == 0:
        weights = [Fraction(0)]
    else:
        wmax = Fraction(j_max, d) / bprime
        size = prod(hi - lo + 1 for lo, hi in _coord_box(gamma, wmax))
        if size > budget:
            raise UnboundedRequest(f"enumeration box of {size} points exceeds the budget {budget}")
        weights = [wu for _, wu in lattice_points_up_to_weight(gamma, None, wmax)]
    for wu in weights:
        for c in cs:
            j = (bprime * wu + c) * d
            if j <= j_max:
                W[int(j)] += 1
    pts = [(0, Fraction(0))]
    x, y = 0, Fraction(0)
    for j in range(j_max + 1):
        x += W[j]
        y += Fraction(j * W[j], d)
        pts.append((x, y))
    poly = NewtonPolygon.lower_hull(pts)
    forced = st < s
    deg = Fraction(0) if forced else (1 / bprime) ** s * factorial(s) * vol * profile.dim_B
    total = None
    if k is not None and st:
        total = Bound(total_degree_value(profile.dim_B, st, vol, bprime, k, s, d), "total degree (refined)")
    return DworkBound(d, W, poly, deg, forced, total)


# ------------------------------------------------------- q-related pairs


@dataclass
class PairingReport:
    verdict: str  # "Pass" | "Inconclusive"
    matched: list  # [(m, degree of the matched factor)]
    unmatched_degree: int


def _scale_var(poly, c: int, p: int):
    out = []
    pw = 1
    for x in poly:
        out.append(x * pw)
        pw *= c
    return out


def q_related_check(num, den, q: int, m_max: int) -> PairingReport:
    """Match denominator factors against Num(q^m T), m = 1..m_max."""
    num = poly_trim(num)
    den = poly_trim(den)
    p = (num or den or [CycInt.from_int(2, 1)])[0].p
    rest = den
    matched = []
    for m in range(1, m_max + 1):
        if len(rest) <= 1:
            break
        target = _scale_var(num, q**m, p)
        while len(rest) > 1:
            g = poly_gcd(rest, target, p)
            if len(g) <= 1:
                break
            matched.append((m, len(g) - 1))
            rest, r = poly_divmod(rest, g, p)
            if poly_trim(r):
                raise ArithmeticError("gcd does not divide")  # unreachable
    deg = max(len(rest) - 1, 0)
    return PairingReport("Pass" if deg == 0 else "Inconclusive", matched, deg)
