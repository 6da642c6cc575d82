"""Truncated Euler products of family L-functions, the moment-sum oracle,
rational reconstruction and bound verification.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import CycInt, CycRat, ord_p, poly_divmod, poly_gcd, poly_mul, poly_trim, solve_linear
from .errors import (
    BudgetExceeded,
    DegreeViolation,
    FiberDegenerate,
    NonIntegralCoefficient,
    NoSolution,
    UnsupportedOp,
    Unverified,
)
from .expsum import LPolynomial, NewtonPolygon, fiber_lpoly, series_exp, trace_residues
from .family import (
    FamilySpec,
    LinOp,
    TensorPow,
    torus_base_bounds,
    affine_base_bounds,
    gamma_family,
    local_factor_transform,
    op_power_sums,
    q_related_check,
    relative_polytope,
)
from .ffield import closed_points, expected_point_count, rational_points
from .toric import newton_data

WORK_BUDGET = 1 << 22  # entries of a (points x field) residue block


@dataclass
class LSeries:
    """1 + c_1 T + ... + c_M T^M of L(LA, base, T)."""

    coeffs: list
    s: int
    p: int
    meta: dict = field(default_factory=dict)

    @property
    def M(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other):
        return isinstance(other, LSeries) and self.coeffs == other.coeffs

    def oriented(self) -> list:
        """Coefficients of L^{(-1)^(s+1)}."""
        if self.s % 2 == 1:
            return list(self.coeffs)
        return series_inverse(self.coeffs, self.M, self.p)

    def first_difference(self, other) -> int | None:
        for i, (a, b) in enumerate(zip(self.coeffs, other.coeffs)):
            if a != b:
                return i
        return None

    def to_lists(self) -> list:
        out = []
        for c in self.coeffs:
            out.append({"num": c.num.to_list(), "den": c.den} if c.den != 1 else c.num.to_list())
        return out


@dataclass
class RationalFn:
    num: list
    den: list
    provenance: dict = field(default_factory=dict)

    @property
    def R(self) -> int:
        return len(poly_trim(self.num)) - 1

    @property
    def S(self) -> int:
        return len(poly_trim(self.den)) - 1


# ------------------------------------------------------------- series utils


def _rat(p, x):
    if isinstance(x, CycRat):
        return x
    if isinstance(x, CycInt):
        return CycRat(x)
    return CycRat.from_int(p, x)


def series_inverse(a, M: int, p: int) -> list:
    a = [_rat(p, x) for x in a] + [CycRat.from_int(p, 0)] * (M + 1 - len(a))
    inv0 = a[0].inverse()
    out = [inv0]
    for m in range(1, M + 1):
        acc = CycRat.from_int(p, 0)
        for k in range(1, m + 1):
            if a[k]:
                acc = acc + a[k] * out[m - k]
        out.append(-(acc * inv0))
    return out


def series_mul(a, b, M: int, p: int) -> list:
    out = poly_mul([_rat(p, x) for x in a], [_rat(p, x) for x in b], p, trunc=M + 1)
    return out + [CycRat.from_int(p, 0)] * (M + 1 - len(out))


def _stretch(coeffs, d: int, M: int, p: int) -> list:
    out = [CycRat.from_int(p, 0)] * (M + 1)
    for j, c in enumerate(coeffs):
        if j * d > M:
            break
        out[j * d] = _rat(p, c)
    return out


# --------------------------------------------------------- fiber sums


def fiber_char_sums(spec: FamilySpec, lams: np.ndarray, d: int, r: int) -> list[CycInt]:
    """S_r of G_lambda over F_{q^(d r)} for every row lambda (encodings in F_{q^d})."""
    tower = spec.tower
    lo = tower.a * d
    hi = lo * r
    F = tower.level(hi)
    n1 = F.order - 1
    lam_hi = tower.embed(lams, lo, hi) if lams.size else lams.reshape(len(lams), spec.s)
    # coefficient of each term as a function of lambda
    coef_rows = []
    for mu, c in spec.f_terms.items():
        coef_rows.append((mu, np.full(len(lams), int(tower.embed(c, tower.a, hi)), dtype=np.int64)))
    for (g, mu), c in spec.P_terms:
        val = np.full(len(lams), int(tower.embed(c, tower.a, hi)), dtype=np.int64)
        for i, gi in enumerate(g):
            if gi:
                val = F.mul(val, F.pow(lam_hi[:, i], gi))
        coef_rows.append((mu, val))
    # points of the fiber space over F_{q^(d r)}
    affine = spec.affine_vars
    axes = [F.elements() if i in affine else F.units() for i in range(spec.n)]
    grids = np.meshgrid(*axes, indexing="ij")
    xs = np.stack([g.reshape(-1) for g in grids], axis=1)
    xlog = F.log[xs]
    p = F.p
    out = []
    step = max(1, WORK_BUDGET // max(len(xs), 1))
    for start in range(0, len(lams), step):
        stop = min(start + step, len(lams))
        acc = np.zeros((stop - start, len(xs)), dtype=np.int64)
        for mu, coef in coef_rows:
            lc = F.log[coef[start:stop]]
            total = np.zeros(len(xs), dtype=np.int64)
            zero = np.zeros(len(xs), dtype=bool)
            for i, e in enumerate(mu):
                if e:
                    li = xlog[:, i]
                    zero |= li < 0
                    total += np.where(li < 0, 0, li) * (e % n1)
            idx = (lc[:, None] + total[None, :]) % n1
            tr = F.abs_trace[F.exp[idx]]
            tr[(lc < 0)[:, None] | zero[None, :]] = 0
            acc += tr
        acc %= p
        rows = np.arange(stop - start, dtype=np.int64)[:, None] * p
        counts = np.bincount((rows + acc).ravel(), minlength=(stop - start) * p).reshape(-1, p)
        out.extend(CycInt.from_counts(p, row.tolist()) for row in counts)
    return out


def _fits(spec: FamilySpec, level: int, npts: int = 1) -> bool:
    tower = spec.tower
    size = tower.p**level
    return size <= tower.max_field and npts * size**spec.n <= 64 * WORK_BUDGET


# --------------------------------------------------------------- euler


def euler_plan(spec: FamilySpec, op: LinOp, M: int, guard: int | None = None) -> dict:
    """d -> (regime, number of character sums) for the closed points of degree d.

    "full" recovers every fiber polynomial with ``guard`` extra sums as a
    check, "full-unguarded" recovers it without the check, and "power-sums"
    only computes the power sums the truncated local factor needs.
    """
    N = spec.fiber_degree()
    guard = max(3, N) if guard is None else guard
    plan = {}
    for d in range(1, M + 1):
        npts = expected_point_count(spec.q, spec.s, d, spec.base)
        if not npts:
            continue
        need = (M // d) * op.order
        level = spec.tower.a * d
        if _fits(spec, level * (N + guard), npts):
            plan[d] = ("full", N + guard)
        elif need >= N and _fits(spec, level * N, npts):
            plan[d] = ("full-unguarded", N)
        elif _fits(spec, level * need, npts):
            plan[d] = ("power-sums", need)
        else:
            raise BudgetExceeded(f"degree-{d} points need sums over F_{spec.q}^{d * need}")
    return plan


def euler_series(spec: FamilySpec, op: LinOp, M: int, guard: int | None = None) -> LSeries:
    """Product over closed points of degree <= M of the transformed local factors, to order M."""
    p = spec.p
    n = spec.n
    N = spec.fiber_degree()
    guard = max(3, N) if guard is None else guard
    order = op.order
    op.dim(N)
    sign = -1 if n % 2 else 1  # (-1)^n
    plan = euler_plan(spec, op, M, guard)
    pts = closed_points(spec.tower, spec.s, spec.base, M)
    series = [CycRat.from_int(p, 1)] + [CycRat.from_int(p, 0)] * M
    regimes = {}
    for d in range(1, M + 1):
        lams = np.array([pt.rep for pt in pts[d]], dtype=np.int64).reshape(len(pts[d]), spec.s)
        if not len(lams):
            continue
        J = M // d
        need = J * order
        regime, top = plan[d]
        regimes[d] = regime
        sums = [fiber_char_sums(spec, lams, d, r) for r in range(1, top + 1)]
        for idx, pt in enumerate(pts[d]):
            S = [sums[r][idx] for r in range(top)]
            if regime == "power-sums":
                psums = [x * sign for x in S[:need]]
                tp = op_power_sums(op, psums, J, p)
                local = series_exp(tp, J, p)
            else:
                P = _poly_from_sums(S, N, n, p, check=(regime == "full"), point=pt)
                Q = local_factor_transform(P, op)
                local = series_inverse(Q.coeffs, J, p)
            series = series_mul(series, _stretch(local, d, M, p), M, p)
    meta = {"regimes": regimes, "N": N, "guard": guard, "op": str(op), "points": {d: len(v) for d, v in pts.items()}}
    return LSeries(series, spec.s, p, meta)


def _poly_from_sums(S, N, n, p, check, point) -> LPolynomial:
    s_signed = [x * (1 if n % 2 else -1) for x in S]
    c = series_exp(s_signed, len(S), p)
    if check:
        for i in range(N + 1, len(c)):
            if c[i]:
                raise FiberDegenerate(point, DegreeViolation(i, c[i]))
    for i, x in enumerate(c[: N + 1]):
        if not x.is_integral():
            raise FiberDegenerate(point, NonIntegralCoefficient(f"coefficient {i} is {x!r}"))
    if not c[N]:
        raise FiberDegenerate(point, DegreeViolation(N, c[N], "top coefficient vanishes"))
    return LPolynomial([x.num for x in c[: N + 1]])


def moment_oracle(spec: FamilySpec, k, M: int) -> LSeries:
    """L for TensorPow(k) from N_m = sum over base(F_{q^m}) of ((-1)^n S_1)^k."""
    if isinstance(k, LinOp):
        if not isinstance(k, TensorPow):
            raise UnsupportedOp(f"moment oracle handles tensor powers only, not {k}")
        k = k.k
    p = spec.p
    sign = -1 if spec.n % 2 else 1
    Nm = []
    for m in range(1, M + 1):
        lams = rational_points(spec.tower, spec.s, spec.base, m)
        total = CycInt.from_int(p, 0)
        for S1 in fiber_char_sums(spec, lams, m, 1):
            total = total + (S1 * sign) ** k
        Nm.append(total)
    coeffs = series_exp(Nm, M, p)
    return LSeries(coeffs, spec.s, p, {"N_m": [x.to_list() for x in Nm], "k": k})


# ------------------------------------------------------------ reconstruction


def reconstruct(series, R_max: int, S_max: int, guard: int = 1) -> RationalFn:
    """Smallest Num/Den (deg <= R_max, S_max) agreeing with the series through its last term."""
    if isinstance(series, LSeries):
        coeffs, p = series.oriented(), series.p
    else:
        coeffs = list(series)
        p = coeffs[0].p
    coeffs = [_rat(p, x) for x in coeffs]
    M = len(coeffs) - 1
    solved_window = False
    pairs = sorted(
        ((R, S) for R in range(R_max + 1) for S in range(S_max + 1) if R + S + guard <= M),
        key=lambda t: (t[0] + t[1], t[1]),
    )
    if not pairs:
        raise NoSolution(f"series of length {M + 1} is too short for any pair with guard {guard}")
    for R, S in pairs:
        den = _pade_den(coeffs, R, S, p)
        if den is None:
            continue
        solved_window = True
        num = series_mul(den, coeffs, R, p)
        check = series_mul(den, coeffs, M, p)
        if any(check[j] for j in range(R + 1, M + 1)):
            continue
        num, den = _reduce(num, den, p)
        return RationalFn(num, den, {"R": R, "S": S, "M": M, "guard": guard, "caps": (R_max, S_max)})
    if solved_window:
        raise Unverified("candidate fractions fit their windows but fail on later coefficients")
    raise NoSolution("no rational function within the degree caps")


def _pade_den(c, R, S, p):
    if S == 0:
        return [CycRat.from_int(p, 1)]
    A = []
    rhs = []
    for j in range(R + 1, R + S + 1):
        A.append([c[j - k] if j - k >= 0 else CycRat.from_int(p, 0) for k in range(1, S + 1)])
        rhs.append(-c[j])
    sol = solve_linear(A, rhs, p)
    if sol is None:
        return None
    return [CycRat.from_int(p, 1)] + sol


def _reduce(num, den, p):
    num, den = poly_trim(num), poly_trim(den)
    g = poly_gcd(num, den, p)
    if len(g) > 1:
        num = poly_divmod(num, g, p)[0]
        den = poly_divmod(den, g, p)[0]
    inv = den[0].inverse()
    return [x * inv for x in num], [x * inv for x in den]


# ----------------------------------------------------------------- verify


@dataclass
class Verdict:
    status: str  # Pass | Fail | Inapplicable | Inconclusive
    detail: str = ""
    witness: object = None

    @property
    def ok(self) -> bool:
        return self.status != "Fail"

    def to_json(self):
        return {"status": self.status, "detail": self.detail, "witness": _plain(self.witness)}


def _plain(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def _polygon(coeffs, p, a) -> NewtonPolygon:
    pts = []
    for i, c in enumerate(coeffs):
        v = ord_p(c, p)
        if not v.is_infinite:
            pts.append((i, v.value / a))
    return NewtonPolygon.lower_hull(pts)


def verify(
    spec: FamilySpec,
    op: LinOp,
    series: LSeries | None = None,
    rational: RationalFn | None = None,
    m_max: int = 8,
) -> dict:
    """Run every applicable bound check; returns name -> Verdict."""
    p, a, q = spec.p, spec.tower.a, spec.q
    N = spec.fiber_degree()
    out: dict = {}
    gamma = relative_polytope(spec)
    torus_fibers = spec.fiber_space == "torus"
    if spec.base == "affine":
        delta = newton_data(spec.f).delta if spec.fiber_space == "affine" else None
        rep = affine_base_bounds(gamma_family(spec), op, N, spec.n, delta=delta)
        floor_w = rep["divisibility_floor"]
        if delta is not None and "affine_fiber_floor" in rep.entries:
            floor_w = rep["affine_fiber_floor"]
        lo, hi = rep["degree_window_scaled"]
        total = rep["total_degree"].value
        forced = False
    else:
        rep = torus_base_bounds(gamma, spec.s, spec.n, op, N)
        floor_w = None
        forced = rep["forced_equal"]
        lo, hi = 0, (0 if forced else rep["degree_upper"].floor)
        total = rep["total_degree"].value

    if series is not None and floor_w is not None:
        bad = None
        for j, c in enumerate(series.coeffs):
            v = ord_p(c, p)
            if not v.is_infinite and v.value / a < j * floor_w:
                bad = j
                break
        out["divisibility"] = (
            Verdict("Pass", f"ord_q(c_j) >= {floor_w} j for j <= {series.M}")
            if bad is None
            else Verdict("Fail", f"ord_q(c_{bad}) < {floor_w * bad}", bad)
        )
    else:
        out["divisibility"] = Verdict("Inapplicable", "torus base or no series")

    if rational is None:
        for name in ("degree_window", "total_degree", "q_related", "slopes", "integrality"):
            out[name] = Verdict("Inapplicable", "no reconstructed rational function")
        return out

    R, S = rational.R, rational.S
    if not torus_fibers:
        out["degree_window"] = Verdict("Inapplicable", "degree bounds cover torus fibers only")
        out["total_degree"] = Verdict("Inapplicable", "degree bounds cover torus fibers only")
    else:
        out["degree_window"] = (
            Verdict("Pass", f"R - S = {R - S} in [{lo}, {hi}]")
            if lo <= R - S <= hi
            else Verdict("Fail", f"R - S = {R - S} outside [{lo}, {hi}]", R - S)
        )
        out["total_degree"] = (
            Verdict("Pass", f"R + S = {R + S} <= {total}")
            if R + S <= total
            else Verdict("Fail", f"R + S = {R + S} exceeds {total}", R + S)
        )
    pair = q_related_check(rational.num, rational.den, q, m_max)
    out["q_related"] = Verdict(pair.verdict, f"matched {pair.matched}", pair.unmatched_degree or None)
    nonint = [i for i, c in enumerate(list(rational.num) + list(rational.den)) if not c.is_integral()]
    out["integrality"] = (
        Verdict("Pass", "numerator and denominator have integral coefficients")
        if not nonint
        else Verdict("Fail", "non-integral coefficient", nonint[0])
    )
    if floor_w is not None:
        slopes = _polygon(rational.num, p, a).slopes + _polygon(rational.den, p, a).slopes
        low = [x for x in slopes if x < floor_w]
        out["slopes"] = (
            Verdict("Pass", f"all slopes >= {floor_w}")
            if not low
            else Verdict("Fail", f"slope {min(low)} < {floor_w}", min(low))
        )
    else:
        out["slopes"] = Verdict("Inapplicable", "torus base")
    return out
