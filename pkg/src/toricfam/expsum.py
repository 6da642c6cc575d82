"""Exponential sums over tori and affine spaces, fiber L-polynomials,
and Newton / Hodge polygons.

The additive character is x -> zeta_p^{Tr(x)} with the absolute trace to F_p.
Because the trace is additive, a sum over points of Theta(G(x)) only needs,
for each term c x^mu, the table lookup Tr(c x^mu); field additions of the
term values are never formed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import CycInt, CycRat, ord_p
from .errors import DegreeViolation, NonIntegralCoefficient, PoleOnDomain
from .ffield import GF
from .toric import HodgeBasis, LaurentPoly

CHUNK = 1 << 20


@dataclass(frozen=True)
class Mixed:
    """Points with x_j in F for j in ``S2`` and x_j in F^* otherwise."""

    S2: tuple

    def affine_vars(self, n: int) -> tuple:
        return tuple(sorted(self.S2))


def _affine_vars(space, n: int) -> tuple:
    if space == "torus":
        return ()
    if space == "affine":
        return tuple(range(n))
    if isinstance(space, Mixed):
        return space.affine_vars(n)
    raise ValueError(f"unknown space {space!r}")


class Character:
    """Theta(x) = zeta_p^x on F_p."""

    def __init__(self, p: int):
        self.p = p
        self.table = [CycInt.zeta(p, k) for k in range(p)]

    def __call__(self, x: int) -> CycInt:
        return self.table[x % self.p]


def _coordinate_values(F: GF, affine: bool) -> np.ndarray:
    return F.elements() if affine else F.units()


def _point_chunks(F: GF, n: int, affine_vars):
    """Yield arrays of points of the product space, at most about CHUNK rows each."""
    axes = [_coordinate_values(F, i in affine_vars) for i in range(n)]
    if n == 0:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    tail = 1
    for ax in axes[1:]:
        tail *= len(ax)
    step = max(1, CHUNK // max(tail, 1))
    for start in range(0, len(axes[0]), step):
        head = axes[0][start : start + step]
        grids = np.meshgrid(head, *axes[1:], indexing="ij")
        yield np.stack([g.reshape(-1) for g in grids], axis=1)


def trace_residues(F: GF, pts: np.ndarray, terms) -> np.ndarray:
    """sum over terms of Tr_{F/F_p}(c x^mu), reduced mod p, at every point.

    ``terms`` holds (mu, c) with c already an encoding in F.
    """
    p = F.p
    n1 = F.order - 1
    logs = F.log[pts] if pts.shape[1] else np.zeros((len(pts), 0), dtype=np.int64)
    acc = np.zeros(len(pts), dtype=np.int64)
    for mu, c in terms:
        lc = int(F.log[c])
        if lc < 0:
            continue
        total = np.full(len(pts), lc, dtype=np.int64)
        zero = np.zeros(len(pts), dtype=bool)
        for i, e in enumerate(mu):
            if e == 0:
                continue
            li = logs[:, i]
            isz = li < 0
            if e < 0 and isz.any():
                raise PoleOnDomain(f"term with exponent {mu} has a pole on the point set")
            zero |= isz
            total += np.where(isz, 0, li) * (e % n1)
        tr = F.abs_trace[F.exp[total % n1]]
        acc += np.where(zero, 0, tr)
    return acc % p


def exp_sum(G: LaurentPoly, r: int = 1, space="torus") -> CycInt:
    """S_r: the sum of Theta(Tr G(x)) over the points of ``space`` with coordinates in F_{Q^r}."""
    tower = G.tower
    level = G.level * r
    F = tower.level(level)
    affine = _affine_vars(space, G.n)
    terms = [(mu, int(tower.embed(c, G.level, level))) for mu, c in G.terms.items()]
    for mu, _ in terms:
        if any(mu[j] < 0 for j in affine):
            raise PoleOnDomain(f"exponent {mu} is negative on an affine coordinate")
    counts = np.zeros(F.p, dtype=np.int64)
    for pts in _point_chunks(F, G.n, affine):
        counts += np.bincount(trace_residues(F, pts, terms), minlength=F.p)
    return CycInt.from_counts(F.p, counts.tolist())


# ------------------------------------------------------------ L-polynomials


class LPolynomial:
    """1 + c_1 T + ... + c_N T^N with c_i in Z[zeta_p]."""

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        if not coeffs or coeffs[0] != 1:
            raise ValueError("constant term must be 1")
        while len(coeffs) > 1 and not coeffs[-1]:
            coeffs.pop()
        self.coeffs = coeffs
        self.p = coeffs[0].p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other):
        return isinstance(other, LPolynomial) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"LPolynomial({[c.to_list() for c in self.coeffs]})"

    def to_lists(self) -> list[list[int]]:
        return [c.to_list() for c in self.coeffs]

    def power_sums(self, upto: int) -> list[CycInt]:
        """[p_1, ..., p_upto] where p_m is the sum of the m-th powers of the reciprocal roots."""
        c = self.coeffs
        N = self.degree
        out: list[CycInt] = []
        for m in range(1, upto + 1):
            val = (c[m] * (-m)) if m <= N else CycInt.from_int(self.p, 0)
            for k in range(1, min(m, N + 1)):
                val = val - c[k] * out[m - k - 1]
            out.append(val)
        return out


def series_exp(s, M: int, p: int) -> list[CycRat]:
    """Coefficients of exp(sum_r s_r T^r / r) up to T^M; ``s[r-1]`` = s_r."""
    c = [CycRat.from_int(p, 1)]
    for m in range(1, M + 1):
        acc = CycRat.from_int(p, 0)
        for r in range(1, m + 1):
            acc = acc + c[m - r] * s[r - 1]
        c.append(acc / m)
    return c


def fiber_lpoly(G: LaurentPoly, N_expected: int, guard: int | None = None, space="torus") -> LPolynomial:
    """The polynomial L(G, T)^{(-1)^(n+1)} from character sums S_1..S_{N+guard}."""
    if guard is None:
        guard = max(3, N_expected)
    n = G.n
    sign = 1 if n % 2 else -1  # (-1)^(n+1)
    total = N_expected + guard
    S = [exp_sum(G, r, space) for r in range(1, total + 1)]
    c = series_exp([x * sign for x in S], total, G.field.p)
    for i in range(N_expected + 1, total + 1):
        if c[i]:
            raise DegreeViolation(i, c[i])
    if not c[N_expected]:
        raise DegreeViolation(N_expected, c[N_expected], f"coefficient of T^{N_expected} vanishes")
    for i, x in enumerate(c[: N_expected + 1]):
        if not x.is_integral():
            raise NonIntegralCoefficient(f"coefficient of T^{i} is {x!r}")
    P = LPolynomial([x.num for x in c[: N_expected + 1]])
    P.char_sums = S
    return P


# ------------------------------------------------------------------ polygons


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple  # ((x, y), ...) with x int, y Fraction, starting at (0, 0)

    @classmethod
    def lower_hull(cls, points) -> NewtonPolygon:
        pts = sorted({(int(x), Fraction(y)) for x, y in points})
        best: dict = {}
        for x, y in pts:
            if x not in best or y < best[x]:
                best[x] = y
        pts = sorted(best.items())
        hull: list = []
        for pt in pts:
            while len(hull) >= 2:
                (x1, y1), (x2, y2) = hull[-2], hull[-1]
                # drop the middle point unless it lies strictly below the chord
                if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                    hull.pop()
                else:
                    break
            hull.append(pt)
        return cls(tuple(hull))

    @property
    def extent(self) -> int:
        return self.vertices[-1][0] if self.vertices else 0

    @property
    def slopes(self) -> list[Fraction]:
        """Slopes with multiplicity (one per unit of horizontal length)."""
        out = []
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:]):
            out.extend([(y2 - y1) / (x2 - x1)] * (x2 - x1))
        return out

    def value_at(self, x) -> Fraction:
        x = Fraction(x)
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:]):
            if x1 <= x <= x2:
                return y1 + (y2 - y1) * (x - x1) / (x2 - x1)
        if self.vertices and x == self.vertices[0][0]:
            return self.vertices[0][1]
        raise ValueError(f"{x} outside the polygon")

    def lies_on_or_above(self, other: NewtonPolygon) -> bool:
        """Pointwise comparison over the common horizontal range."""
        top = min(self.extent, other.extent)
        xs = {x for x, _ in self.vertices + other.vertices if x <= top} | set(range(top + 1))
        return all(self.value_at(x) >= other.value_at(x) for x in xs)

    def to_rows(self) -> list[tuple[int, str]]:
        return [(x, str(y)) for x, y in self.vertices]


def _log_p(q: int) -> tuple[int, int]:
    p, a = None, 0
    for cand in range(2, q + 1):
        if q % cand == 0:
            p = cand
            break
    x = q
    while x > 1:
        if x % p:
            raise ValueError(f"{q} is not a prime power")
        x //= p
        a += 1
    return p, a


def newton_polygon(P: LPolynomial, q: int, deg_lambda: int = 1) -> NewtonPolygon:
    """Lower hull of (i, ord(c_i)) normalized so that ord(q^deg_lambda) = 1."""
    p, a = _log_p(q)
    pts = []
    for i, c in enumerate(P.coeffs):
        v = ord_p(c, p)
        if not v.is_infinite:
            pts.append((i, v.value / (a * deg_lambda)))
    return NewtonPolygon.lower_hull(pts)


def polygon_from_slopes(slopes) -> NewtonPolygon:
    pts = [(0, Fraction(0))]
    for s in sorted(Fraction(x) for x in slopes):
        x, y = pts[-1]
        pts.append((x + 1, y + s))
    return NewtonPolygon.lower_hull(pts)


def hodge_polygon(B) -> NewtonPolygon:
    """Polygon whose slopes are the basis weights (a HodgeBasis or a list of weights)."""
    weights = B.weights if isinstance(B, HodgeBasis) else B
    return polygon_from_slopes(weights)
