"""Laurent polynomials over finite fields, Newton polyhedra at infinity,
nondegeneracy, the cofacial graded ring and its monomial (Hodge) basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial, lcm

import numpy as np

from .errors import DimensionDeficient, DimensionMismatch, NotConvenient, NotInCone, RankOverflow
from .ffield import GF, FieldTower
from .polytope import RationalPolytope, build_polytope, lattice_points_up_to_weight


@dataclass
class LaurentPoly:
    """Sparse Laurent polynomial with coefficients in the tower level ``level``.

    Coefficients are field encodings (see ``ffield``); zero terms are dropped.
    """

    n: int
    terms: dict
    tower: FieldTower
    level: int | None = None

    def __post_init__(self):
        if self.level is None:
            self.level = self.tower.a
        clean = {}
        for mu, c in self.terms.items():
            mu = tuple(int(x) for x in mu)
            if len(mu) != self.n:
                raise DimensionMismatch(f"exponent {mu} has length != {self.n}")
            c = int(c)
            if not 0 <= c < self.field.order:
                raise ValueError(f"coefficient encoding {c} outside F_{self.field.order}")
            if c:
                clean[mu] = c
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def from_terms(cls, tower: FieldTower, n: int, pairs, level: int | None = None) -> LaurentPoly:
        """Build from (exponent, coefficient) pairs, adding repeated exponents."""
        level = tower.a if level is None else level
        F = tower.level(level)
        acc: dict = {}
        for mu, c in pairs:
            mu = tuple(int(x) for x in mu)
            acc[mu] = int(F.add(acc.get(mu, 0), int(c)))
        return cls(n, acc, tower, level)

    @property
    def field(self) -> GF:
        return self.tower.level(self.level)

    @property
    def support(self) -> list[tuple[int, ...]]:
        return list(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        body = " + ".join(f"{c}*x^{list(mu)}" for mu, c in self.terms.items()) or "0"
        return f"LaurentPoly(n={self.n}, {body} over F_{self.field.order})"

    def restrict(self, exps) -> LaurentPoly:
        keep = set(map(tuple, exps))
        return LaurentPoly(self.n, {mu: c for mu, c in self.terms.items() if mu in keep}, self.tower, self.level)

    def log_partial(self, i: int) -> LaurentPoly:
        """x_i * d/dx_i."""
        F = self.field
        out = {mu: int(F.scale_int(mu[i], c)) for mu, c in self.terms.items()}
        return LaurentPoly(self.n, out, self.tower, self.level)

    def embed(self, level: int) -> LaurentPoly:
        """The same polynomial with coefficients viewed in a larger level."""
        emb = {mu: int(self.tower.embed(c, self.level, level)) for mu, c in self.terms.items()}
        return LaurentPoly(self.n, emb, self.tower, level)

    def evaluate(self, pts: np.ndarray, level: int | None = None) -> np.ndarray:
        """Values at the rows of ``pts`` (encodings in ``level``)."""
        level = level or self.level
        F = self.tower.level(level)
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, self.n)
        acc = np.zeros(len(pts), dtype=np.int64)
        for mu, c in self.terms.items():
            c_up = int(self.tower.embed(c, self.level, level))
            acc = F.add(acc, monomial_values(F, pts, mu, c_up))
        return acc


def monomial_values(F: GF, pts: np.ndarray, mu, coeff: int) -> np.ndarray:
    """coeff * x^mu at each row of pts; zero coordinates allowed where mu_i >= 0."""
    n1 = F.order - 1
    logs = F.log[pts]
    total = np.full(len(pts), int(F.log[coeff]), dtype=np.int64)
    zero = np.zeros(len(pts), dtype=bool)
    for i, e in enumerate(mu):
        if e == 0:
            continue
        li = logs[:, i]
        isz = li < 0
        if e < 0 and np.any(isz):
            raise ZeroDivisionError("negative exponent at a zero coordinate")
        zero |= isz
        total = total + np.where(isz, 0, li) * (e % n1)
    vals = F.exp[total % n1]
    return np.where(zero, 0, vals)


# ------------------------------------------------------------- Newton data


@dataclass
class NewtonData:
    delta: RationalPolytope
    faces: list  # vertex-index sets of the closed faces not containing 0

    @property
    def w(self):
        return self.delta.weight_fn

    def face_vertices(self, face) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in self.delta.vertices[i]) for i in sorted(face)]

    def face_support(self, f: LaurentPoly, face) -> list[tuple[int, ...]]:
        return [mu for mu in f.support if self.delta.point_in_face(mu, face)]


def newton_data(f: LaurentPoly) -> NewtonData:
    if not f:
        raise ValueError("zero polynomial has no Newton polyhedron")
    delta = build_polytope(f.support)
    if delta.span_dim < f.n:
        raise DimensionDeficient(f"dim of Newton polyhedron is {delta.span_dim} < n = {f.n}")
    faces = [F for F in delta.faces() if not delta.face_contains_origin(F)]
    return NewtonData(delta, faces)


# ---------------------------------------------------------- nondegeneracy


@dataclass(frozen=True)
class CertifiedUpTo:
    """No common zero of the face partials over F_{Q^k}^* for every k <= ``k``."""

    k: int

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Degenerate:
    face: tuple  # vertices of the offending face
    witness: tuple  # point encodings in F_{Q^k}
    k: int

    def __bool__(self):
        return False


def is_nondegenerate(f: LaurentPoly, k_max: int = 6, budget: int = 1 << 20):
    """Search (F_{Q^k}^*)^n, k <= k_max, for common zeros of the face partials.

    Q is the coefficient field of ``f``. Levels whose point count exceeds
    ``budget`` are skipped, and the certificate reports the last level searched.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    nd = newton_data(f)
    tower = f.tower
    face_polys = []
    for face in nd.faces:
        g = f.restrict(nd.face_support(f, face))
        face_polys.append((face, [g.log_partial(i) for i in range(f.n)]))
    certified = 0
    for k in range(1, k_max + 1):
        level = f.level * k
        Q = tower.p**level
        if (Q - 1) ** f.n > budget or Q > tower.max_field:
            break
        F = tower.level(level)
        units = F.units()
        grids = np.meshgrid(*([units] * f.n), indexing="ij")
        pts = np.stack([g.reshape(-1) for g in grids], axis=1)
        for face, partials in face_polys:
            cand = pts
            for g in partials:
                if not len(cand):
                    break
                vals = g.evaluate(cand, level)
                cand = cand[vals == 0]
            if len(cand):
                return Degenerate(tuple(nd.face_vertices(face)), tuple(int(x) for x in cand[0]), k)
        certified = k
    return CertifiedUpTo(certified)


# ------------------------------------------------------- cofacial grading


class GradedRing:
    """Integer-valued weight forms of a full-dimensional polytope in ambient coordinates."""

    def __init__(self, delta: RationalPolytope):
        n = delta.ambient_dim
        if delta.span_dim != n:
            raise DimensionDeficient("graded ring needs a full-dimensional polytope")
        self.delta = delta
        self.D = delta.weight_fn.D
        cols = []
        ccols = []
        for j in range(n):
            e = tuple(1 if i == j else 0 for i in range(n))
            c = delta.coordinates(e)
            cols.append([self.D * sum(a * x for a, x in zip(f.normal, c)) / f.offset for f in delta.weight_facets])
            ccols.append([sum(a * x for a, x in zip(f.normal, c)) for f in delta.cone_facets])
        self.forms = np.array([[int(v) for v in col] for col in cols], dtype=np.int64).T.reshape(-1, n)
        cden = []
        for row in zip(*ccols):
            den = lcm(*(Fraction(v).denominator for v in row))
            cden.append([int(v * den) for v in row])
        self.cone = np.array(cden, dtype=np.int64).reshape(-1, n)

    def in_cone(self, u) -> bool:
        return bool(np.all(self.cone @ np.asarray(u, dtype=np.int64) <= 0))

    def dweight(self, u) -> int:
        """D * w(u) for u in the cone."""
        if not len(self.forms):
            return 0
        return max(int(np.max(self.forms @ np.asarray(u, dtype=np.int64))), 0)

    def cofacial(self, mu, nu) -> bool:
        if not (self.in_cone(mu) and self.in_cone(nu)):
            raise NotInCone(f"{mu} or {nu} is outside the cone")
        a = self.forms @ np.asarray(mu, dtype=np.int64)
        b = self.forms @ np.asarray(nu, dtype=np.int64)
        return bool(np.any((a == max(a.max(), 0)) & (b == max(b.max(), 0))))


def cofacial(delta: RationalPolytope, mu, nu) -> bool:
    """Whether x^mu * x^nu survives in the graded ring (rays meet a common closed face)."""
    return GradedRing(delta).cofacial(mu, nu)


# ------------------------------------------------------------ Hodge basis


@dataclass
class HodgeBasis:
    monomials: list
    weights: list
    D: int
    S2: tuple = ()
    rank_by_level: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.monomials)

    @property
    def weight_multiset(self) -> list[Fraction]:
        return sorted(self.weights)


def _row_reduce(F: GF, M: np.ndarray) -> list[int]:
    """Pivot columns of the row-reduced echelon form of M over F (M is modified)."""
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if not len(nz):
            continue
        k = r + nz[0]
        if k != r:
            M[[r, k]] = M[[k, r]]
        M[r] = F.mul(F.inv(M[r, c]), M[r])
        others = np.flatnonzero(M[:, c])
        others = others[others != r]
        if len(others):
            factors = M[others, c]
            M[others] = F.sub(M[others], F.mul(factors[:, None], M[r][None, :]))
        pivots.append(c)
        r += 1
    return pivots


def expected_rank(f: LaurentPoly, S2=()) -> int:
    if S2:
        return int(upsilon(f, S2))
    nd = newton_data(f)
    return int(factorial(f.n) * nd.delta.volume)


def hodge_basis(f: LaurentPoly, S2=(), order=None) -> HodgeBasis:
    """Monomial basis of the graded quotient by the weight-one log partials.

    ``S2`` lists variables (0-based) restricted to the ideal of monomials
    divisible by them. ``order`` is a sort key on exponent vectors; the
    cokernel prefers monomials that sort last (default: lexicographic).
    """
    S2 = tuple(sorted(S2))
    nd = newton_data(f)
    ring = GradedRing(nd.delta)
    D = ring.D
    n = f.n
    F = f.field
    target = expected_rank(f, S2)
    key = order or (lambda mu: mu)

    top = [mu for mu in f.support if ring.dweight(mu) == D]
    partials = [[(mu, int(F.scale_int(mu[l], f.terms[mu]))) for mu in top] for l in range(n)]
    partials = [[(mu, c) for mu, c in terms if c] for terms in partials]

    by_level: dict[int, list] = {}
    for u, wu in lattice_points_up_to_weight(nd.delta, None, n + 1):
        by_level.setdefault(int(wu * D), []).append(u)

    def in_ideal(u, skip=None):
        return all(u[j] >= 1 for j in S2 if j != skip)

    monos, weights, ranks = [], [], {}
    for lev in range(0, D * (n + 1) + 1):
        targets = sorted((u for u in by_level.get(lev, []) if in_ideal(u)), key=key)
        if not targets:
            continue
        col = {u: i for i, u in enumerate(targets)}
        rows = []
        for l in range(n):
            for nu in by_level.get(lev - D, []):
                if not in_ideal(nu, skip=l):
                    continue
                row = np.zeros(len(targets), dtype=np.int64)
                for mu, c in partials[l]:
                    if ring.cofacial(mu, nu):
                        s = tuple(a + b for a, b in zip(mu, nu))
                        row[col[s]] = F.add(row[col[s]], c)
                if row.any():
                    rows.append(row)
        pivots = _row_reduce(F, np.array(rows, dtype=np.int64)) if rows else []
        ranks[Fraction(lev, D)] = len(pivots)
        chosen = [targets[i] for i in range(len(targets)) if i not in set(pivots)]
        if chosen and lev > D * n:
            raise RankOverflow(f"nonzero cokernel at weight {Fraction(lev, D)} > n")
        monos.extend(chosen)
        weights.extend([Fraction(lev, D)] * len(chosen))
        if len(monos) > target:
            raise RankOverflow(f"basis size {len(monos)} exceeds expected rank {target}")
    if len(monos) != target:
        raise RankOverflow(f"basis size {len(monos)} != expected rank {target}")
    return HodgeBasis(monos, weights, D, S2, ranks)


# --------------------------------------------------------------- upsilon


def upsilon(f: LaurentPoly, S2) -> Fraction:
    """Alternating sum over A in S2 of (-1)^|A| (n-|A|)! vol(Newton polyhedron of f_A)."""
    S2 = tuple(sorted(set(S2)))
    n = f.n
    for mu in f.support:
        for j in S2:
            if mu[j] < 0:
                raise ValueError(f"variable {j} appears with a negative exponent; it cannot be affine")
    total = Fraction(0)
    for size in range(len(S2) + 1):
        for A in combinations(S2, size):
            keep = [i for i in range(n) if i not in A]
            pts = [tuple(mu[i] for i in keep) for mu in f.support if all(mu[j] == 0 for j in A)]
            m = n - size
            if m == 0:
                vol = Fraction(1)
            else:
                if not pts:
                    raise NotConvenient(A)
                P = build_polytope(pts)
                if P.span_dim != m:
                    raise NotConvenient(A)
                vol = P.volume
            total += (-1) ** size * factorial(m) * vol
    return total
