"""Rational polytopes containing the origin, their cones, weights and volumes.

Everything is exact. A polytope is presented by its vertices; facets are found
by brute force over vertex subsets, which is fine at the small dimensions used
here (ambient dimension <= 4 or so). Computations take place in coordinates
with respect to a basis of the saturated lattice ``span(P) & Z^s`` so that
volumes are normalized to the lattice in the span.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from math import factorial, gcd, lcm

import numpy as np

from .errors import DimensionMismatch, SeriesMismatch

__all__ = [
    "RationalPolytope",
    "WeightFn",
    "NOT_IN_CONE",
    "build_polytope",
    "weight",
    "normalized_volume",
    "poincare_series",
    "lattice_points_up_to_weight",
    "saturated_basis",
    "natural_period",
    "weight_counts",
]


class _NotInCone:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "NOT_IN_CONE"

    def __bool__(self):
        return False


NOT_IN_CONE = _NotInCone()


# ---------------------------------------------------------------- linear algebra


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def saturated_basis(rows: list[list[int]], dim: int) -> list[list[int]]:
    """Basis of ``span_Q(rows) & Z^dim`` via unimodular column operations.

    If ``A U = [H | 0]`` with U unimodular and H of full column rank r, the
    saturated lattice is spanned by the first r rows of U^-1.
    """
    A = [list(r) for r in rows if any(r)]
    Uinv = [[int(i == j) for j in range(dim)] for i in range(dim)]
    c = 0
    for row in range(len(A)):
        if c >= dim:
            break
        for j in range(c + 1, dim):
            a, b = A[row][c], A[row][j]
            if b == 0:
                continue
            g, x, y = _xgcd(a, b)
            # columns (c, j) <- (x*col_c + y*col_j, -b/g*col_c + a/g*col_j)
            for R in A:
                ac, aj = R[c], R[j]
                R[c], R[j] = x * ac + y * aj, (-b // g) * ac + (a // g) * aj
            # rows of U^-1 transform by the inverse 2x2 block
            rc, rj = Uinv[c], Uinv[j]
            Uinv[c] = [(a // g) * u + (b // g) * v for u, v in zip(rc, rj)]
            Uinv[j] = [-y * u + x * v for u, v in zip(rc, rj)]
        if A[row][c] != 0:
            c += 1
    return [Uinv[i] for i in range(c)]


def _rank(vectors: list[tuple[Fraction, ...]]) -> int:
    M = [list(v) for v in vectors]
    if not M:
        return 0
    rank, ncols = 0, len(M[0])
    for col in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][col] != 0:
                f = M[i][col] / M[rank][col]
                M[i] = [x - f * y for x, y in zip(M[i], M[rank])]
        rank += 1
    return rank


def _nullvector(vectors: list[tuple[Fraction, ...]], dim: int) -> tuple[Fraction, ...] | None:
    """A nonzero vector orthogonal to all ``vectors`` when their rank is dim-1."""
    M = [list(v) for v in vectors]
    pivots = []
    rank = 0
    for col in range(dim):
        piv = next((i for i in range(rank, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = 1 / M[rank][col]
        M[rank] = [x * inv for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][col] != 0:
                f = M[i][col]
                M[i] = [x - f * y for x, y in zip(M[i], M[rank])]
        pivots.append(col)
        rank += 1
    if rank != dim - 1:
        return None
    free = next(c for c in range(dim) if c not in pivots)
    v = [Fraction(0)] * dim
    v[free] = Fraction(1)
    for r, pc in enumerate(pivots):
        v[pc] = -M[r][free]
    return tuple(v)


def _det(M: list[list[Fraction]]) -> Fraction:
    M = [list(r) for r in M]
    n = len(M)
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if M[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        for i in range(col + 1, n):
            if M[i][col] != 0:
                f = M[i][col] / M[col][col]
                M[i] = [x - f * y for x, y in zip(M[i], M[col])]
    return det


def _inverse(M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    A = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for col in range(n):
        piv = next(i for i in range(col, n) if A[i][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for i in range(n):
            if i != col and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
    return [r[n:] for r in A]


def _primitive(a: tuple[Fraction, ...], b: Fraction) -> tuple[tuple[int, ...], int]:
    den = reduce(lcm, (x.denominator for x in (*a, b)), 1)
    ints = [int(x * den) for x in (*a, b)]
    g = reduce(gcd, ints, 0) or 1
    ints = [x // g for x in ints]
    return tuple(ints[:-1]), ints[-1]


# ------------------------------------------------------------------- polytopes


@dataclass(frozen=True)
class Facet:
    """Facet ``{normal . c == offset}`` in lattice coordinates; P lies in ``<=``."""

    normal: tuple[Fraction, ...]
    offset: Fraction
    vertices: frozenset[int]

    @property
    def contains_origin(self) -> bool:
        return self.offset == 0


@dataclass(eq=False)
class RationalPolytope:
    """Convex hull of a finite set of rational points together with the origin."""

    ambient_dim: int
    vertices: list[tuple[Fraction, ...]]
    basis: list[list[int]]
    coords: list[tuple[Fraction, ...]]
    facets: list[Facet]
    _coord_cols: list[int] = field(repr=False, default_factory=list)
    _coord_inv: list[list[Fraction]] = field(repr=False, default_factory=list)

    @property
    def span_dim(self) -> int:
        return len(self.basis)

    @property
    def origin_is_vertex(self) -> bool:
        return any(not any(v) for v in self.vertices)

    @property
    def weight_facets(self) -> list[Facet]:
        return [f for f in self.facets if f.offset != 0]

    @property
    def cone_facets(self) -> list[Facet]:
        return [f for f in self.facets if f.offset == 0]

    def coordinates(self, u) -> tuple[Fraction, ...] | None:
        """Coordinates of an ambient point in the lattice basis, or None if outside the span."""
        if len(u) != self.ambient_dim:
            raise DimensionMismatch(f"expected length {self.ambient_dim}, got {len(u)}")
        r = self.span_dim
        if r == 0:
            return () if not any(u) else None
        sub = [Fraction(u[j]) for j in self._coord_cols]
        c = tuple(sum(sub[i] * self._coord_inv[i][k] for i in range(r)) for k in range(r))
        back = self.to_ambient(c)
        if any(back[j] != u[j] for j in range(self.ambient_dim)):
            return None
        return c

    def to_ambient(self, c) -> tuple:
        return tuple(
            sum((c[i] * self.basis[i][j] for i in range(self.span_dim)), 0)
            for j in range(self.ambient_dim)
        )

    def in_cone(self, u) -> bool:
        c = self.coordinates(u)
        if c is None:
            return False
        return all(sum(a * x for a, x in zip(f.normal, c)) <= 0 for f in self.cone_facets)

    @cached_property
    def weight_fn(self) -> WeightFn:
        return WeightFn(self)

    @cached_property
    def volume(self) -> Fraction:
        return normalized_volume(self)

    def faces(self) -> list[frozenset[int]]:
        """All nonempty proper faces, as sets of vertex indices (including facets)."""
        found = {f.vertices for f in self.facets}
        frontier = set(found)
        while frontier:
            new = set()
            for F in frontier:
                for G in self.facets:
                    H = F & G.vertices
                    if H and H not in found:
                        new.add(H)
            found |= new
            frontier = new
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def face_contains_origin(self, face: frozenset[int]) -> bool:
        if len(face) == len(self.vertices):
            return True
        return all(f.offset == 0 for f in self.facets if face <= f.vertices)

    def affine_dim(self, ids) -> int:
        ids = sorted(ids)
        if not ids:
            return -1
        base = self.coords[ids[0]]
        return _rank([tuple(a - b for a, b in zip(self.coords[i], base)) for i in ids[1:]])

    def face_on_hyperplanes(self, face: frozenset[int]) -> list[Facet]:
        return [f for f in self.facets if face <= f.vertices]

    def point_in_face(self, u, face: frozenset[int]) -> bool:
        """Whether the ambient point u lies in the closed face."""
        c = self.coordinates(u)
        if c is None:
            return False
        for f in self.facets:
            val = sum(a * x for a, x in zip(f.normal, c))
            if val > f.offset:
                return False
            if face <= f.vertices and val != f.offset:
                return False
        return True


@dataclass(eq=False)
class WeightFn:
    """Polyhedral weight of a polytope; values lie in ``(1/D) Z_{>=0}``."""

    owner: RationalPolytope

    @cached_property
    def D(self) -> int:
        return reduce(
            lcm,
            (x.denominator for f in self.owner.weight_facets for x in (a / f.offset for a in f.normal)),
            1,
        )

    @cached_property
    def int_forms(self) -> np.ndarray:
        """Rows ``D * normal / offset`` as integers (one per weight facet)."""
        D = self.D
        rows = [[int(D * a / f.offset) for a in f.normal] for f in self.owner.weight_facets]
        return np.array(rows, dtype=np.int64).reshape(len(rows), self.owner.span_dim)

    @cached_property
    def int_cone_forms(self) -> np.ndarray:
        rows = []
        for f in self.owner.cone_facets:
            den = reduce(lcm, (a.denominator for a in f.normal), 1)
            rows.append([int(a * den) for a in f.normal])
        return np.array(rows, dtype=np.int64).reshape(len(rows), self.owner.span_dim)

    def __call__(self, u):
        return weight(self, u)

    def of_coords(self, c) -> Fraction:
        forms = self.owner.weight_facets
        if not forms:
            return Fraction(0)
        return max(max(sum(a * x for a, x in zip(f.normal, c)) / f.offset for f in forms), Fraction(0))


def build_polytope(points) -> RationalPolytope:
    """Hull of ``points`` and the origin, with irredundant vertices and facets."""
    points = [tuple(Fraction(x) for x in pt) for pt in points]
    if not points:
        raise DimensionMismatch("need at least one point to fix the ambient dimension")
    dim = len(points[0])
    if any(len(pt) != dim for pt in points):
        raise DimensionMismatch("points have different lengths")
    origin = (Fraction(0),) * dim
    pts = sorted(set(points) | {origin})

    rows = []
    for pt in pts:
        den = reduce(lcm, (x.denominator for x in pt), 1)
        rows.append([int(x * den) for x in pt])
    basis = saturated_basis(rows, dim)
    r = len(basis)

    if r == 0:
        return RationalPolytope(dim, [origin], [], [()], [])

    B = [[Fraction(x) for x in row] for row in basis]
    cols = None
    for cand in itertools.combinations(range(dim), r):
        if _det([[B[i][j] for j in cand] for i in range(r)]) != 0:
            cols = list(cand)
            break
    inv = _inverse([[B[i][j] for j in cols] for i in range(r)])

    def coords_of(pt):
        sub = [pt[j] for j in cols]
        return tuple(sum(sub[i] * inv[i][k] for i in range(r)) for k in range(r))

    coords = [coords_of(pt) for pt in pts]
    facets = _facets(coords, r)

    # a point is a vertex iff the normals of facets through it have full rank
    keep = []
    for i in range(len(pts)):
        normals = [f.normal for f in facets if i in f.vertices]
        if r == 1 or _rank(normals) == r:
            if r == 1 and not normals:
                continue
            keep.append(i)
    remap = {old: new for new, old in enumerate(keep)}
    facets = [Facet(f.normal, f.offset, frozenset(remap[i] for i in f.vertices if i in remap)) for f in facets]
    poly = RationalPolytope(
        dim,
        [pts[i] for i in keep],
        basis,
        [coords[i] for i in keep],
        facets,
        cols,
        inv,
    )
    return poly


def _facets(coords: list[tuple[Fraction, ...]], r: int) -> list[Facet]:
    seen = {}
    n = len(coords)
    if r == 1:
        xs = [c[0] for c in coords]
        lo, hi = min(xs), max(xs)
        out = [
            Facet((Fraction(1),), hi, frozenset(i for i in range(n) if xs[i] == hi)),
            Facet((Fraction(-1),), -lo, frozenset(i for i in range(n) if xs[i] == lo)),
        ]
        return out
    for subset in itertools.combinations(range(n), r):
        base = coords[subset[0]]
        diffs = [tuple(a - b for a, b in zip(coords[i], base)) for i in subset[1:]]
        a = _nullvector(diffs, r)
        if a is None:
            continue
        b = sum(x * y for x, y in zip(a, base))
        vals = [sum(x * y for x, y in zip(a, c)) for c in coords]
        if all(v <= b for v in vals):
            pass
        elif all(v >= b for v in vals):
            a = tuple(-x for x in a)
            b = -b
            vals = [-v for v in vals]
        else:
            continue
        key = _primitive(a, b)
        if key in seen:
            continue
        normal = tuple(Fraction(x) for x in key[0])
        offset = Fraction(key[1])
        on = frozenset(i for i in range(n) if sum(x * y for x, y in zip(normal, coords[i])) == offset)
        seen[key] = Facet(normal, offset, on)
    return sorted(seen.values(), key=lambda f: (f.offset == 0, sorted(f.vertices)))


def weight(w: WeightFn, u):
    """Smallest c >= 0 with u in c*P, or NOT_IN_CONE."""
    poly = w.owner
    c = poly.coordinates(u)
    if c is None:
        return NOT_IN_CONE
    if any(sum(a * x for a, x in zip(f.normal, c)) > 0 for f in poly.cone_facets):
        return NOT_IN_CONE
    return w.of_coords(c)


def _triangulate(poly: RationalPolytope, face: frozenset[int], k: int, memo: dict) -> list[tuple[int, ...]]:
    if k == 0:
        return [(min(face),)]
    key = face
    if key in memo:
        return memo[key]
    v0 = min(face)
    subfaces = set()
    for f in poly.facets:
        G = face & f.vertices
        if G != face and v0 not in G and G and poly.affine_dim(G) == k - 1:
            subfaces.add(G)
    out = []
    for G in sorted(subfaces, key=sorted):
        for simplex in _triangulate(poly, G, k - 1, memo):
            out.append((v0,) + simplex)
    memo[key] = out
    return out


def triangulation(poly: RationalPolytope) -> list[tuple[int, ...]]:
    """Pulling triangulation from the least vertex, as vertex-index simplices."""
    r = poly.span_dim
    if r == 0:
        return [(0,)]
    return _triangulate(poly, frozenset(range(len(poly.vertices))), r, {})


def normalized_volume(P: RationalPolytope) -> Fraction:
    """Volume of P in its span, normalized so a lattice fundamental domain has volume 1."""
    r = P.span_dim
    if r == 0:
        return Fraction(0)
    total = Fraction(0)
    for simplex in triangulation(P):
        base = P.coords[simplex[0]]
        M = [[a - b for a, b in zip(P.coords[i], base)] for i in simplex[1:]]
        total += abs(_det(M))
    return total / factorial(r)


def _coord_box(P: RationalPolytope, wmax: Fraction):
    r = P.span_dim
    ranges = []
    for k in range(r):
        vals = [c[k] * wmax for c in P.coords] + [Fraction(0)]
        lo, hi = min(vals), max(vals)
        ranges.append((lo.__floor__(), hi.__ceil__()))
    return ranges


def _enumerate_coords(P: RationalPolytope, wmax: Fraction):
    """Integer lattice coordinates with weight <= wmax and their D*weights."""
    w = P.weight_fn
    r = P.span_dim
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64), np.zeros(1, dtype=np.int64)
    ranges = _coord_box(P, wmax)
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in ranges]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, r)
    if w.int_cone_forms.shape[0]:
        ok = np.all(grid @ w.int_cone_forms.T <= 0, axis=1)
        grid = grid[ok]
    if w.int_forms.shape[0]:
        dw = np.max(grid @ w.int_forms.T, axis=1)
        dw = np.maximum(dw, 0)
    else:
        dw = np.zeros(len(grid), dtype=np.int64)
    bound = int((wmax * w.D).__floor__())
    ok = dw <= bound
    return grid[ok], dw[ok]


def lattice_points_up_to_weight(P: RationalPolytope, w: WeightFn | None, wmax):
    """Yield ``(u, w(u))`` for each lattice point of the cone with weight <= wmax, once."""
    w = w or P.weight_fn
    wmax = Fraction(wmax)
    if wmax < 0:
        return
    grid, dw = _enumerate_coords(P, wmax)
    out = []
    for c, d in zip(grid.tolist(), dw.tolist()):
        u = tuple(int(x) for x in P.to_ambient(c)) if P.span_dim else (0,) * P.ambient_dim
        out.append((d, u))
    out.sort()
    for d, u in out:
        yield u, Fraction(d, w.D)


def weight_counts(P: RationalPolytope, upto: int) -> list[int]:
    """``W'(N) = #{u : D*w(u) = N}`` for N = 0..upto."""
    w = P.weight_fn
    _, dw = _enumerate_coords(P, Fraction(upto, w.D))
    return np.bincount(dw, minlength=upto + 1)[: upto + 1].tolist()


def _times_one_minus(series: list[int], period: int, times: int) -> list[int]:
    out = list(series)
    for _ in range(times):
        out = [out[i] - (out[i - period] if i >= period else 0) for i in range(len(out))]
    return out


def natural_period(P: RationalPolytope) -> int:
    """lcm of ``D*w`` over primitive lattice points on the rays through the vertices.

    Equals a divisor of D for lattice polytopes; for rational polytopes it can
    fail to divide D, and then the series is rational only over this period.
    """
    w = P.weight_fn
    out = 1
    for c in P.coords:
        if not any(c):
            continue
        den = reduce(lcm, (x.denominator for x in c), 1)
        ints = [int(x * den) for x in c]
        g = reduce(gcd, ints, 0)
        prim = [x // g for x in ints]
        out = lcm(out, int(w.of_coords(prim) * w.D))
    return out


def poincare_series(P: RationalPolytope, w: WeightFn | None = None, guard: int = 2, period: int | None = None):
    """Numerator of ``sum_N W'(N) T^N = Pnum(T) / (1 - T^period)^s~``.

    ``period`` defaults to D. Counts are enumerated up to ``N = D*(s~+1) + guard*D``
    and every computed term must agree with the rational form.
    Returns ``(Pnum coefficients, s~)``.
    """
    if guard < 1:
        raise ValueError("guard must be >= 1")
    w = w or P.weight_fn
    D = w.D
    period = period or D
    st = P.span_dim
    upto = D * (st + 1) + guard * D
    upto = max(upto, period * (st + 1) + guard * period)
    counts = weight_counts(P, upto)
    num = _times_one_minus(counts, period, st)
    deg_cap = st * period
    if any(num[deg_cap + 1 :]):
        bad = next(i for i in range(deg_cap + 1, len(num)) if num[i])
        raise SeriesMismatch(f"numerator has nonzero coefficient at T^{bad} (> {deg_cap})")
    num = num[: deg_cap + 1]
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return num, st
