"""Finite fields F_{p^m} with log tables, compatible towers, and closed points.

Elements are encoded as integers ``sum c_i p^i`` where ``(c_0, ..., c_{m-1})``
is the coefficient vector over F_p with respect to the level's modulus. Each
level carries exp/log tables for a primitive element chosen so that, for every
built level k dividing m, ``g_m^((p^m-1)/(p^k-1)) = g_k``. Embeddings between
levels are then plain multiplications of discrete logarithms.

Arrays of elements are numpy int64 arrays; the scalar helpers accept ints.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd

import numpy as np
import sympy

from .errors import CountMismatch, FieldTooLarge, NotPrime, ReducibleModulus

DEFAULT_MAX_FIELD = 1 << 22


# ----------------------------------------------------------- F_p[x] helpers


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, f, p):
    a = [x % p for x in a]
    _trim(a)
    df = len(f) - 1
    inv = pow(f[-1], -1, p)
    while len(a) - 1 >= df and a:
        coef = a[-1] * inv % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - coef * fc) % p
        _trim(a)
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _ppowmod(base, e, f, p):
    result = [1]
    base = _pmod(base, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def is_irreducible(f, p) -> bool:
    """Rabin's test for a monic polynomial (coefficients low to high) over F_p."""
    m = len(f) - 1
    if m <= 0:
        return False
    if m == 1:
        return True
    x = [0, 1]
    if _psub(_ppowmod(x, p**m, f, p), x, p):
        return False
    for ell in sympy.primefactors(m):
        h = _psub(_ppowmod(x, p ** (m // ell), f, p), x, p)
        if len(_pgcd(f, h, p)) != 1:
            return False
    return True


def smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Least monic irreducible of degree m, scanning constant-term-first encodings."""
    for k in range(p**m):
        digits = [(k // p**i) % p for i in range(m)]
        f = digits + [1]
        if m > 1 and digits[0] == 0:
            continue
        if is_irreducible(f, p):
            return tuple(f)
    raise ReducibleModulus(f"no irreducible polynomial of degree {m} over F_{p}")  # unreachable


# ----------------------------------------------------------------- one level


class GF:
    """The field F_{p^m} defined by ``modulus`` (monic, coefficients low to high)."""

    def __init__(self, p: int, modulus, tower=None, constraints=()):
        self.p = p
        self.modulus = tuple(modulus)
        self.m = len(self.modulus) - 1
        self.order = p**self.m
        self.tower = tower
        self._build(constraints)

    def __repr__(self):
        return f"GF({self.p}^{self.m})"

    # -- construction

    def _scalar_mul_poly(self, a: int, b: int) -> int:
        pa, pb = self._digits(a), self._digits(b)
        return self._encode(_pmod(_pmul(pa, pb, self.p), list(self.modulus), self.p))

    def _digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.m):
            out.append(a % p)
            a //= p
        return out

    def _encode(self, digits) -> int:
        p = self.p
        val = 0
        for d in reversed(list(digits)):
            val = val * p + d
        return val

    def _digit_array(self, arr):
        p = self.p
        out = np.empty((len(arr), self.m), dtype=np.int64)
        x = np.array(arr, dtype=np.int64)
        for i in range(self.m):
            out[:, i] = x % p
            x //= p
        return out

    def _from_digit_array(self, digs):
        p = self.p
        val = np.zeros(digs.shape[0], dtype=np.int64)
        for i in reversed(range(self.m)):
            val = val * p + digs[:, i]
        return val

    def _mul_matrix(self, c: int) -> np.ndarray:
        cols = [self._digits(self._scalar_mul_poly(c, self.p**j)) for j in range(self.m)]
        return np.array(cols, dtype=np.int64).T

    def _element_order_ok(self, e: int, factors) -> bool:
        n = self.order - 1
        poly = self._digits(e)
        for ell in factors:
            if _ppowmod(poly, n // ell, list(self.modulus), self.p) == [1]:
                return False
        return True

    def _build(self, constraints):
        p, Q = self.p, self.order
        n = Q - 1
        factors = sympy.primefactors(n) if n > 1 else []
        h = next(e for e in range(1, Q) if self._element_order_ok(e, factors))
        # exp table of h, blockwise: sequential powers then constant multiplications
        B = max(1, int(n**0.5))
        first = [1]
        for _ in range(B - 1):
            first.append(self._scalar_mul_poly(first[-1], h))
        first = np.array(first[: min(B, n)], dtype=np.int64)
        exp = np.empty(n, dtype=np.int64)
        exp[: len(first)] = first
        hB = self._scalar_mul_poly(int(first[-1]), h) if n > 1 else 1
        digs = self._digit_array(first)
        c = hB
        pos = len(first)
        while pos < n:
            Mc = self._mul_matrix(c)
            block = self._from_digit_array((digs @ Mc.T) % p)
            take = min(len(block), n - pos)
            exp[pos : pos + take] = block[:take]
            pos += take
            c = self._scalar_mul_poly(c, hB)
        log = np.full(Q, -1, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)

        x = 1
        if constraints:
            self.exp, self.log = exp, log
            x = self._solve_compatible(constraints, factors)
        inv_x = pow(x, -1, n) if n > 1 else 0
        if x != 1:
            exp = exp[(np.arange(n, dtype=np.int64) * x) % n]
            log = np.where(log >= 0, (log * inv_x) % n, -1)
        self.exp = exp
        self.log = log
        self.gen = int(exp[1 % n]) if n > 1 else 1

    def _solve_compatible(self, constraints, factors) -> int:
        """Exponent x making h^x compatible with each (k, minimal polynomial of g_k)."""
        n = self.order - 1
        xs = np.arange(1, n + 1, dtype=np.int64) % n if n > 1 else np.array([1])
        mask = np.ones(len(xs), dtype=bool)
        for ell in factors:
            mask &= xs % ell != 0
        for k, minpoly in constraints:
            nk = self.p**k - 1
            c = n // nk
            js = np.arange(nk, dtype=np.int64)
            cand = self.exp[(js * c) % n] if n > 1 else np.array([1])
            vals = self.poly_eval(minpoly, cand)
            roots = js[vals == 0]
            mask &= np.isin(xs % nk, roots)
        hit = np.flatnonzero(mask)
        if not len(hit):
            raise ReducibleModulus("no compatible primitive element")  # not expected
        return int(xs[hit[0]]) or n

    # -- arithmetic (vectorised; ints are accepted and returned as numpy scalars)

    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        p, out, pw = self.p, np.zeros(np.broadcast(a, b).shape, dtype=np.int64), 1
        for _ in range(self.m):
            out += (((a // pw) % p + (b // pw) % p) % p) * pw
            pw *= p
        return out

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        p, out, pw = self.p, np.zeros(a.shape, dtype=np.int64), 1
        for _ in range(self.m):
            out += ((p - (a // pw) % p) % p) * pw
            pw *= p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        n = self.order - 1
        la, lb = self.log[a], self.log[b]
        out = self.exp[(la + lb) % n]
        return np.where((la < 0) | (lb < 0), 0, out)

    def scale_int(self, k: int, a):
        """k * a for an integer k (repeated addition in characteristic p)."""
        k %= self.p
        return self.mul(np.asarray(k, dtype=np.int64), a)

    def pow(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        n = self.order - 1
        la = self.log[a]
        if e == 0:
            return np.ones(a.shape, dtype=np.int64)
        if e < 0:
            if np.any(la < 0):
                raise ZeroDivisionError("negative power of zero")
        out = self.exp[(la * (e % n)) % n]
        return np.where(la < 0, 0, out)

    def inv(self, a):
        return self.pow(a, -1)

    def frobenius(self, a, k: int = 1):
        """a^(p^k)."""
        return self.pow(a, pow(self.p, k, self.order - 1) or (self.order - 1))

    def poly_eval(self, coeffs, xs):
        """Evaluate a polynomial with coefficients (low to high) in this field."""
        xs = np.asarray(xs, dtype=np.int64)
        acc = np.zeros(xs.shape, dtype=np.int64)
        for c in reversed(list(coeffs)):
            acc = self.add(self.mul(acc, xs), np.int64(c))
        return acc

    def elements(self):
        return np.arange(self.order, dtype=np.int64)

    def units(self):
        return np.arange(1, self.order, dtype=np.int64)

    @cached_property
    def abs_trace(self) -> np.ndarray:
        """Table of Tr_{F_{p^m}/F_p} for every element, as integers in 0..p-1."""
        elts = self.elements()
        acc = np.zeros(self.order, dtype=np.int64)
        cur = elts
        for _ in range(self.m):
            acc = self.add(acc, cur)
            cur = self.pow(cur, self.p)
        if np.any(acc >= self.p):
            raise ArithmeticError("trace left the prime field")  # unreachable
        return acc

    def minimal_polynomial_of_gen(self) -> list[int]:
        """Minimal polynomial over F_p of the chosen primitive element."""
        poly = [1]
        for i in range(self.m):
            root = int(self.frobenius(self.gen, i))
            # poly *= (X - root)
            new = [0] * (len(poly) + 1)
            for j, c in enumerate(poly):
                new[j + 1] = int(self.add(new[j + 1], c))
                new[j] = int(self.add(new[j], self.neg(self.mul(c, root))))
            poly = new
        if any(c >= self.p for c in poly):
            raise ArithmeticError("minimal polynomial not over F_p")  # unreachable
        return poly


# ---------------------------------------------------------------------- tower


class FieldTower:
    """Compatible levels F_{p^m}; ``field(r)`` is F_{q^r} with q = p^a."""

    def __init__(self, p: int, a: int = 1, modulus=None, max_field: int = DEFAULT_MAX_FIELD):
        if not sympy.isprime(p):
            raise NotPrime(f"{p} is not prime")
        if a < 1:
            raise ValueError("a must be positive")
        self.p = p
        self.a = a
        self.q = p**a
        self.max_field = max_field
        self.levels: dict[int, GF] = {}
        self.certificates: dict[int, tuple[int, ...]] = {}
        self._base_modulus = None
        if modulus is not None:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) - 1 != a or modulus[-1] != 1 or not is_irreducible(list(modulus), p):
                raise ReducibleModulus(f"{modulus} is not a monic irreducible of degree {a}")
            self._base_modulus = modulus

    def __repr__(self):
        return f"FieldTower(p={self.p}, a={self.a}, levels={sorted(self.levels)})"

    def level(self, m: int) -> GF:
        """F_{p^m}, built together with all its subfields."""
        if m in self.levels:
            return self.levels[m]
        if self.p**m > self.max_field:
            raise FieldTooLarge(f"F_{self.p}^{m} has {self.p ** m} elements (budget {self.max_field})")
        for k in sympy.divisors(m)[:-1]:
            self.level(k)
        if m == self.a and self._base_modulus is not None:
            modulus = self._base_modulus
        else:
            modulus = smallest_irreducible(self.p, m)
        constraints = [
            (k, self.levels[k].minimal_polynomial_of_gen()) for k in sorted(self.levels) if m % k == 0 and k < m
        ]
        F = GF(self.p, modulus, self, constraints)
        F.degree = m
        self.levels[m] = F
        self.certificates[m] = modulus
        return F

    def field(self, r: int = 1) -> GF:
        return self.level(self.a * r)

    @property
    def base(self) -> GF:
        return self.field(1)

    def embed(self, x, k: int, m: int):
        """Image of elements of level k in level m (k | m)."""
        if m % k:
            raise ValueError(f"F_p^{k} is not a subfield of F_p^{m}")
        x = np.asarray(x, dtype=np.int64)
        if k == m:
            return x
        src, dst = self.level(k), self.level(m)
        c = (dst.order - 1) // (src.order - 1)
        lx = src.log[x]
        return np.where(lx < 0, 0, dst.exp[(lx * c) % (dst.order - 1)])

    def restrict(self, y, m: int, k: int):
        """Inverse of ``embed`` for elements of level m lying in level k."""
        y = np.asarray(y, dtype=np.int64)
        if k == m:
            return y
        src, dst = self.level(m), self.level(k)
        c = (src.order - 1) // (dst.order - 1)
        ly = src.log[y]
        if np.any((ly >= 0) & (ly % c != 0)):
            raise ValueError("element does not lie in the subfield")
        return np.where(ly < 0, 0, dst.exp[(ly // c) % (dst.order - 1)])

    def trace(self, x, r: int, k: int = 1):
        """Tr_{F_{q^(k r)} / F_{q^k}}(x) for x in F_{q^(k r)}, returned in F_{q^k}."""
        m = self.a * k * r
        F = self.level(m)
        acc = np.zeros(np.shape(x), dtype=np.int64)
        cur = np.asarray(x, dtype=np.int64)
        for _ in range(r):
            acc = F.add(acc, cur)
            cur = F.pow(cur, self.q**k)
        return self.restrict(acc, m, self.a * k)


def build_tower(p: int, a: int = 1, r_max: int = 1, modulus=None, max_field: int = DEFAULT_MAX_FIELD) -> FieldTower:
    """Tower with F_{q^r} built for every r <= r_max that fits the budget."""
    tower = FieldTower(p, a, modulus, max_field)
    for r in range(1, r_max + 1):
        if p ** (a * r) <= max_field:
            tower.field(r)
    return tower


def trace(tower: FieldTower, x, r: int):
    """Tr_{F_{q^r}/F_q}(x)."""
    return tower.trace(x, r)


# -------------------------------------------------------------- closed points


@dataclass(frozen=True)
class ClosedPoint:
    """Frobenius orbit of degree ``degree``; ``rep`` encodes coordinates in F_{q^degree}."""

    degree: int
    rep: tuple[int, ...]

    def __str__(self):
        return f"deg {self.degree} {list(self.rep)}"


def _mobius(n: int) -> int:
    return int(sympy.mobius(n))


def expected_point_count(q: int, s: int, d: int, kind: str) -> int:
    total = 0
    for e in sympy.divisors(d):
        base = (q**e - 1) ** s if kind == "torus" else q ** (e * s)
        total += _mobius(d // e) * base
    return total // d


def _space_points(F: GF, s: int, kind: str) -> np.ndarray:
    vals = F.units() if kind == "torus" else F.elements()
    if s == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*([vals] * s), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


def rational_points(tower: FieldTower, s: int, kind: str, r: int = 1) -> np.ndarray:
    """All points of the s-dimensional torus or affine space over F_{q^r}."""
    return _space_points(tower.field(r), s, kind)


def closed_points(tower: FieldTower, s: int, kind: str, d_max: int) -> dict[int, list[ClosedPoint]]:
    """Closed points of degree <= d_max of ``kind`` in {"torus", "affine"}, grouped by degree."""
    if kind not in ("torus", "affine"):
        raise ValueError(f"unknown space {kind!r}")
    out = {}
    q = tower.q
    for d in range(1, d_max + 1):
        F = tower.field(d)
        pts = _space_points(F, s, kind)
        Q = F.order
        weights = Q ** np.arange(s - 1, -1, -1, dtype=np.int64) if s else np.zeros(0, dtype=np.int64)
        key = pts @ weights if s else np.zeros(1, dtype=np.int64)
        best = key.copy()
        degree = np.full(len(pts), d, dtype=np.int64)
        cur = pts
        for i in range(1, d):
            cur = F.pow(cur, q)
            k = cur @ weights if s else np.zeros(1, dtype=np.int64)
            best = np.minimum(best, k)
            fixed = np.all(cur == pts, axis=1) & (degree == d)
            degree[fixed] = i
        sel = (degree == d) & (key == best)
        reps = [ClosedPoint(d, tuple(int(v) for v in row)) for row in pts[sel]]
        reps.sort(key=lambda c: c.rep)
        expected = expected_point_count(q, s, d, kind)
        if len(reps) != expected:
            raise CountMismatch(f"degree {d}: found {len(reps)} closed points, expected {expected}")
        out[d] = reps
    return out
