"""Exact arithmetic in Z[zeta_p] and Q(zeta_p), with p-adic valuations.

Elements of the cyclotomic ring are stored on the power basis
``1, zeta, ..., zeta^(p-2)``; the relation ``zeta^(p-1) = -(1 + ... + zeta^(p-2))``
keeps the representation canonical so that ``==`` is exact equality.

Valuations are computed from field norms: Q_p(zeta_p)/Q_p is totally ramified
of degree p-1, so ``ord_p(x) = ord_p(N(x)) / (p-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import gcd

Rat = Fraction


def _reduce_cyclic(v: list[int], p: int) -> tuple[int, ...]:
    # v has length p and is read modulo x^p - 1; drop the zeta^(p-1) slot.
    top = v[p - 1]
    if top:
        return tuple(c - top for c in v[: p - 1])
    return tuple(v[: p - 1])


class CycInt:
    """An element of Z[zeta_p]."""

    __slots__ = ("p", "c")

    def __init__(self, p: int, coeffs=()):
        coeffs = list(coeffs)
        if len(coeffs) > p - 1:
            v = [0] * p
            for i, ci in enumerate(coeffs):
                v[i % p] += ci
            self.c = _reduce_cyclic(v, p)
        else:
            self.c = tuple(coeffs) + (0,) * (p - 1 - len(coeffs))
        self.p = p

    @classmethod
    def from_int(cls, p: int, m: int) -> CycInt:
        return cls(p, (m,))

    @classmethod
    def zeta(cls, p: int, k: int = 1) -> CycInt:
        """zeta_p^k."""
        v = [0] * p
        v[k % p] = 1
        return cls(p, v)

    @classmethod
    def from_counts(cls, p: int, counts) -> CycInt:
        """sum_k counts[k] * zeta^k for k in 0..p-1."""
        v = [int(x) for x in counts]
        v += [0] * (p - len(v))
        return cls(p, v)

    def _coerce(self, other):
        if isinstance(other, CycInt):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other
        if isinstance(other, int):
            return CycInt(self.p, (other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _raw(self.p, tuple(a + b for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        return _raw(self.p, tuple(-a for a in self.c))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _raw(self.p, tuple(a - b for a, b in zip(self.c, other.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return _raw(self.p, tuple(a * other for a in self.c))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        v = [0] * p
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    if b:
                        v[(i + j) % p] += a * b
        return _raw(p, _reduce_cyclic(v, p))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power in Z[zeta_p]")
        result = CycInt.from_int(self.p, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = CycInt(self.p, (other,))
        if not isinstance(other, CycInt):
            return NotImplemented
        return self.p == other.p and self.c == other.c

    def __hash__(self):
        return hash((self.p, self.c))

    def __bool__(self):
        return any(self.c)

    def __repr__(self):
        return f"CycInt({self.p}, {list(self.c)})"

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def content(self) -> int:
        g = 0
        for a in self.c:
            g = gcd(g, a)
        return g

    def exact_div_int(self, m: int) -> CycInt:
        if any(a % m for a in self.c):
            raise ArithmeticError(f"{self!r} is not divisible by {m}")
        return _raw(self.p, tuple(a // m for a in self.c))

    def conjugate(self, k: int) -> CycInt:
        """Image under the Galois automorphism zeta -> zeta^k."""
        p = self.p
        if k % p == 0:
            raise ValueError("k must be prime to p")
        v = [0] * p
        for i, a in enumerate(self.c):
            v[(i * k) % p] += a
        return _raw(p, _reduce_cyclic(v, p))

    def to_list(self) -> list[int]:
        return list(self.c)


def _raw(p, c):
    x = CycInt.__new__(CycInt)
    x.p = p
    x.c = c
    return x


def cyc_norm(x: CycInt) -> int:
    """Field norm N_{Q(zeta_p)/Q}(x), as the product of all Galois conjugates."""
    prod = x
    for k in range(2, x.p):
        prod = prod * x.conjugate(k)
    if not prod.is_rational():
        raise ArithmeticError("norm did not land in Z")  # unreachable for valid input
    return prod.c[0]


def _cofactor(x: CycInt) -> CycInt:
    prod = CycInt.from_int(x.p, 1)
    for k in range(2, x.p):
        prod = prod * x.conjugate(k)
    return prod


class CycRat:
    """An element num/den of Q(zeta_p), with den > 0 coprime to the content of num."""

    __slots__ = ("num", "den")

    def __init__(self, num: CycInt, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        g = gcd(num.content(), den)
        if g > 1:
            num = num.exact_div_int(g)
            den //= g
        if not num:
            den = 1
        self.num = num
        self.den = den

    @property
    def p(self):
        return self.num.p

    @classmethod
    def from_int(cls, p: int, m, den: int = 1) -> CycRat:
        if isinstance(m, Fraction):
            return cls(CycInt.from_int(p, m.numerator), m.denominator * den)
        return cls(CycInt.from_int(p, m), den)

    def _coerce(self, other):
        if isinstance(other, CycRat):
            return other
        if isinstance(other, CycInt):
            return CycRat(other)
        if isinstance(other, int):
            return CycRat(CycInt.from_int(self.p, other))
        if isinstance(other, Fraction):
            return CycRat.from_int(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycRat(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return CycRat(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycRat(self.num * other.den - other.num * self.den, self.den * other.den)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycRat(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> CycRat:
        if not self.num:
            raise ZeroDivisionError("inverse of zero in Q(zeta_p)")
        cof = _cofactor(self.num)
        n = cyc_norm(self.num)
        return CycRat(cof * self.den, n)

    def __truediv__(self, other):
        if isinstance(other, int):
            return CycRat(self.num, self.den * other) if other > 0 else CycRat(-self.num, -self.den * other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        if self.den == 1:
            return f"CycRat({self.num.to_list()})"
        return f"CycRat({self.num.to_list()}/{self.den})"

    def is_integral(self) -> bool:
        return self.den == 1


def _vp_int(m: int, p: int) -> int:
    m = abs(m)
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return v


@total_ordering
@dataclass(frozen=True)
class PadicVal:
    """ord_p of an element; ``value is None`` encodes +infinity.

    ``a`` rescales to ord_q with q = p^a.
    """

    value: Fraction | None
    a: int = 1

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @property
    def ord_q(self) -> Fraction | None:
        return None if self.value is None else self.value / self.a

    def __lt__(self, other):
        if not isinstance(other, PadicVal):
            return NotImplemented
        if self.value is None:
            return False
        if other.value is None:
            return True
        return self.value < other.value

    def __add__(self, other):
        if self.value is None or other.value is None:
            return PadicVal(None, self.a)
        return PadicVal(self.value + other.value, self.a)


def ord_p(x, p: int | None = None, a: int = 1) -> PadicVal:
    """p-adic order of an element of Z[zeta_p] or Q(zeta_p) (or of a rational)."""
    if isinstance(x, (int, Fraction)):
        if p is None:
            raise ValueError("p required for rational input")
        x = Fraction(x)
        if x == 0:
            return PadicVal(None, a)
        return PadicVal(Fraction(_vp_int(x.numerator, p) - _vp_int(x.denominator, p)), a)
    if isinstance(x, CycInt):
        x = CycRat(x)
    if p is not None and p != x.p:
        raise ValueError("mismatched prime")
    p = x.p
    if not x.num:
        return PadicVal(None, a)
    v = Fraction(_vp_int(cyc_norm(x.num), p), p - 1) - _vp_int(x.den, p)
    return PadicVal(v, a)


# ------------------------------------------------- polynomials over Q(zeta_p)
# Coefficient lists are low-to-high lists of CycRat.


def _as_rat(p: int, x) -> CycRat:
    if isinstance(x, CycRat):
        return x
    if isinstance(x, CycInt):
        return CycRat(x)
    return CycRat.from_int(p, x)


def poly_trim(a: list) -> list:
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def poly_mul(a: list, b: list, p: int, trunc: int | None = None) -> list:
    if not a or not b:
        return []
    size = len(a) + len(b) - 1
    if trunc is not None:
        size = min(size, trunc)
    zero = CycRat.from_int(p, 0)
    out = [zero] * size
    for i, x in enumerate(a):
        if not x or i >= size:
            continue
        for j, y in enumerate(b[: size - i]):
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def poly_divmod(a: list, b: list, p: int) -> tuple[list, list]:
    a = [_as_rat(p, x) for x in poly_trim(a)]
    b = [_as_rat(p, x) for x in poly_trim(b)]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = b[-1].inverse()
    quot = [CycRat.from_int(p, 0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        coef = a[-1] * inv_lead
        shift = len(a) - len(b)
        quot[shift] = coef
        for i, y in enumerate(b):
            a[shift + i] = a[shift + i] - coef * y
        a = poly_trim(a)
    return quot, a


def poly_gcd(a: list, b: list, p: int) -> list:
    """Monic-at-T^0 gcd (constant term 1 when it is nonzero, else monic)."""
    a = [_as_rat(p, x) for x in poly_trim(a)]
    b = [_as_rat(p, x) for x in poly_trim(b)]
    while b:
        a, b = b, poly_divmod(a, b, p)[1]
    if not a:
        return a
    norm = a[0] if a[0] else a[-1]
    inv = norm.inverse()
    return [x * inv for x in a]


def solve_linear(A: list, rhs: list, p: int) -> list | None:
    """One solution of A x = rhs over Q(zeta_p) (free variables set to 0), or None."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    M = [[_as_rat(p, x) for x in row] + [_as_rat(p, r)] for row, r in zip(A, rhs)]
    pivots = []
    r = 0
    for c in range(cols):
        k = next((i for i in range(r, rows) if M[i][c]), None)
        if k is None:
            continue
        M[r], M[k] = M[k], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                fac = M[i][c]
                M[i] = [x - fac * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if M[i][cols]:
            return None
    x = [CycRat.from_int(p, 0)] * cols
    for i, c in enumerate(pivots):
        x[c] = M[i][cols]
    return x
