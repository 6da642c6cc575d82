"""Acceptance suite, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary; ``python tests/test_acceptance.py`` prints the same lines directly.
"""

import random
import sys
import time
from fractions import Fraction
from math import factorial

import pytest

from toricfam import (
    BoundProfile,
    FamilySpec,
    FieldTower,
    LaurentPoly,
    Sym,
    TensorPow,
    build_polytope,
    torus_base_bounds,
    dwork_np_lower_bound,
    euler_series,
    fiber_lpoly,
    hodge_basis,
    hodge_polygon,
    is_nondegenerate,
    moment_oracle,
    newton_data,
    newton_polygon,
    ord_p,
    poincare_series,
    q_related_check,
    reconstruct,
    relative_polytope,
    verify,
)
from toricfam.errors import NoSolution, Unverified
from toricfam.family import Ext, parse_linop

try:
    from conftest import record
except ImportError:  # pragma: no cover - run as a script from elsewhere
    def record(*a):
        pass


GUARD = 3

# Per (n, p): the largest n!vol(Delta) whose guarded sums stay small.
# Sums run over F_{p^(N+3)}^n, so the caps keep that below about 2^20 points.
DEGREE_CAPS = {(1, 2): 6, (1, 3): 6, (1, 5): 5, (2, 2): 6, (2, 3): 3, (2, 5): 1}


def _random_poly(rng, tower, n, cap):
    """A random Laurent polynomial with full-dimensional Delta and n!vol <= cap."""
    while True:
        k = rng.randint(1, 3 if n == 1 else 4)
        terms = {}
        for _ in range(k):
            mu = tuple(rng.randint(-3, 3) for _ in range(n))
            if any(mu):
                terms[mu] = rng.randint(1, tower.p - 1)
        if not terms:
            continue
        f = LaurentPoly(n, terms, tower)
        try:
            nd = newton_data(f)
        except Exception:
            continue
        N = int(nd.delta.volume * factorial(n))
        if 1 <= N <= cap:
            return f, N


def fiber_corpus(size=24, seed=20240611):
    rng = random.Random(seed)
    towers = {p: FieldTower(p) for p in (2, 3, 5)}
    keys = sorted(DEGREE_CAPS)
    out = []
    attempts = 0
    while len(out) < size:
        attempts += 1
        assert attempts < 5000, "corpus generation did not converge"
        n, p = keys[len(out) % len(keys)]
        f, N = _random_poly(rng, towers[p], n, DEGREE_CAPS[(n, p)])
        if is_nondegenerate(f, 6):
            out.append((f, N))
    return out


@pytest.fixture(scope="module")
def corpus():
    return fiber_corpus()


def cubic(base="torus", p=2):
    return FamilySpec(FieldTower(p), 1, 1, {(3,): 1}, [(((1,), (1,)), 1)], base=base)


def linear(base):
    return FamilySpec(FieldTower(2), 1, 1, {(1,): 1}, [(((1,), (0,)), 1)], base=base)


# ----------------------------------------------------------------------------


def test_criterion_1_fiber_degree_law(corpus):
    t0 = time.time()
    bad = []
    for f, N in corpus:
        try:
            P = fiber_lpoly(f, N, guard=GUARD)
            if P.degree != N:
                bad.append((f, N, P.degree))
        except Exception as exc:  # DegreeViolation and friends are failures here
            bad.append((f, N, repr(exc)))
    elapsed = time.time() - t0
    ok = not bad and len(corpus) >= 20 and elapsed < 60
    record(1, "fiber degree law", ok, f"{len(corpus)} polynomials, guard {GUARD}, {elapsed:.1f}s")
    assert not bad, bad
    assert len(corpus) >= 20
    assert elapsed < 60


def test_criterion_2_kloosterman():
    t0 = time.time()
    f = LaurentPoly(1, {(1,): 1, (-1,): 1}, FieldTower(3))
    P = fiber_lpoly(f, 2, guard=GUARD)
    B = hodge_basis(f)
    NP = newton_polygon(P, 3)
    HP = hodge_polygon(B)
    ok = (
        P.to_lists() == [[1, 0], [-1, 0], [3, 0]]
        and NP.slopes == [0, 1]
        and NP.lies_on_or_above(HP)
        and NP == HP
        and sorted(B.monomials) == [(0,), (1,)]
        and time.time() - t0 < 1
    )
    record(2, "Kloosterman 1 - T + 3T^2", ok, f"slopes {[str(x) for x in NP.slopes]}")
    assert ok


def _random_lattice_polytopes(count=12, seed=7):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        s = rng.choice([1, 2])
        pts = [tuple(rng.randint(-2, 3) for _ in range(s)) for _ in range(rng.randint(1, 4))]
        P = build_polytope(pts)
        if 1 <= P.span_dim <= 2:
            out.append(P)
    return out


def test_criterion_3_poincare_rationality():
    t0 = time.time()
    polys = _random_lattice_polytopes()
    bad = []
    for P in polys:
        num, st = poincare_series(P)
        D = P.weight_fn.D
        if any(c < 0 for c in num) or len(num) - 1 > st * D or sum(num) != factorial(st) * P.volume:
            bad.append((P.vertices, num, st, P.volume))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 10
    record(3, "Poincare rationality", ok, f"{len(polys)} polytopes, {elapsed:.1f}s")
    assert not bad, bad
    assert elapsed < 10


def test_criterion_4_hodge_basis_count(corpus):
    bad = [(f, N, len(hodge_basis(f))) for f, N in corpus if len(hodge_basis(f)) != N]
    record(4, "Hodge basis count", not bad, f"{len(corpus)} polynomials")
    assert not bad, bad


def test_criterion_5_oracle_equivalence():
    t0 = time.time()
    M = 6
    results = []
    for spec in (cubic("torus"), linear("affine")):
        for k in (1, 2):
            a = euler_series(spec, TensorPow(k), M, guard=GUARD)
            b = moment_oracle(spec, k, M)
            results.append((spec.base, k, a.first_difference(b)))
    elapsed = time.time() - t0
    ok = all(d is None for *_, d in results) and elapsed < 300
    record(5, "oracle equivalence", ok, f"M = {M}, {elapsed:.1f}s")
    assert ok, results


def test_criterion_6_vanishing_family():
    t0 = time.time()
    spec = linear("affine")
    op = Sym(1)
    ser = euler_series(spec, op, 6, guard=GUARD)
    trivial = ser.coeffs[0] == 1 and all(not c for c in ser.coeffs[1:])
    rat = reconstruct(ser, 1, 1)
    checks = verify(spec, op, ser, rat)
    ok = trivial and all(v.status in ("Pass", "Inapplicable") for v in checks.values()) and time.time() - t0 < 10
    record(6, "vanishing family x + t", ok, ", ".join(f"{k}={v.status}" for k, v in sorted(checks.items())))
    assert ok, checks


def _divisible(series, p, floor):
    for j, c in enumerate(series.coeffs):
        v = ord_p(c, p)
        if not v.is_infinite and v.value < floor * j:
            return j
    return None


def test_criterion_7_divisibility():
    t0 = time.time()
    floor = Fraction(2, 3)
    bad = []
    nontrivial = 0
    # Sym(1) at M = 6 as stated, plus TensorPow(2), whose series is not
    # identically 1 (Sym(1) on torus fibers is: the t-sum kills every x != 0).
    for p, op, M in ((2, Sym(1), 6), (5, Sym(1), 6), (2, TensorPow(2), 6), (5, TensorPow(2), 4)):
        spec = cubic("affine", p)
        ser = euler_series(spec, op, M, guard=GUARD)
        j = _divisible(ser, p, floor)
        if j is not None:
            bad.append((p, str(op), j))
        nontrivial += any(ser.coeffs[1:])
    elapsed = time.time() - t0
    ok = not bad and nontrivial >= 2 and elapsed < 600
    record(7, "divisibility ord_q(c_j) >= 2j/3", ok, f"{nontrivial} nontrivial series, {elapsed:.1f}s")
    assert ok, bad


def test_criterion_8_degree_window():
    spec = cubic("torus")
    gamma = relative_polytope(spec)
    N = spec.fiber_degree()
    M = 8
    tried, reconstructed, bad = [], [], []
    for op in (Sym(1), TensorPow(2), Ext(2), Sym(2)):
        try:
            ser = euler_series(spec, op, M, guard=GUARD)
        except Exception as exc:  # budget limits for this op at this M
            tried.append((str(op), type(exc).__name__))
            continue
        caps = torus_base_bounds(gamma, 1, 1, op, N)
        try:
            rat = reconstruct(ser, min(caps["total_degree"].floor, M), min(caps["total_degree"].floor, M))
        except (NoSolution, Unverified) as exc:
            tried.append((str(op), type(exc).__name__))
            continue
        reconstructed.append(str(op))
        hi = int(factorial(1) * gamma.volume * op.dim(N))  # floor of s! vol(Gamma) LN
        if not 0 <= rat.R - rat.S <= hi:
            bad.append((str(op), "window", rat.R - rat.S, hi))
        pair = q_related_check(rat.num, rat.den, spec.q, 8)
        if pair.verdict == "Fail":
            bad.append((str(op), "q-related"))
    ok = bool(reconstructed) and not bad
    record(8, "degree window", ok, f"reconstructed {reconstructed}; skipped {tried}")
    assert ok, (bad, tried)


def test_criterion_9_bound_calculator():
    gamma = build_polytope([(Fraction(3, 2),)])
    rep = torus_base_bounds(gamma, 1, 1, parse_linop("Sym(1)"), 3)
    caps_ok = rep["degree_upper"].exact == Fraction(9, 2) and rep["total_degree"].exact == 180
    dwork_ok = []
    examples = [LaurentPoly(1, {(1,): 1, (-1,): 1}, FieldTower(3))] + [f for f, _ in fiber_corpus()]
    for f in examples:
        B = hodge_basis(f)
        p = f.tower.p
        db = dwork_np_lower_bound(BoundProfile.from_basis_weights(p, B.weights), None, p)
        dwork_ok.append(db.polygon == hodge_polygon(B))
    ok = caps_ok and all(dwork_ok)
    record(9, "bound calculator regression", ok, f"caps 9/2 and 180; {sum(dwork_ok)}/{len(dwork_ok)} hodge polygons")
    assert ok


if __name__ == "__main__":
    import conftest

    corp = fiber_corpus()
    tests = [
        (test_criterion_1_fiber_degree_law, (corp,)),
        (test_criterion_2_kloosterman, ()),
        (test_criterion_3_poincare_rationality, ()),
        (test_criterion_4_hodge_basis_count, (corp,)),
        (test_criterion_5_oracle_equivalence, ()),
        (test_criterion_6_vanishing_family, ()),
        (test_criterion_7_divisibility, ()),
        (test_criterion_8_degree_window, ()),
        (test_criterion_9_bound_calculator, ()),
    ]
    for fn, args in tests:
        try:
            fn(*args)
        except AssertionError:
            pass
    for n in sorted(conftest.ACCEPTANCE):
        title, ok, detail = conftest.ACCEPTANCE[n]
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}  {detail}")
    sys.exit(0 if all(v[1] for v in conftest.ACCEPTANCE.values()) else 1)
