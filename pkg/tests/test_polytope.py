import random
from fractions import Fraction
from itertools import product
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricfam.errors import DimensionMismatch, SeriesMismatch
from toricfam.polytope import (
    NOT_IN_CONE,
    build_polytope,
    lattice_points_up_to_weight,
    natural_period,
    normalized_volume,
    poincare_series,
    triangulation,
    weight,
    weight_counts,
)


def test_hull_examples():
    P = build_polytope([(3,)])
    assert sorted(P.vertices) == [(0,), (3,)] and P.span_dim == 1
    P = build_polytope([(-1,), (1,)])
    assert sorted(P.vertices) == [(-1,), (1,)] and P.span_dim == 1
    P = build_polytope([(1, 0), (0, 1)])
    assert P.span_dim == 2 and len(P.vertices) == 3
    # the weight facet is x + y = 1
    assert len(P.weight_facets) == 1
    w = P.weight_fn
    assert all(weight(w, u) == sum(u) for u in product(range(4), repeat=2))


def test_mixed_dimensions_rejected():
    with pytest.raises(DimensionMismatch):
        build_polytope([(1,), (1, 2)])


def test_weight_examples():
    w = build_polytope([(3,)]).weight_fn
    assert weight(w, (2,)) == Fraction(2, 3)
    assert weight(w, (0,)) == 0
    assert weight(w, (-1,)) is NOT_IN_CONE
    assert weight(build_polytope([(-1,), (1,)]).weight_fn, (-2,)) == 2


def interval_weight(lo, hi, u):
    """Oracle for a 1-dim polytope [lo, hi] containing 0."""
    if u == 0:
        return Fraction(0)
    if u > 0:
        return Fraction(u) / hi if hi > 0 else None
    return Fraction(u) / lo if lo < 0 else None


@pytest.mark.parametrize("lo,hi", [(0, 3), (-1, 1), (-2, 5), (0, Fraction(3, 2)), (Fraction(-1, 2), 2)])
def test_weight_matches_interval_oracle(lo, hi):
    w = build_polytope([(lo,), (hi,)]).weight_fn
    for u in range(-6, 7):
        want = interval_weight(lo, hi, u)
        got = weight(w, (u,))
        assert (got is NOT_IN_CONE and want is None) or got == want


def random_polytope(rng, dim):
    while True:
        pts = [tuple(rng.randint(-2, 3) for _ in range(dim)) for _ in range(rng.randint(dim, dim + 3))]
        P = build_polytope(pts)
        if P.span_dim == dim:
            return P


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1, 2, 3]))
def test_weight_axioms(seed, dim):
    rng = random.Random(seed)
    P = random_polytope(rng, dim)
    w = P.weight_fn
    assert weight(w, (0,) * dim) == 0
    pts = [u for u in product(range(-3, 4), repeat=dim) if weight(w, u) is not NOT_IN_CONE]
    for u in rng.sample(pts, min(len(pts), 12)):
        for c in (2, 3):
            assert weight(w, tuple(c * x for x in u)) == c * weight(w, u)
        v = rng.choice(pts)
        uv = tuple(a + b for a, b in zip(u, v))
        assert weight(w, uv) <= weight(w, u) + weight(w, v)
        # vertices have weight <= 1, and so does every point of the polytope
    for vert in P.vertices:
        assert weight(w, vert) <= 1


def test_volume_examples():
    assert build_polytope([(-1,), (1,)]).volume == 2
    assert build_polytope([(Fraction(3, 2),)]).volume == Fraction(3, 2)
    assert build_polytope([(1, 0), (0, 1)]).volume == Fraction(1, 2)
    P = build_polytope([(1, 0), (0, 1), (-1, -1)])
    assert factorial(2) * P.volume == 3


def shoelace(vertices):
    """Oracle: area of a convex polygon, vertices sorted by angle around the centroid."""
    import math

    cx = sum(v[0] for v in vertices) / len(vertices)
    cy = sum(v[1] for v in vertices) / len(vertices)
    vs = sorted(vertices, key=lambda v: math.atan2(v[1] - cy, v[0] - cx))
    a = sum(vs[i][0] * vs[(i + 1) % len(vs)][1] - vs[(i + 1) % len(vs)][0] * vs[i][1] for i in range(len(vs)))
    return abs(Fraction(a)) / 2


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_planar_volume_matches_shoelace(seed):
    P = random_polytope(random.Random(seed), 2)
    assert P.volume == shoelace([tuple(Fraction(x) for x in v) for v in P.vertices])
    assert normalized_volume(P) == P.volume
    assert len(triangulation(P)) >= 1


def test_poincare_examples():
    assert poincare_series(build_polytope([(3,)])) == ([1, 1, 1], 1)
    assert poincare_series(build_polytope([(-1,), (1,)])) == ([1, 1], 1)
    assert poincare_series(build_polytope([(0,)]))[0] == [1]


def test_rational_polytope_needs_natural_period():
    # w(u) = 2u/3 on [0, 3/2], so D = 3 but D*w only takes even values
    P = build_polytope([(Fraction(3, 2),)])
    assert P.weight_fn.D == 3
    assert natural_period(P) == 2
    assert poincare_series(P, period=2) == ([1], 1)
    with pytest.raises(SeriesMismatch):
        poincare_series(P)


def brute_counts(P, upto):
    """Oracle: scan a box and bucket D*w(u)."""
    w = P.weight_fn
    D = w.D
    box = range(-3 * upto - 3, 3 * upto + 4)
    out = [0] * (upto + 1)
    for u in product(box, repeat=len(P.vertices[0])):
        x = weight(w, u)
        if x is NOT_IN_CONE:
            continue
        k = x * D
        if k <= upto:
            out[int(k)] += 1
    return out


@pytest.mark.parametrize("pts", [[(3,)], [(-1,), (1,)], [(1, 0), (0, 1)], [(1, 0), (0, 1), (-1, -1)], [(2, 1), (-1, 1)]])
def test_weight_counts_match_box_scan(pts):
    P = build_polytope(pts)
    assert weight_counts(P, 4) == brute_counts(P, 4)


def test_lattice_points_up_to_weight():
    pts = lambda P, m: sorted(u for u, _ in lattice_points_up_to_weight(P, None, m))  # noqa: E731
    assert pts(build_polytope([(3,)]), 1) == [(0,), (1,), (2,), (3,)]
    assert pts(build_polytope([(3,)]), 0) == [(0,)]
    assert pts(build_polytope([(1, 0), (0, 1)]), 1) == [(0, 0), (0, 1), (1, 0)]
