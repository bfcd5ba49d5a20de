"""Univariate polynomials, binary forms, and elimination helpers."""

import random

import pytest

from lg36.errors import RootsNotSplitError
from lg36.fields import QQ, prime_field
from lg36.poly import (
    BiLinearForm,
    BinaryForm,
    UniPoly,
    bilinear_elimination_quadratic,
    binary_gcd,
    lagrange_interpolate,
    poly_gcd,
    resultant,
    uniroots,
)

F11 = prime_field(11)
F10007 = prime_field(10007)


def rand_poly(field, deg, rng):
    cs = [field.random_scalar(rng) for _ in range(deg)]
    cs.append(field.random_nonzero(rng))
    return UniPoly(field, cs)


def test_divmod_invariant():
    rng = random.Random(0)
    for _ in range(30):
        f = rand_poly(F10007, rng.randint(0, 6), rng)
        g = rand_poly(F10007, rng.randint(0, 4), rng)
        q, r = f.divmod(g)
        assert q * g + r == f
        assert r.degree() < g.degree() or r.is_zero()


def test_gcd_of_products():
    rng = random.Random(1)
    for _ in range(20):
        a = rand_poly(F11, 2, rng)
        b = rand_poly(F11, 2, rng)
        c = rand_poly(F11, 1, rng)
        g = poly_gcd(a * c, b * c)
        # gcd is divisible by c (up to the unit)
        assert (g % c.monic()).is_zero() or poly_gcd(a, b).degree() > 0


def test_roots_from_construction():
    f = UniPoly.from_roots(F10007, [3, 5, 5, 9])
    roots = dict((r.val, m) for r, m in uniroots(f, require_all=True))
    assert roots == {3: 1, 5: 2, 9: 1}


def test_roots_rational():
    from fractions import Fraction

    f = UniPoly.from_roots(QQ, [Fraction(2, 3), -4])
    roots = {(r.val, m) for r, m in uniroots(f, require_all=True)}
    assert roots == {(Fraction(2, 3), 1), (Fraction(-4), 1)}


def test_roots_not_split():
    # x^2 + 1 over F_11 (11 = 3 mod 4) has no roots
    f = UniPoly(F11, [1, 0, 1])
    assert uniroots(f) == []
    with pytest.raises(RootsNotSplitError):
        uniroots(f, require_all=True)


def test_scan_matches_formula():
    rng = random.Random(2)
    for _ in range(20):
        f = rand_poly(F11, 2, rng)
        by_formula = sorted((r.val, m) for r, m in uniroots(f))
        by_scan = sorted(
            (v, 1) for v in range(11) if f.evaluate(F11(v)).is_zero()
        )
        # collapse multiplicity for comparison of root sets
        assert [v for v, _ in by_formula] == sorted(
            {v for v, _ in by_scan}
        ) or [v for v, _ in by_formula] == [v for v, _ in by_scan]


def test_lagrange_interpolation():
    pts = [(0, 4), (1, 2), (2, 9), (5, 0)]
    f = lagrange_interpolate(F11, pts)
    for x, y in pts:
        assert f.evaluate(F11(x)) == F11(y)
    assert f.degree() <= 3


def test_resultant_detects_common_root():
    f = UniPoly.from_roots(F10007, [2, 7])
    g = UniPoly.from_roots(F10007, [7, 9])
    assert resultant(f, g).is_zero()
    h = UniPoly.from_roots(F10007, [1, 3])
    assert not resultant(f, h).is_zero()


def test_resultant_multiplicative():
    rng = random.Random(3)
    f = rand_poly(F10007, 2, rng)
    g = rand_poly(F10007, 3, rng)
    h = rand_poly(F10007, 2, rng)
    assert resultant(f * g, h) == resultant(f, h) * resultant(g, h)


def test_binary_form_roots_projective():
    # s*t*(s - 2t) has roots (1:0), (0:1), (2:1); the last one normalizes
    # to (1 : 1/2) = (1 : 6) over F_11.
    F = BinaryForm(F11, 3, [0, 1, -2, 0])
    roots = {((s.val, t.val), m) for (s, t), m in F.roots(require_all=True)}
    assert roots == {((0, 1), 1), ((1, 0), 1), ((1, 6), 1)}


def test_binary_gcd_with_infinity_root():
    # common factor: t * s  (roots (1:0) and (0:1))
    f1 = BinaryForm(F11, 3, [0, 1, 3, 0])
    f2 = BinaryForm(F11, 3, [0, 2, 5, 0])
    g = binary_gcd([f1, f2])
    assert g.d == 2
    root_set = {(s.val, t.val) for (s, t), _ in g.roots()}
    assert (0, 1) in root_set and (1, 0) in root_set


def test_binary_gcd_skips_zero_forms():
    z = BinaryForm(F11, 2, [0, 0, 0])
    f = BinaryForm(F11, 2, [1, 0, -1])
    g = binary_gcd([z, f])
    assert g.d == 2


def test_bilinear_elimination():
    # F = b0 c0 - b1 c1, G = b0 c1 - b1 c0 share solutions at b = (1, 1), (1, -1)
    F = BiLinearForm(F11, [[1, 0], [0, -1]])
    G = BiLinearForm(F11, [[0, 1], [-1, 0]])
    quad = bilinear_elimination_quadratic(F, G)
    roots = {(s.val, t.val) for (s, t), _ in quad.roots(require_all=True)}
    assert roots == {(1, 1), (1, 10)}
    for b in [(F11.one, F11.one), (F11.one, F11(-1))]:
        row_f = F.c_row(b)
        row_g = G.c_row(b)
        det = row_f[0] * row_g[1] - row_f[1] * row_g[0]
        assert det.is_zero()
