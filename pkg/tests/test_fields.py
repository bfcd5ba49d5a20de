"""Scalar arithmetic over F_p and Q."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lg36.errors import FieldMismatchError
from lg36.fields import QQ, field_from_header, field_header, is_prime, prime_field

F11 = prime_field(11)
F10007 = prime_field(10007)


def test_prime_validation():
    assert is_prime(10007)
    assert not is_prime(10006)
    with pytest.raises(ValueError):
        prime_field(10006)
    with pytest.raises(ValueError):
        prime_field(2)


def test_field_caching():
    assert prime_field(11) is F11
    assert QQ is field_from_header({"field": "Q"})
    assert field_from_header(field_header(F10007)) is F10007


@given(st.integers(-200, 200), st.integers(-200, 200))
def test_fp_ring_axioms(a, b):
    x, y = F11(a), F11(b)
    assert x + y == F11(a + b)
    assert x * y == F11(a * b)
    assert x - y == F11(a - b)
    assert -x == F11(-a)


@given(st.integers(1, 10))
def test_fp_inverse(a):
    x = F11(a)
    assert x * x.inverse() == F11.one
    assert (x / x) == F11.one


@settings(max_examples=50)
@given(st.fractions(min_value=-50, max_value=50, max_denominator=20),
       st.fractions(min_value=-50, max_value=50, max_denominator=20))
def test_rational_axioms(a, b):
    x, y = QQ(a), QQ(b)
    assert (x + y).val == a + b
    assert (x * y).val == a * b


def test_mixed_field_rejected():
    with pytest.raises(FieldMismatchError):
        F11(1) + F10007(1)
    with pytest.raises(FieldMismatchError):
        QQ(1) * F11(1)


def test_sqrt_fp():
    rng = random.Random(0)
    for p in (11, 10007, 1000003):
        F = prime_field(p)
        for _ in range(40):
            a = F.random_scalar(rng)
            sq = a * a
            r = sq.sqrt()
            assert r is not None and r * r == sq
    # a known non-residue has no root
    F = prime_field(11)
    residues = {(F(v) * F(v)).val for v in range(11)}
    non = next(v for v in range(11) if v not in residues)
    assert F(non).sqrt() is None


def test_sqrt_rational():
    assert QQ(Fraction(9, 4)).sqrt().val == Fraction(3, 2)
    assert QQ(2).sqrt() is None
    assert QQ(-1).sqrt() is None


def test_scalar_strings():
    assert str(F11(17)) == "6"
    assert str(QQ(Fraction(-3, 7))) == "-3/7"
    assert F10007.scalar_from_string("123") == F10007(123)
    assert QQ.scalar_from_string("3/7").val == Fraction(3, 7)


def test_elements_enumeration_guard():
    assert len(list(F11.elements())) == 11
    big = prime_field(2**61 - 1)
    with pytest.raises(ValueError):
        next(big.elements())
