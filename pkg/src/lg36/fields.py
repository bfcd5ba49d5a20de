"""Exact scalar arithmetic over prime fields F_p and the rationals Q.

A field is fixed once per session; scalars remember their field and refuse
mixed-field arithmetic.  No floating point anywhere.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Optional, Union

from .errors import FieldMismatchError

IntLike = Union[int, Fraction, "FieldScalar", str]

# Exhaustive root scans and field enumeration are only allowed below this.
MAX_ENUMERABLE_PRIME = 10**6

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all 64-bit integers."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class FieldScalar:
    """Immutable element of a fixed base field."""

    __slots__ = ("field", "val")

    def __init__(self, field: "Field", val):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "val", val)

    def __setattr__(self, *a):
        raise AttributeError("FieldScalar is immutable")

    def _check(self, other: "FieldScalar") -> None:
        if self.field is not other.field:
            raise FieldMismatchError(
                f"cannot mix {self.field} and {other.field} scalars"
            )

    def _coerce(self, other):
        if isinstance(other, FieldScalar):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field._add(self, o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field._sub(self, o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field._sub(o, self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field._mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field._mul(self, o.inverse())

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field._mul(o, self.inverse())

    def __neg__(self):
        return self.field._neg(self)

    def __pow__(self, k: int):
        return self.field._pow(self, k)

    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            return self.field is other.field and self.val == other.val
        if isinstance(other, (int, Fraction)):
            return self.val == self.field(other).val
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.val))

    def __bool__(self):
        return self.val != 0

    def is_zero(self) -> bool:
        return self.val == 0

    def inverse(self) -> "FieldScalar":
        return self.field._inv(self)

    def sqrt(self) -> Optional["FieldScalar"]:
        """A square root in the base field, or None if no root exists."""
        return self.field._sqrt(self)

    def __str__(self):
        return str(self.val)

    def __repr__(self):
        return f"{self.field.short_name}({self.val})"


class Field:
    """Base class for the two scalar backends."""

    short_name = "K"

    def __call__(self, value: IntLike) -> FieldScalar:
        raise NotImplementedError

    def __repr__(self):
        return self.short_name

    @property
    def zero(self) -> FieldScalar:
        return self._zero

    @property
    def one(self) -> FieldScalar:
        return self._one

    def scalar_from_string(self, text: str) -> FieldScalar:
        """Parse the decimal-string form used by the JSON serialization."""
        text = text.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return self(Fraction(int(num), int(den)))
        return self(int(text))


class PrimeField(Field):
    """F_p for an odd prime p < 2**63.  Instances are cached per p."""

    _cache: dict = {}

    def __new__(cls, p: int):
        inst = cls._cache.get(p)
        if inst is not None:
            return inst
        if p < 3 or p >= 2**63 or not is_prime(p):
            raise ValueError(f"p must be an odd prime below 2**63, got {p}")
        inst = super().__new__(cls)
        inst.p = p
        inst.short_name = f"F{p}"
        inst._zero = FieldScalar(inst, 0)
        inst._one = FieldScalar(inst, 1)
        cls._cache[p] = inst
        return inst

    @property
    def characteristic(self) -> int:
        return self.p

    def __call__(self, value: IntLike) -> FieldScalar:
        if isinstance(value, FieldScalar):
            if value.field is not self:
                raise FieldMismatchError(f"scalar of {value.field} given to {self}")
            return value
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return FieldScalar(
                self,
                value.numerator * pow(value.denominator, self.p - 2, self.p) % self.p,
            )
        if isinstance(value, str):
            return self.scalar_from_string(value)
        return FieldScalar(self, value % self.p)

    def _add(self, a, b):
        return FieldScalar(self, (a.val + b.val) % self.p)

    def _sub(self, a, b):
        return FieldScalar(self, (a.val - b.val) % self.p)

    def _mul(self, a, b):
        return FieldScalar(self, a.val * b.val % self.p)

    def _neg(self, a):
        return FieldScalar(self, -a.val % self.p)

    def _inv(self, a):
        if a.val == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldScalar(self, pow(a.val, self.p - 2, self.p))

    def _pow(self, a, k: int):
        if k < 0:
            return self._pow(self._inv(a), -k)
        return FieldScalar(self, pow(a.val, k, self.p))

    def is_square(self, a: FieldScalar) -> bool:
        if a.val == 0:
            return True
        return pow(a.val, (self.p - 1) // 2, self.p) == 1

    def _sqrt(self, a: FieldScalar) -> Optional[FieldScalar]:
        p, n = self.p, a.val
        if n == 0:
            return self._zero
        if pow(n, (p - 1) // 2, p) != 1:
            return None
        if p % 4 == 3:
            return FieldScalar(self, pow(n, (p + 1) // 4, p))
        # Tonelli-Shanks
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
        while t != 1:
            t2, i = t * t % p, 1
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
        return FieldScalar(self, r)

    def elements(self) -> Iterator[FieldScalar]:
        """All field elements; only allowed for enumerable primes."""
        if self.p > MAX_ENUMERABLE_PRIME:
            raise ValueError(f"refusing to enumerate F_{self.p}")
        for v in range(self.p):
            yield FieldScalar(self, v)

    def random_scalar(self, rng) -> FieldScalar:
        return FieldScalar(self, rng.randrange(self.p))

    def random_nonzero(self, rng) -> FieldScalar:
        return FieldScalar(self, rng.randrange(1, self.p))


class RationalField(Field):
    """Arbitrary-precision rationals."""

    _instance = None
    short_name = "Q"

    def __new__(cls):
        if cls._instance is None:
            inst = super().__new__(cls)
            inst._zero = FieldScalar(inst, Fraction(0))
            inst._one = FieldScalar(inst, Fraction(1))
            cls._instance = inst
        return cls._instance

    @property
    def characteristic(self) -> int:
        return 0

    def __call__(self, value: IntLike) -> FieldScalar:
        if isinstance(value, FieldScalar):
            if value.field is not self:
                raise FieldMismatchError(f"scalar of {value.field} given to {self}")
            return value
        if isinstance(value, str):
            return self.scalar_from_string(value)
        return FieldScalar(self, Fraction(value))

    def _add(self, a, b):
        return FieldScalar(self, a.val + b.val)

    def _sub(self, a, b):
        return FieldScalar(self, a.val - b.val)

    def _mul(self, a, b):
        return FieldScalar(self, a.val * b.val)

    def _neg(self, a):
        return FieldScalar(self, -a.val)

    def _inv(self, a):
        if a.val == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldScalar(self, 1 / a.val)

    def _pow(self, a, k: int):
        return FieldScalar(self, a.val**k)

    def is_square(self, a: FieldScalar) -> bool:
        return self._sqrt(a) is not None

    def _sqrt(self, a: FieldScalar) -> Optional[FieldScalar]:
        v = a.val
        if v < 0:
            return None
        rn = math.isqrt(v.numerator)
        rd = math.isqrt(v.denominator)
        if rn * rn == v.numerator and rd * rd == v.denominator:
            return FieldScalar(self, Fraction(rn, rd))
        return None

    def random_scalar(self, rng, height: int = 20) -> FieldScalar:
        return FieldScalar(
            self, Fraction(rng.randint(-height, height), rng.randint(1, height))
        )

    def random_nonzero(self, rng, height: int = 20) -> FieldScalar:
        while True:
            s = self.random_scalar(rng, height)
            if not s.is_zero():
                return s


def prime_field(p: int) -> PrimeField:
    return PrimeField(p)


QQ = RationalField()


def field_from_header(header: dict) -> Field:
    """Rebuild a field from the JSON header {"field": "Fp", "p": ...} / {"field": "Q"}."""
    kind = header.get("field")
    if kind == "Q":
        return QQ
    if kind == "Fp":
        return prime_field(int(header["p"]))
    raise FieldMismatchError(f"unknown field header {header!r}")


def field_header(field: Field) -> dict:
    if isinstance(field, PrimeField):
        return {"field": "Fp", "p": field.p}
    return {"field": "Q"}
