"""Exact univariate polynomials, binary forms, and small elimination tools."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import RootsNotSplitError
from .fields import MAX_ENUMERABLE_PRIME, Field, FieldScalar, PrimeField, QQ
from .linalg import Matrix


class UniPoly:
    """Dense univariate polynomial with ascending coefficients."""

    def __init__(self, field: Field, coeffs: Sequence):
        self.field = field
        cs = [field(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: Tuple[FieldScalar, ...] = tuple(cs)

    @classmethod
    def zero(cls, field: Field) -> "UniPoly":
        return cls(field, [])

    @classmethod
    def constant(cls, field: Field, c) -> "UniPoly":
        return cls(field, [c])

    @classmethod
    def x(cls, field: Field) -> "UniPoly":
        return cls(field, [0, 1])

    @classmethod
    def from_roots(cls, field: Field, roots: Sequence) -> "UniPoly":
        poly = cls(field, [1])
        for r in roots:
            poly = poly * cls(field, [-field(r), field.one])
        return poly

    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> FieldScalar:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other):
        return (
            isinstance(other, UniPoly)
            and self.field is other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def __add__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return UniPoly(self.field, out)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __neg__(self) -> "UniPoly":
        return UniPoly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, FieldScalar):
            return UniPoly(self.field, [c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return UniPoly.zero(self.field)
        zero = self.field.zero
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(self.field, out)

    __rmul__ = __mul__

    def scale(self, c) -> "UniPoly":
        c = self.field(c)
        return UniPoly(self.field, [c * a for a in self.coeffs])

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        inv = self.leading().inverse()
        return self.scale(inv)

    def divmod(self, other: "UniPoly") -> Tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        field = self.field
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return UniPoly.zero(field), self
        quot = [field.zero] * (dq + 1)
        inv = other.leading().inverse()
        ob = other.coeffs
        for k in range(dq, -1, -1):
            top = rem[k + len(ob) - 1]
            if top.is_zero():
                continue
            f = top * inv
            quot[k] = f
            for i, c in enumerate(ob):
                rem[k + i] = rem[k + i] - f * c
        return UniPoly(field, quot), UniPoly(field, rem)

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[1]

    def __floordiv__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[0]

    def evaluate(self, x) -> FieldScalar:
        x = self.field(x)
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "UniPoly":
        return UniPoly(
            self.field, [self.field(i) * c for i, c in enumerate(self.coeffs)][1:]
        )

    def compose_linear(self, a, b) -> "UniPoly":
        """p(a*x + b)."""
        field = self.field
        lin = UniPoly(field, [b, a])
        acc = UniPoly.zero(field)
        for c in reversed(self.coeffs):
            acc = acc * lin + UniPoly.constant(field, c)
        return acc

    def __repr__(self):
        if self.is_zero():
            return "UniPoly(0)"
        terms = [f"{c}*x^{i}" for i, c in enumerate(self.coeffs) if not c.is_zero()]
        return "UniPoly(" + " + ".join(terms) + ")"


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic greatest common divisor."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def lagrange_interpolate(field: Field, points: Sequence[Tuple]) -> UniPoly:
    """Unique polynomial of degree < len(points) through the given (x, y)."""
    xs = [field(x) for x, _ in points]
    ys = [field(y) for _, y in points]
    total = UniPoly.zero(field)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        num = UniPoly(field, [1])
        den = field.one
        for j, xj in enumerate(xs):
            if i == j:
                continue
            num = num * UniPoly(field, [-xj, field.one])
            den = den * (xi - xj)
        total = total + num.scale(yi * den.inverse())
    return total


def _rational_roots(poly: UniPoly) -> List[Tuple[FieldScalar, int]]:
    """Roots over Q by the rational root theorem, with multiplicity."""
    field = poly.field
    # Clear denominators to a primitive integer polynomial.
    denom = 1
    for c in poly.coeffs:
        denom = denom * c.val.denominator // _gcd_int(denom, c.val.denominator)
    ints = [int(c.val * denom) for c in poly.coeffs]
    while ints and ints[0] == 0:
        ints = ints[1:]  # factor x; root 0 handled below
    roots: List[Tuple[FieldScalar, int]] = []
    zero = field.zero
    m = _multiplicity(poly, zero)
    if m:
        roots.append((zero, m))
    if not ints:
        return roots
    a0, an = abs(ints[0]), abs(ints[-1])
    seen = set()
    for p in _divisors(a0):
        for q in _divisors(an):
            for sign in (1, -1):
                cand = Fraction(sign * p, q)
                if cand in seen:
                    continue
                seen.add(cand)
                r = field(cand)
                mult = _multiplicity(poly, r)
                if mult:
                    roots.append((r, mult))
    return roots


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _divisors(n: int) -> List[int]:
    if n == 0:
        return [1]
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def _multiplicity(poly: UniPoly, r: FieldScalar) -> int:
    lin = UniPoly(poly.field, [-r, poly.field.one])
    m = 0
    while not poly.is_zero():
        q, rem = poly.divmod(lin)
        if not rem.is_zero():
            break
        poly = q
        m += 1
    return m


def _quadratic_roots_exact(poly: UniPoly) -> Optional[List[Tuple[FieldScalar, int]]]:
    """Closed-form roots for degree <= 2, or None when inapplicable."""
    field = poly.field
    d = poly.degree()
    if d == 0:
        return []
    if d == 1:
        c0, c1 = poly.coeffs
        return [((-c0) / c1, 1)]
    if d == 2:
        c0, c1, c2 = poly.coeffs
        disc = c1 * c1 - field(4) * c2 * c0
        r = disc.sqrt()
        if r is None:
            return []
        two_a = field(2) * c2
        if disc.is_zero():
            return [((-c1) / two_a, 2)]
        return [((-c1 + r) / two_a, 1), ((-c1 - r) / two_a, 1)]
    return None


def _scan_roots_fp(poly: UniPoly) -> List[Tuple[FieldScalar, int]]:
    """Exhaustive scan over F_p on raw integers (p enumerable)."""
    field = poly.field
    p = field.p
    if p > MAX_ENUMERABLE_PRIME:
        raise ValueError(f"root scan over F_{p} refused")
    # vectorized Horner sweep; products stay below p^2 <= 10^12
    vals = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(poly.coeffs):
        acc = (acc * vals + c.val) % p
    roots = []
    for v in np.nonzero(acc == 0)[0]:
        x = field(int(v))
        roots.append((x, _multiplicity(poly, x)))
    return roots


def uniroots(poly: UniPoly, require_all: bool = False) -> List[Tuple[FieldScalar, int]]:
    """All base-field roots with multiplicity.

    Degrees one and two use the exact closed form; higher degrees use an
    exhaustive scan over F_p (the prime must be enumerable) or the rational
    root theorem over Q.  With require_all=True, raises ROOTS_NOT_SPLIT if
    a nonconstant factor remains after stripping the found roots.
    """
    if poly.is_zero():
        raise ValueError("root set of the zero polynomial")
    field = poly.field
    roots = _quadratic_roots_exact(poly)
    if roots is None:
        if isinstance(field, PrimeField):
            roots = _scan_roots_fp(poly)
        else:
            roots = _rational_roots(poly)
    if require_all:
        if sum(m for _, m in roots) < poly.degree():
            missing = poly.degree() - sum(m for _, m in roots)
            raise RootsNotSplitError(
                f"a degree-{missing} factor has no roots in {field}"
            )
    return roots


def _int_polymulmod(a: List[int], b: List[int], f: List[int], p: int) -> List[int]:
    """(a * b) mod f on raw ascending coefficient lists, f monic."""
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    df = len(f) - 1
    while len(out) > df:
        c = out.pop()
        if c:
            off = len(out) - df
            for t in range(df):
                out[off + t] = (out[off + t] - c * f[t]) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def _int_distinct_roots(coeffs: List[int], p: int) -> int:
    """deg gcd(x^p - x, f) on raw integer coefficients."""
    inv = pow(coeffs[-1], p - 2, p)
    f = [(c * inv) % p for c in coeffs]
    acc = [1]
    base = _int_polymulmod([0, 1], [1], f, p)
    e = p
    while e:
        if e & 1:
            acc = _int_polymulmod(acc, base, f, p)
        base = _int_polymulmod(base, base, f, p)
        e >>= 1
    # gcd(acc - x, f)
    a = list(acc) + [0] * max(0, 2 - len(acc))
    a[1] = (a[1] - 1) % p
    while a and a[-1] == 0:
        a.pop()
    b = f
    while a:
        # b mod a
        inv = pow(a[-1], p - 2, p)
        da = len(a) - 1
        r = list(b)
        while len(r) - 1 >= da and r:
            c = (r[-1] * inv) % p
            off = len(r) - 1 - da
            for t in range(da + 1):
                r[off + t] = (r[off + t] - c * a[t]) % p
            while r and r[-1] == 0:
                r.pop()
        b, a = a, r
    return len(b) - 1


def distinct_root_count(poly: UniPoly) -> int:
    """Number of distinct base-field roots, without extracting them.

    Over F_p this is deg gcd(x^p - x, f) with x^p computed by a square and
    multiply ladder mod f, so the cost is logarithmic in p instead of the
    linear scan uniroots performs.  Over Q it falls back to uniroots.
    """
    field = poly.field
    if poly.is_zero():
        raise ValueError("root set of the zero polynomial")
    if poly.degree() <= 0:
        return 0
    if not isinstance(field, PrimeField):
        return len(uniroots(poly))
    return _int_distinct_roots([c.val for c in poly.coeffs], field.p)


def resultant(f: UniPoly, g: UniPoly) -> FieldScalar:
    """Resultant via the Sylvester matrix determinant."""
    field = f.field
    m, n = f.degree(), g.degree()
    if m < 0 or n < 0:
        return field.zero
    if m == 0:
        return f.coeffs[0] ** n
    if n == 0:
        return g.coeffs[0] ** m
    size = m + n
    zero = field.zero
    rows = []
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    for i in range(n):
        rows.append([zero] * i + fc + [zero] * (size - i - m - 1))
    for i in range(m):
        rows.append([zero] * i + gc + [zero] * (size - i - n - 1))
    return Matrix(field, rows).det()


class BinaryForm:
    """Homogeneous form in (s, t); coefficient k sits on s^(d-k) t^k."""

    def __init__(self, field: Field, degree: int, coeffs: Sequence):
        if len(coeffs) != degree + 1:
            raise ValueError("binary form needs degree+1 coefficients")
        self.field = field
        self.d = degree
        self.coeffs: Tuple[FieldScalar, ...] = tuple(field(c) for c in coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def evaluate(self, s, t) -> FieldScalar:
        s, t = self.field(s), self.field(t)
        acc = self.field.zero
        sp = [self.field.one]
        tp = [self.field.one]
        for _ in range(self.d):
            sp.append(sp[-1] * s)
            tp.append(tp[-1] * t)
        for k, c in enumerate(self.coeffs):
            acc = acc + c * sp[self.d - k] * tp[k]
        return acc

    def dehomogenize(self) -> Tuple[UniPoly, int]:
        """(form(1, t) as a polynomial in t, multiplicity of the (0:1) root).

        The (0:1) root at infinity of the t-chart accounts for the degree
        drop: its multiplicity is d - deg(form(1, t)).
        """
        poly = UniPoly(self.field, list(self.coeffs))
        return poly, self.d - poly.degree()

    def roots(self, require_all: bool = False) -> List[Tuple[Tuple[FieldScalar, FieldScalar], int]]:
        """Projective roots ((s, t), multiplicity); (1, 0) is the t=0 root
        and (0, 1) the point at infinity of the t-chart."""
        if self.is_zero():
            raise ValueError("root set of the zero form")
        field = self.field
        out = []
        # form(1, t) has degree d - (multiplicity of the (0:1) root)
        poly = UniPoly(field, list(self.coeffs))
        inf_mult = self.d - poly.degree()
        if inf_mult:
            out.append(((field.zero, field.one), inf_mult))
        for r, m in uniroots(poly, require_all=require_all):
            out.append(((field.one, r), m))
        return out

    def __repr__(self):
        return f"BinaryForm(d={self.d}, {[str(c) for c in self.coeffs]})"


def binary_gcd(forms: Sequence[BinaryForm]) -> BinaryForm:
    """Gcd of binary forms; the degree is the length of the common zero
    scheme on P^1.  Forms that vanish identically are skipped; at least one
    form must be nonzero."""
    live = [f for f in forms if not f.is_zero()]
    if not live:
        raise ValueError("gcd of identically-zero forms")
    field = live[0].field
    # Common power of the infinity factor s (root (0:1)): a form has
    # (0:1)-multiplicity d - deg(form(1,t)).
    inf_mult = None
    g: Optional[UniPoly] = None
    for f in live:
        poly = UniPoly(field, list(f.coeffs))
        m = f.d - poly.degree()
        inf_mult = m if inf_mult is None else min(inf_mult, m)
        g = poly if g is None else poly_gcd(g, poly)
    assert g is not None and inf_mult is not None
    degree = g.degree() + inf_mult
    coeffs = list(g.coeffs) + [field.zero] * inf_mult
    return BinaryForm(field, degree, coeffs)


class BiLinearForm:
    """Bidegree (1,1) form on P^1 x P^1 with a 2x2 coefficient grid.

    value(b, c) = sum grid[i][j] * b_i * c_j.
    """

    def __init__(self, field: Field, grid: Sequence[Sequence]):
        self.field = field
        self.grid = tuple(tuple(field(x) for x in row) for row in grid)
        if len(self.grid) != 2 or any(len(r) != 2 for r in self.grid):
            raise ValueError("bilinear form needs a 2x2 grid")

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.grid for x in r)

    def evaluate(self, b: Sequence, c: Sequence) -> FieldScalar:
        b0, b1 = self.field(b[0]), self.field(b[1])
        c0, c1 = self.field(c[0]), self.field(c[1])
        g = self.grid
        return (g[0][0] * b0 * c0 + g[0][1] * b0 * c1
                + g[1][0] * b1 * c0 + g[1][1] * b1 * c1)

    def c_row(self, b: Sequence) -> Tuple[FieldScalar, FieldScalar]:
        """Coefficients of (c0, c1) after fixing b."""
        b0, b1 = self.field(b[0]), self.field(b[1])
        g = self.grid
        return (g[0][0] * b0 + g[1][0] * b1, g[0][1] * b0 + g[1][1] * b1)


def bilinear_elimination_quadratic(F: BiLinearForm, G: BiLinearForm) -> BinaryForm:
    """Binary quadratic in b whose roots are the b-values where F and G
    share a common nonzero c solution."""
    field = F.field
    f, g = F.grid, G.grid
    # det [[f00 b0 + f10 b1, f01 b0 + f11 b1], [g00 b0 + g10 b1, ...]]
    a2 = f[0][0] * g[0][1] - f[0][1] * g[0][0]
    a1 = (f[0][0] * g[1][1] - f[0][1] * g[1][0]
          + f[1][0] * g[0][1] - f[1][1] * g[0][0])
    a0 = f[1][0] * g[1][1] - f[1][1] * g[1][0]
    return BinaryForm(field, 2, [a2, a1, a0])
