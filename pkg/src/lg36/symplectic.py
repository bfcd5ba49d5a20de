"""Symplectic 6-space, its third wedge power, and the Lagrangian chart.

The ambient space V is six-dimensional with the standard symplectic form
    alpha = x1^x4 + x2^x5 + x3^x6.
Contraction of alpha against wedge^3(V) has a 14-dimensional kernel Wspace;
projectivized, the decomposable classes of Lagrangian 3-planes form the
Lagrangian Grassmannian Sigma inside P(Wspace) = P^13.  Everything here is
exact over the session field.

Conventions: vectors are length-6 row tuples; 3-spaces are 3x6 matrices of
basis rows; wedge coordinates are indexed by sorted triples in
lexicographic order.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    ChartFailureError,
    NotSymmetricError,
    NotTransverseError,
    RankDeficientError,
)
from .fields import Field, FieldScalar
from .linalg import (
    Matrix,
    ProjPoint,
    ProjSubspace,
    Vector,
    is_zero_vector,
    vstack,
)
from .rng import spawn

TRIPLES: Tuple[Tuple[int, int, int], ...] = tuple(itertools.combinations(range(6), 3))
TRIPLE_INDEX: Dict[Tuple[int, int, int], int] = {t: i for i, t in enumerate(TRIPLES)}
QUADS: Tuple[Tuple[int, ...], ...] = tuple(itertools.combinations(range(6), 4))
QUAD_INDEX: Dict[Tuple[int, ...], int] = {q: i for i, q in enumerate(QUADS)}

N_TRIPLES = 20
W_DIM = 14


def perm_sign_sorted(indices: Sequence[int]) -> int:
    """Sign of the permutation sorting the given distinct indices, or 0 on
    a repeat."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign


def _complement_table() -> Tuple[Tuple[int, int], ...]:
    """For each triple index: (index of complementary triple, sign of
    e_t ^ e_comp relative to e_0^...^e_5)."""
    out = []
    for t in TRIPLES:
        comp = tuple(i for i in range(6) if i not in t)
        out.append((TRIPLE_INDEX[comp], perm_sign_sorted(t + comp)))
    return tuple(out)


COMPLEMENT: Tuple[Tuple[int, int], ...] = _complement_table()

# alpha pairs (0-indexed): (0,3), (1,4), (2,5)
_ALPHA_PAIR = {0: 3, 1: 4, 2: 5}


def alpha_entry(i: int, j: int) -> int:
    """alpha(e_i, e_j) for basis vectors, valued in {-1, 0, 1}."""
    if _ALPHA_PAIR.get(i) == j:
        return 1
    if _ALPHA_PAIR.get(j) == i:
        return -1
    return 0


def det3(m) -> object:
    """Determinant of a 3x3 nested sequence over any ring with + - *."""
    (a, b, c), (d, e, f), (g, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


_TRIPLE_ARRAY = np.array(TRIPLES, dtype=np.intp)

# products of residues stay below int64 as long as 3 p^2 < 2^63
_WEDGE_FAST_PRIME_BOUND = 1 << 30


def _wedge3_prime(rows, field) -> Tuple:
    """Vectorized wedge over a small prime field (the hot path)."""
    p = field.p
    m = np.array([[s.val for s in r] for r in rows], dtype=np.int64)
    a = m[0][_TRIPLE_ARRAY]
    b = m[1][_TRIPLE_ARRAY]
    c = m[2][_TRIPLE_ARRAY]
    m0 = (b[:, 1] * c[:, 2] - b[:, 2] * c[:, 1]) % p
    m1 = (b[:, 0] * c[:, 2] - b[:, 2] * c[:, 0]) % p
    m2 = (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0]) % p
    det = (a[:, 0] * m0 - a[:, 1] * m1 + a[:, 2] * m2) % p
    return tuple(field(int(v)) for v in det)


def wedge3(rows: Sequence[Sequence]) -> Tuple:
    """Wedge of three 6-vectors as a 20-tuple over sorted triples.

    Works over any ring with + - * (field scalars or dual numbers).
    """
    r0, r1, r2 = rows
    lead = r0[0]
    if type(lead) is FieldScalar:
        field = lead.field
        if getattr(field, "p", 0) and field.p < _WEDGE_FAST_PRIME_BOUND:
            return _wedge3_prime(rows, field)
    out = []
    for (i, j, k) in TRIPLES:
        out.append(det3(((r0[i], r0[j], r0[k]),
                         (r1[i], r1[j], r1[k]),
                         (r2[i], r2[j], r2[k]))))
    return tuple(out)


class DualScalar:
    """Element a + b*eps with eps^2 = 0, for first-order differentiation."""

    __slots__ = ("a", "b")

    def __init__(self, a: FieldScalar, b: FieldScalar):
        self.a = a
        self.b = b

    def __add__(self, other):
        return DualScalar(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return DualScalar(self.a - other.a, self.b - other.b)

    def __mul__(self, other):
        return DualScalar(self.a * other.a, self.a * other.b + self.b * other.a)

    def __neg__(self):
        return DualScalar(-self.a, -self.b)


class SymplecticContext:
    """Session-wide exact data: the form, the contraction kernel, and the
    coordinate maps between wedge^3 V and Wspace."""

    def __init__(self, field: Field):
        self.field = field
        self.alpha = Matrix.from_function(
            field, 6, 6, lambda i, j: field(alpha_entry(i, j))
        )
        self.d_alpha_matrix = self._build_d_alpha()
        kern = self.d_alpha_matrix.kernel()
        if kern.nrows != W_DIM:
            raise RankDeficientError(
                f"contraction kernel has dimension {kern.nrows}, expected {W_DIM}"
            )
        self.w_basis = kern  # 14 x 20, identity pattern on free columns
        _, pivots = self.d_alpha_matrix.rref()
        self.w_free_cols: Tuple[int, ...] = tuple(
            j for j in range(N_TRIPLES) if j not in set(pivots)
        )
        self._pairing_gram: Optional[Matrix] = None
        self._pairing_gram_inv: Optional[Matrix] = None
        self._quadric_ideal = None  # cached by strata.default_quadric_ideal
        self._dual_quartic = None  # cached by dualquartic.default_dual_quartic

    def _build_d_alpha(self) -> Matrix:
        """Matrix of the contraction wedge^3 V -> V on basis triples."""
        field = self.field
        cols = []
        for (a, b, c) in TRIPLES:
            col = [0] * 6
            col[c] += alpha_entry(a, b)
            col[b] -= alpha_entry(a, c)
            col[a] += alpha_entry(b, c)
            cols.append(col)
        return Matrix.from_function(field, 6, N_TRIPLES, lambda i, j: field(cols[j][i]))

    # -- coordinates -------------------------------------------------------

    def d_alpha(self, omega20: Sequence[FieldScalar]) -> Vector:
        """Contraction of alpha against a 3-vector (20 coordinates)."""
        return self.d_alpha_matrix.apply(omega20)

    def in_w(self, omega20: Sequence[FieldScalar]) -> bool:
        return is_zero_vector(self.d_alpha(omega20))

    def to_w(self, omega20: Sequence[FieldScalar]) -> Vector:
        """W-coordinates of a 20-vector that lies in the kernel."""
        coords = tuple(omega20[j] for j in self.w_free_cols)
        if self.from_w(coords) != tuple(omega20):
            raise ValueError("vector is not in the contraction kernel")
        return coords

    def from_w(self, w14: Sequence[FieldScalar]) -> Vector:
        return self.w_basis.apply_left(w14)

    # -- the symplectic form ----------------------------------------------

    def alpha_form(self, u: Sequence[FieldScalar], v: Sequence[FieldScalar]) -> FieldScalar:
        acc = self.field.zero
        for i in range(3):
            acc = acc + u[i] * v[i + 3] - u[i + 3] * v[i]
        return acc

    def pairing20(self, x: Sequence[FieldScalar], y: Sequence[FieldScalar]) -> FieldScalar:
        """Wedge pairing of two 3-vectors into the volume line."""
        acc = self.field.zero
        for i, (ci, sign) in enumerate(COMPLEMENT):
            if sign == 1:
                acc = acc + x[i] * y[ci]
            else:
                acc = acc - x[i] * y[ci]
        return acc

    def pairing_gram(self) -> Matrix:
        """Gram matrix of the wedge pairing on the Wspace basis."""
        if self._pairing_gram is None:
            rows = self.w_basis.rows
            self._pairing_gram = Matrix(
                self.field,
                [[self.pairing20(r, s) for s in rows] for r in rows],
            )
        return self._pairing_gram

    def pairing_gram_inverse(self) -> Matrix:
        if self._pairing_gram_inv is None:
            self._pairing_gram_inv = self.pairing_gram().inverse()
        return self._pairing_gram_inv

    def w_pairing(self, x14: Sequence[FieldScalar], y14: Sequence[FieldScalar]) -> FieldScalar:
        return self.pairing20(self.from_w(x14), self.from_w(y14))


_context_cache: Dict[int, SymplecticContext] = {}


def make_context(field: Field) -> SymplecticContext:
    ctx = _context_cache.get(id(field))
    if ctx is None:
        ctx = SymplecticContext(field)
        _context_cache[id(field)] = ctx
    return ctx


# -- Lagrangian subspaces --------------------------------------------------


def is_lagrangian(ctx: SymplecticContext, basis: Matrix) -> bool:
    """Whether the rows span an alpha-isotropic 3-space.

    Raises RANK_DEFICIENT if the rows are dependent.
    """
    if basis.nrows != 3 or basis.ncols != 6:
        raise ValueError("expected a 3x6 basis matrix")
    if basis.rank() != 3:
        raise RankDeficientError("basis rows are dependent")
    r = basis.rows
    return all(
        ctx.alpha_form(r[i], r[j]).is_zero()
        for i in range(3)
        for j in range(i + 1, 3)
    )


def alpha_gram(ctx: SymplecticContext, a: Matrix, b: Matrix) -> Matrix:
    return Matrix(
        ctx.field,
        [[ctx.alpha_form(u, v) for v in b.rows] for u in a.rows],
    )


def lagrangians_transverse(ctx: SymplecticContext, a: Matrix, b: Matrix) -> bool:
    return not alpha_gram(ctx, a, b).det().is_zero()


def alpha_perp(ctx: SymplecticContext, rows: Sequence[Vector]) -> Matrix:
    """Basis of the alpha-orthogonal complement of the given vectors."""
    if not rows:
        return Matrix.identity(ctx.field, 6)
    cond = Matrix(ctx.field, [ctx.alpha.apply_left(r) for r in rows])
    return cond.kernel()


def random_lagrangian(
    ctx: SymplecticContext, rng, through: Optional[Vector] = None
) -> Matrix:
    """Random Lagrangian 3-space, optionally through a given vector."""
    rows: List[Vector] = []
    if through is not None:
        rows.append(tuple(ctx.field(x) for x in through))
    while len(rows) < 3:
        perp = alpha_perp(ctx, rows)
        coeffs = [ctx.field.random_scalar(rng) for _ in range(perp.nrows)]
        v = perp.apply_left(tuple(coeffs))
        if is_zero_vector(v):
            continue
        candidate = Matrix(ctx.field, rows + [v])
        if candidate.rank() == len(rows) + 1:
            rows.append(v)
    return Matrix(ctx.field, rows)


def random_transverse_lagrangian_pair(ctx: SymplecticContext, rng) -> Tuple[Matrix, Matrix]:
    first = random_lagrangian(ctx, rng)
    for _ in range(50):
        second = random_lagrangian(ctx, rng)
        if lagrangians_transverse(ctx, first, second):
            return first, second
    raise NotTransverseError("could not find a transverse Lagrangian")


def random_symmetric(field: Field, rng) -> Matrix:
    vals = [field.random_scalar(rng) for _ in range(6)]
    a, b, c, d, e, f = vals
    return Matrix(field, [[a, b, c], [b, d, e], [c, e, f]])


def random_symmetric_invertible(field: Field, rng, tries: int = 50) -> Matrix:
    for _ in range(tries):
        m = random_symmetric(field, rng)
        if not m.det().is_zero():
            return m
    raise RankDeficientError("no invertible symmetric sample found")


# -- frames and the exp chart ---------------------------------------------


class SymplecticFrame:
    """Adapted basis: rows f1..f3 span the chart origin Lagrangian, rows
    f4..f6 the Lagrangian at infinity, and alpha takes the standard form."""

    def __init__(self, ctx: SymplecticContext, matrix: Matrix):
        self.ctx = ctx
        self.matrix = matrix
        if matrix.nrows != 6 or matrix.ncols != 6:
            raise ValueError("frame must be 6x6")
        gram = Matrix(
            ctx.field,
            [[ctx.alpha_form(u, v) for v in matrix.rows] for u in matrix.rows],
        )
        if gram != ctx.alpha:
            raise NotTransverseError("frame is not alpha-standard")
        self._inverse: Optional[Matrix] = None

    @property
    def inverse(self) -> Matrix:
        if self._inverse is None:
            self._inverse = self.matrix.inverse()
        return self._inverse

    def origin_rows(self) -> Matrix:
        return Matrix(self.ctx.field, self.matrix.rows[:3])

    def infinity_rows(self) -> Matrix:
        return Matrix(self.ctx.field, self.matrix.rows[3:])

    def to_frame_coords(self, v: Sequence[FieldScalar]) -> Vector:
        return self.inverse.apply_left(v)

    def from_frame_coords(self, c: Sequence[FieldScalar]) -> Vector:
        return self.matrix.apply_left(c)

    def __eq__(self, other):
        return isinstance(other, SymplecticFrame) and self.matrix == other.matrix

    def __repr__(self):
        return f"SymplecticFrame({self.matrix!r})"


def adapted_frame(ctx: SymplecticContext, origin: Matrix, infinity: Matrix) -> SymplecticFrame:
    """Frame adapted to a transverse Lagrangian pair.

    The origin rows are kept; the infinity rows are recombined so the
    pairing becomes the identity.
    """
    if not is_lagrangian(ctx, origin) or not is_lagrangian(ctx, infinity):
        raise ValueError("adapted_frame needs two Lagrangian 3-spaces")
    gram = alpha_gram(ctx, origin, infinity)
    if gram.det().is_zero():
        raise NotTransverseError("Lagrangians are not transverse")
    recomb = gram.inverse().transpose() @ infinity
    return SymplecticFrame(ctx, vstack(origin, recomb))


class SigmaPoint:
    """Point of the Lagrangian Grassmannian: a Lagrangian 3-space together
    with its wedge class in W-coordinates."""

    def __init__(self, ctx: SymplecticContext, lagrangian: Matrix):
        self.ctx = ctx
        self.lagrangian = lagrangian.row_space()
        if self.lagrangian.nrows != 3:
            raise RankDeficientError("Lagrangian basis must have rank 3")
        self.plucker20: Tuple[FieldScalar, ...] = wedge3(self.lagrangian.rows)
        self.w_point = ProjPoint(ctx.field, ctx.to_w(self.plucker20))

    def __eq__(self, other):
        return isinstance(other, SigmaPoint) and self.w_point == other.w_point

    def __hash__(self):
        return hash(self.w_point)

    def __repr__(self):
        return f"SigmaPoint({self.w_point!r})"

    def plane(self) -> ProjSubspace:
        """The Lagrangian plane as a subspace of P^5."""
        return ProjSubspace(self.ctx.field, self.lagrangian)


def sigma_point_from_lagrangian(ctx: SymplecticContext, basis: Matrix) -> SigmaPoint:
    if not is_lagrangian(ctx, basis):
        raise ValueError("basis does not span a Lagrangian 3-space")
    return SigmaPoint(ctx, basis)


def exp_point(frame: SymplecticFrame, b: Matrix) -> SigmaPoint:
    """Chart map: a symmetric 3x3 matrix to the graph Lagrangian's point.

    In frame coordinates the graph rows are [I | b]; symmetry of b is
    exactly the Lagrangian condition.
    """
    ctx = frame.ctx
    if not b.is_symmetric():
        raise NotSymmetricError("chart matrix must be symmetric")
    field = ctx.field
    one, zero = field.one, field.zero
    rows = []
    for i in range(3):
        coords = [one if j == i else zero for j in range(3)] + list(b.rows[i])
        rows.append(frame.from_frame_coords(tuple(coords)))
    return SigmaPoint(ctx, Matrix(field, rows))


def exp_infinity(frame: SymplecticFrame) -> SigmaPoint:
    return SigmaPoint(frame.ctx, frame.infinity_rows())


def support_matrix(ctx: SymplecticContext, omega20: Sequence[FieldScalar]) -> Matrix:
    """Matrix of v -> v wedge omega from V to wedge^4 V (15 x 6)."""
    field = ctx.field
    cols: List[List[FieldScalar]] = [[field.zero] * len(QUADS) for _ in range(6)]
    for t_idx, t in enumerate(TRIPLES):
        c = omega20[t_idx]
        if c.is_zero():
            continue
        for i in range(6):
            if i in t:
                continue
            quad = tuple(sorted((i,) + t))
            pos = sum(1 for x in t if x < i)
            if pos % 2 == 0:
                cols[i][QUAD_INDEX[quad]] = cols[i][QUAD_INDEX[quad]] + c
            else:
                cols[i][QUAD_INDEX[quad]] = cols[i][QUAD_INDEX[quad]] - c
    return Matrix.from_function(field, len(QUADS), 6, lambda i, j: cols[j][i])


def support_space(ctx: SymplecticContext, omega20: Sequence[FieldScalar]) -> Matrix:
    """Basis rows of {v in V : v wedge omega = 0}."""
    return support_matrix(ctx, omega20).kernel()


SYMMETRIC_DIRECTIONS: Tuple[Tuple[Tuple[int, int], ...], ...] = (
    ((0, 0),), ((1, 1),), ((2, 2),),
    ((0, 1), (1, 0)), ((0, 2), (2, 0)), ((1, 2), (2, 1)),
)


def chart_at(point: SigmaPoint, seed: int = 0, tries: int = 20) -> SymplecticFrame:
    """An adapted frame whose chart origin is the given point."""
    ctx = point.ctx
    for k in range(tries):
        rng = spawn(seed, "chart", k)
        candidate = random_lagrangian(ctx, rng)
        if lagrangians_transverse(ctx, point.lagrangian, candidate):
            return adapted_frame(ctx, point.lagrangian, candidate)
    raise ChartFailureError("no transverse Lagrangian found for the chart")


def tangent_space(point: SigmaPoint, seed: int = 0) -> ProjSubspace:
    """Embedded tangent space at a point, a P^6 inside P^13.

    Differentiates the chart with nilpotent dual numbers along the six
    symmetric directions.
    """
    ctx = point.ctx
    field = ctx.field
    frame = chart_at(point, seed=seed)
    one, zero = field.one, field.zero
    base_rows = []
    for i in range(3):
        coords = [one if j == i else zero for j in range(3)] + [zero] * 3
        base_rows.append(frame.from_frame_coords(tuple(coords)))
    rows14: List[Vector] = [ctx.to_w(wedge3(base_rows))]
    for direction in SYMMETRIC_DIRECTIONS:
        bdot = [[zero] * 3 for _ in range(3)]
        for (i, j) in direction:
            bdot[i][j] = one
        dual_rows = []
        for i in range(3):
            coords = [zero] * 3 + list(bdot[i])
            vel = frame.from_frame_coords(tuple(coords))
            dual_rows.append(
                tuple(DualScalar(a, b) for a, b in zip(base_rows[i], vel))
            )
        dual_wedge = wedge3(dual_rows)
        deriv20 = tuple(d.b for d in dual_wedge)
        rows14.append(ctx.to_w(deriv20))
    span = ProjSubspace(field, Matrix(field, rows14))
    if span.dim != 6:
        raise RankDeficientError(f"tangent space has dimension {span.dim}")
    return span
