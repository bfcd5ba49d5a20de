"""Exact dense linear algebra over a fixed base field.

Vectors are plain tuples of FieldScalar.  A Matrix is an immutable grid of
FieldScalar; reductions (rref, rank, kernel) are cached on the instance.
Kernels are returned as matrices whose *rows* span the right null space,
with an identity pattern on the free columns so that coordinates can be
read off directly.
"""

from __future__ import annotations

from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import FieldMismatchError, RankDeficientError
from .fields import Field, FieldScalar

Vector = Tuple[FieldScalar, ...]

# residue products must stay inside int64 during vectorized reductions:
# dot products here sum at most a few dozen terms of size (p-1)^2
_NP_PRIME_BOUND = 1 << 28


def _np_vec(field: Field, v: Sequence) -> Optional[np.ndarray]:
    """Raw residues of a vector over the given prime field, or None."""
    vals = []
    for x in v:
        if type(x) is not FieldScalar or x.field is not field:
            return None
        vals.append(x.val)
    return np.asarray(vals, dtype=np.int64)


def _coerce_row(field: Field, row: Iterable) -> Tuple[FieldScalar, ...]:
    return tuple(field(x) for x in row)


def vector(field: Field, entries: Iterable) -> Vector:
    return _coerce_row(field, entries)


def dot(u: Sequence[FieldScalar], v: Sequence[FieldScalar]) -> FieldScalar:
    if len(u) != len(v):
        raise ValueError(f"dot of lengths {len(u)} and {len(v)}")
    acc = u[0].field.zero
    for a, b in zip(u, v):
        acc = acc + a * b
    return acc


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c: FieldScalar, u: Sequence[FieldScalar]) -> Vector:
    return tuple(c * a for a in u)


def is_zero_vector(u: Sequence[FieldScalar]) -> bool:
    return all(a.is_zero() for a in u)


class Matrix:
    """Immutable exact matrix."""

    def __init__(self, field: Field, rows: Sequence[Sequence]):
        self.field = field
        self.rows: Tuple[Tuple[FieldScalar, ...], ...] = tuple(
            _coerce_row(field, r) for r in rows
        )
        if self.rows:
            n = len(self.rows[0])
            if any(len(r) != n for r in self.rows):
                raise ValueError("ragged rows")
        self._rref: Optional[Tuple["Matrix", Tuple[int, ...]]] = None
        self._np: Optional[np.ndarray] = None

    def _np_ok(self) -> bool:
        p = getattr(self.field, "p", 0)
        return 0 < p < _NP_PRIME_BOUND and bool(self.rows)

    def _np_ints(self) -> np.ndarray:
        """Cached residue array; callers must have checked _np_ok."""
        if self._np is None:
            self._np = np.array(
                [[x.val for x in r] for r in self.rows], dtype=np.int64
            )
        return self._np

    # -- construction ------------------------------------------------------

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        one, zero = field.one, field.zero
        return cls(field, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field: Field, m: int, n: int) -> "Matrix":
        zero = field.zero
        return cls(field, [[zero] * n for _ in range(m)])

    @classmethod
    def from_function(cls, field: Field, m: int, n: int, f: Callable[[int, int], object]) -> "Matrix":
        return cls(field, [[f(i, j) for j in range(n)] for i in range(m)])

    @classmethod
    def random(cls, field: Field, m: int, n: int, rng) -> "Matrix":
        return cls(field, [[field.random_scalar(rng) for _ in range(n)] for _ in range(m)])

    # -- shape and access --------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij) -> FieldScalar:
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> Vector:
        return self.rows[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field is other.field
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((id(self.field), self.rows))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix({self.nrows}x{self.ncols}: {body})"

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Matrix") -> None:
        if self.field is not other.field:
            raise FieldMismatchError("matrices over different fields")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(
            self.field,
            [vec_add(a, b) for a, b in zip(self.rows, other.rows)],
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(
            self.field,
            [vec_sub(a, b) for a, b in zip(self.rows, other.rows)],
        )

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, [[-x for x in r] for r in self.rows])

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        return Matrix(self.field, [vec_scale(c, r) for r in self.rows])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.ncols != other.nrows:
            raise ValueError(f"matmul shapes {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        if self._np_ok() and other.rows:
            field = self.field
            prod = (self._np_ints() @ other._np_ints()) % field.p
            return Matrix(field, [[field(int(x)) for x in r] for r in prod])
        cols = [other.col(j) for j in range(other.ncols)]
        return Matrix(
            self.field,
            [[dot(r, c) for c in cols] for r in self.rows],
        )

    def apply(self, v: Sequence[FieldScalar]) -> Vector:
        """Matrix times column vector, returned as a tuple of length nrows."""
        if self._np_ok() and len(v) == self.ncols:
            vv = _np_vec(self.field, v)
            if vv is not None:
                field = self.field
                out = (self._np_ints() @ vv) % field.p
                return tuple(field(int(t)) for t in out)
        return tuple(dot(r, v) for r in self.rows)

    def apply_left(self, v: Sequence[FieldScalar]) -> Vector:
        """Row vector times matrix, returned as a tuple of length ncols."""
        if len(v) != self.nrows:
            raise ValueError("length mismatch in apply_left")
        if self._np_ok():
            vv = _np_vec(self.field, v)
            if vv is not None:
                field = self.field
                out = (vv @ self._np_ints()) % field.p
                return tuple(field(int(t)) for t in out)
        zero = self.field.zero
        out = [zero] * self.ncols
        for c, row in zip(v, self.rows):
            if c.is_zero():
                continue
            for j, x in enumerate(row):
                out[j] = out[j] + c * x
        return tuple(out)

    def transpose(self) -> "Matrix":
        return Matrix(self.field, [self.col(j) for j in range(self.ncols)])

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        return Matrix(
            self.field, [[self.rows[i][j] for j in col_idx] for i in row_idx]
        )

    # -- reductions --------------------------------------------------------

    def _rref_np(self) -> Tuple["Matrix", Tuple[int, ...]]:
        """Vectorized echelon reduction over a small prime field."""
        field = self.field
        p = field.p
        a = self._np_ints().copy()
        m, n = a.shape
        pivots: List[int] = []
        r = 0
        for c in range(n):
            if r == m:
                break
            nz = np.nonzero(a[r:, c])[0]
            if nz.size == 0:
                continue
            pr = r + int(nz[0])
            if pr != r:
                a[[r, pr]] = a[[pr, r]]
            a[r] = (a[r] * pow(int(a[r, c]), p - 2, p)) % p
            col = a[:, c].copy()
            col[r] = 0
            mask = col != 0
            if mask.any():
                a[mask] = (a[mask] - np.outer(col[mask], a[r])) % p
            pivots.append(c)
            r += 1
        out = Matrix(field, [[field(int(x)) for x in row] for row in a])
        return out, tuple(pivots)

    def rref(self) -> Tuple["Matrix", Tuple[int, ...]]:
        """Reduced row echelon form and pivot columns."""
        if self._rref is not None:
            return self._rref
        if self._np_ok() and self.nrows * self.ncols >= 48:
            self._rref = self._rref_np()
            return self._rref
        rows = [list(r) for r in self.rows]
        m = len(rows)
        n = self.ncols
        pivots: List[int] = []
        r = 0
        for c in range(n):
            if r == m:
                break
            pr = None
            for i in range(r, m):
                if not rows[i][c].is_zero():
                    pr = i
                    break
            if pr is None:
                continue
            rows[r], rows[pr] = rows[pr], rows[r]
            inv = rows[r][c].inverse()
            rows[r] = [inv * x for x in rows[r]]
            prow = rows[r]
            for i in range(m):
                if i == r:
                    continue
                f = rows[i][c]
                if f.is_zero():
                    continue
                ri = rows[i]
                rows[i] = [a - f * b for a, b in zip(ri, prow)]
            pivots.append(c)
            r += 1
        result = Matrix(self.field, rows), tuple(pivots)
        self._rref = result
        return result

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> "Matrix":
        """Rows span {v : A v = 0}; identity pattern on free columns."""
        R, pivots = self.rref()
        n = self.ncols
        free = [j for j in range(n) if j not in set(pivots)]
        zero, one = self.field.zero, self.field.one
        basis = []
        for f in free:
            v = [zero] * n
            v[f] = one
            for r, c in enumerate(pivots):
                v[c] = -R.rows[r][f]
            basis.append(v)
        return Matrix(self.field, basis)

    def row_space(self) -> "Matrix":
        """Canonical (RREF, no zero rows) basis of the row space."""
        R, pivots = self.rref()
        return Matrix(self.field, [R.rows[i] for i in range(len(pivots))])

    def det(self) -> FieldScalar:
        if self.nrows != self.ncols:
            raise ValueError("determinant of non-square matrix")
        n = self.nrows
        rows = [list(r) for r in self.rows]
        det = self.field.one
        for c in range(n):
            pr = None
            for i in range(c, n):
                if not rows[i][c].is_zero():
                    pr = i
                    break
            if pr is None:
                return self.field.zero
            if pr != c:
                rows[c], rows[pr] = rows[pr], rows[c]
                det = -det
            det = det * rows[c][c]
            inv = rows[c][c].inverse()
            prow = [inv * x for x in rows[c]]
            for i in range(c + 1, n):
                f = rows[i][c]
                if f.is_zero():
                    continue
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        return det

    def inverse(self) -> "Matrix":
        if self.nrows != self.ncols:
            raise ValueError("inverse of non-square matrix")
        n = self.nrows
        aug = Matrix(
            self.field,
            [list(r) + list(Matrix.identity(self.field, n).rows[i]) for i, r in enumerate(self.rows)],
        )
        R, pivots = aug.rref()
        if pivots[:n] != tuple(range(n)):
            raise RankDeficientError("matrix is singular")
        return Matrix(self.field, [r[n:] for r in R.rows[:n]])

    def is_symmetric(self) -> bool:
        return self.nrows == self.ncols and all(
            self.rows[i][j] == self.rows[j][i]
            for i in range(self.nrows)
            for j in range(i + 1, self.ncols)
        )

    def is_antisymmetric(self) -> bool:
        return self.nrows == self.ncols and all(
            self.rows[i][j] == -self.rows[j][i]
            for i in range(self.nrows)
            for j in range(i, self.ncols)
        )


def vstack(*mats: Matrix) -> Matrix:
    field = mats[0].field
    rows: List[Sequence] = []
    for m in mats:
        if m.field is not field:
            raise FieldMismatchError("vstack over different fields")
        rows.extend(m.rows)
    return Matrix(field, rows)


def hstack(*mats: Matrix) -> Matrix:
    field = mats[0].field
    nrows = mats[0].nrows
    rows = []
    for i in range(nrows):
        row: List[FieldScalar] = []
        for m in mats:
            row.extend(m.rows[i])
        rows.append(row)
    return Matrix(field, rows)


def solve_right(A: Matrix, b: Sequence[FieldScalar]) -> Optional[Vector]:
    """One solution x of A x = b, or None if inconsistent."""
    if len(b) != A.nrows:
        raise ValueError("rhs length mismatch")
    aug = Matrix(A.field, [list(r) + [bv] for r, bv in zip(A.rows, b)])
    R, pivots = aug.rref()
    n = A.ncols
    if n in pivots:
        return None
    zero = A.field.zero
    x = [zero] * n
    for r, c in enumerate(pivots):
        x[c] = R.rows[r][n]
    return tuple(x)


def in_row_space(A: Matrix, v: Sequence[FieldScalar]) -> bool:
    """Whether v is a linear combination of the rows of A."""
    sol = solve_right(A.transpose(), v)
    return sol is not None


def coordinates_in_row_space(A: Matrix, v: Sequence[FieldScalar]) -> Optional[Vector]:
    """c with c A = v, or None."""
    return solve_right(A.transpose(), v)


class ProjPoint:
    """Point of projective n-space, stored as a nonzero coordinate tuple.

    Equality and hashing use the canonical representative scaled so the
    first nonzero coordinate is one.
    """

    def __init__(self, field: Field, coords: Iterable):
        self.field = field
        self.coords: Vector = _coerce_row(field, coords)
        if not self.coords or all(c.is_zero() for c in self.coords):
            raise ValueError("projective point needs a nonzero coordinate")
        self._norm: Optional[Vector] = None

    @property
    def ambient_dim(self) -> int:
        return len(self.coords) - 1

    def normalized(self) -> Vector:
        if self._norm is None:
            lead = next(c for c in self.coords if not c.is_zero())
            inv = lead.inverse()
            self._norm = tuple(inv * c for c in self.coords)
        return self._norm

    def __eq__(self, other):
        return (
            isinstance(other, ProjPoint)
            and self.field is other.field
            and self.normalized() == other.normalized()
        )

    def __hash__(self):
        return hash((id(self.field), self.normalized()))

    def __repr__(self):
        return "(" + " : ".join(str(c) for c in self.normalized()) + ")"


class ProjSubspace:
    """Linear subspace of projective n-space.

    Stored as a full-row-rank matrix in RREF whose rows span the affine
    cone, so equality is plain matrix equality.
    """

    def __init__(self, field: Field, basis: Matrix):
        if basis.field is not field:
            raise FieldMismatchError("basis over wrong field")
        canonical = basis.row_space()
        if canonical.nrows == 0:
            raise ValueError("empty subspace")
        self.field = field
        self.basis = canonical

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence]) -> "ProjSubspace":
        return cls(field, Matrix(field, rows))

    @classmethod
    def from_points(cls, points: Sequence[ProjPoint]) -> "ProjSubspace":
        field = points[0].field
        return cls(field, Matrix(field, [p.coords for p in points]))

    @property
    def ambient_dim(self) -> int:
        return self.basis.ncols - 1

    @property
    def dim(self) -> int:
        """Projective dimension."""
        return self.basis.nrows - 1

    @property
    def pivots(self) -> Tuple[int, ...]:
        """Pivot columns of the canonical basis.  Reading a vector of the
        cone at these columns recovers its basis coefficients."""
        return self.basis.rref()[1]

    def contains_point(self, p: ProjPoint) -> bool:
        return in_row_space(self.basis, p.coords)

    def contains(self, other: "ProjSubspace") -> bool:
        return all(in_row_space(self.basis, r) for r in other.basis.rows)

    def point_coordinates(self, p: ProjPoint) -> Optional[Vector]:
        """Coefficients of p in this basis, or None if p is outside."""
        return coordinates_in_row_space(self.basis, p.coords)

    def __eq__(self, other):
        return (
            isinstance(other, ProjSubspace)
            and self.field is other.field
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((id(self.field), self.basis))

    def __repr__(self):
        return f"ProjSubspace(P^{self.ambient_dim}, dim {self.dim})"

    def orthogonal_complement(self) -> "ProjSubspace":
        """Annihilator under the standard dot pairing."""
        return ProjSubspace(self.field, self.basis.kernel())


def join(a: ProjSubspace, b: ProjSubspace) -> ProjSubspace:
    return ProjSubspace(a.field, vstack(a.basis, b.basis))


def meet(a: ProjSubspace, b: ProjSubspace) -> ProjSubspace:
    """Intersection; raises ValueError if it is empty."""
    stacked = vstack(a.basis.kernel(), b.basis.kernel())
    basis = stacked.kernel()
    if basis.nrows == 0:
        raise ValueError("empty intersection")
    return ProjSubspace(a.field, basis)
