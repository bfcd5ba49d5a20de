"""The dual quartic hypersurface in P(W*), recovered by interpolation.

Hyperplanes tangent to the Lagrangian locus sweep a quartic hypersurface
in the dual projective space.  This module samples such hyperplanes,
interpolates the unique quartic through enough of them, restricts it to
linear subspaces of covectors, and compares it against the endomorphism
invariant under the wedge pairing.
"""

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import KernelDimError, NoHyperplaneError, ZeroRestrictionError
from .fields import Field, FieldScalar
from .linalg import Matrix, ProjPoint, Vector, vstack
from .rng import spawn
from .strata import lambda_invariant, sample_sigma
from .symplectic import SigmaPoint, SymplecticContext, W_DIM, tangent_space

MONOMIALS4: Tuple[Tuple[int, int, int, int], ...] = tuple(
    combinations_with_replacement(range(W_DIM), 4)
)
N_MONOMIALS4 = len(MONOMIALS4)  # 2380

_QUAD_PAIRS = tuple(combinations_with_replacement(range(W_DIM), 2))
_QUAD_INDEX = {pair: k for k, pair in enumerate(_QUAD_PAIRS)}
_QI = np.array([i for i, _ in _QUAD_PAIRS], dtype=np.int64)
_QJ = np.array([j for _, j in _QUAD_PAIRS], dtype=np.int64)
_A_IDX = np.array([_QUAD_INDEX[m[0], m[1]] for m in MONOMIALS4], dtype=np.int64)
_B_IDX = np.array([_QUAD_INDEX[m[2], m[3]] for m in MONOMIALS4], dtype=np.int64)


def monomial_basis(nvars: int) -> Tuple[Tuple[int, int, int, int], ...]:
    """Degree-4 monomials in graded-lex order (index multisets)."""
    return tuple(combinations_with_replacement(range(nvars), 4))


@dataclass(frozen=True)
class QuarticForm:
    """A quartic form as a coefficient vector over the graded-lex basis."""

    field: Field
    nvars: int
    coeffs: Tuple[FieldScalar, ...]

    def __post_init__(self):
        expected = math.comb(self.nvars + 3, 4)
        if len(self.coeffs) != expected:
            raise ValueError(
                f"{self.nvars} variables need {expected} coefficients,"
                f" got {len(self.coeffs)}"
            )
        if all(c.is_zero() for c in self.coeffs):
            raise ValueError("the zero form is not a quartic")

    def evaluate(self, coords: Sequence) -> FieldScalar:
        field = self.field
        x = [field(c) for c in coords]
        acc = field.zero
        for (i, j, k, l), c in zip(monomial_basis(self.nvars), self.coeffs):
            if c.is_zero():
                continue
            acc = acc + c * x[i] * x[j] * x[k] * x[l]
        return acc

    def normalized(self) -> "QuarticForm":
        """Scaled so the first nonzero coefficient is one."""
        lead = next(c for c in self.coeffs if not c.is_zero())
        inv = self.field.one / lead
        return QuarticForm(
            self.field, self.nvars, tuple(inv * c for c in self.coeffs)
        )

    def proportional_to(self, other: "QuarticForm") -> bool:
        if self.nvars != other.nvars or self.field is not other.field:
            return False
        return self.normalized().coeffs == other.normalized().coeffs


@dataclass(frozen=True)
class TangentHyperplaneSample:
    """A covector cutting a tangent hyperplane, with its tangency point."""

    h: ProjPoint
    tangency: SigmaPoint


def sample_tangent_hyperplane(
    ctx: SymplecticContext,
    seed,
    constraints: Optional[Matrix] = None,
) -> TangentHyperplaneSample:
    """A random hyperplane tangent to the locus at a random point.

    The covector vanishes on the embedded tangent space of the sampled
    point and on any extra constraint rows (14-vectors the hyperplane
    must contain).  Deterministic in the seed.
    """
    field = ctx.field
    point = sample_sigma(ctx, ("tangent-hyperplane", str(seed)))
    tangent = tangent_space(point)
    stacked = tangent.basis
    if constraints is not None and constraints.nrows:
        stacked = vstack(stacked, constraints)
    allowed = stacked.kernel()
    if allowed.nrows == 0:
        raise NoHyperplaneError(
            "no hyperplane is tangent at the sampled point under the constraints"
        )
    rng = spawn("tangent-hyperplane", field.short_name, str(seed))
    while True:
        weights = [field.random_scalar(rng) for _ in range(allowed.nrows)]
        h = allowed.apply_left(weights)
        if any(not c.is_zero() for c in h):
            return TangentHyperplaneSample(ProjPoint(field, h), point)


def covector_monomial_row(vals: Sequence[int], p: int) -> np.ndarray:
    """Values of the 2380 quartic monomials at a 14-vector, mod p."""
    x = np.asarray(vals, dtype=np.int64) % p
    q = (x[_QI] * x[_QJ]) % p
    return (q[_A_IDX] * q[_B_IDX]) % p


def _modp_matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """a @ b mod p; BLAS float64 when sums stay exact, int64 otherwise."""
    if a.shape[1] * p * p < 2**53:
        prod = a.astype(np.float64) @ b.astype(np.float64)
        return np.rint(prod % p).astype(np.int64) % p
    return (a @ b) % p


def _modp_kernel(rows: np.ndarray, p: int) -> List[np.ndarray]:
    """Right kernel basis over F_p, block-reduced matrix elimination.

    Products stay below 2**63 as long as ncols * p * p does; callers
    guard the prime size.
    """
    ncols = rows.shape[1]
    piv_rows = np.zeros((0, ncols), dtype=np.int64)
    piv_cols: List[int] = []
    block = 256
    for start in range(0, rows.shape[0], block):
        chunk = rows[start : start + block] % p
        if piv_cols:
            coeff = chunk[:, piv_cols]
            if np.any(coeff):
                chunk = (chunk - _modp_matmul(coeff, piv_rows, p)) % p
        new_rows: List[np.ndarray] = []
        new_cols: List[int] = []
        for r in range(chunk.shape[0]):
            row = chunk[r]
            for nr, nc in zip(new_rows, new_cols):
                c = row[nc]
                if c:
                    row = (row - c * nr) % p
            nz = np.nonzero(row)[0]
            if nz.size == 0:
                continue
            lead = int(nz[0])
            inv = pow(int(row[lead]), p - 2, p)
            new_rows.append((row * inv) % p)
            new_cols.append(lead)
        if not new_rows:
            continue
        newmat = np.stack(new_rows)
        # Mutual reduction: every new pivot column becomes an identity
        # column across the new rows, so one matmul clears it elsewhere.
        for i in range(len(new_rows)):
            for j in range(len(new_rows)):
                if i == j:
                    continue
                c = newmat[i, new_cols[j]]
                if c:
                    newmat[i] = (newmat[i] - c * newmat[j]) % p
        if piv_cols:
            d = piv_rows[:, new_cols]
            if np.any(d):
                piv_rows = (piv_rows - _modp_matmul(d, newmat, p)) % p
        piv_rows = np.vstack([piv_rows, newmat])
        piv_cols.extend(new_cols)
    taken = set(piv_cols)
    kernel = []
    for f in range(ncols):
        if f in taken:
            continue
        v = np.zeros(ncols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(piv_cols):
            v[c] = (-int(piv_rows[i, f])) % p
        kernel.append(v)
    return kernel


def _require_small_prime(field: Field) -> int:
    p = getattr(field, "p", None)
    if p is None:
        raise ValueError("interpolation runs over prime fields only")
    if N_MONOMIALS4 * p * p >= 2**63:
        raise ValueError(f"prime {p} too large for the int64 elimination")
    return p


def evaluation_rows(
    field: Field, samples: Sequence[TangentHyperplaneSample]
) -> np.ndarray:
    p = _require_small_prime(field)
    return np.stack(
        [covector_monomial_row([c.val for c in s.h.coords], p) for s in samples]
    )


def interpolate_dual_quartic(
    ctx: SymplecticContext, samples: Sequence[TangentHyperplaneSample]
) -> QuarticForm:
    """The unique quartic through the sampled tangent hyperplanes.

    Requires at least 2600 samples; the kernel of the full evaluation
    matrix must be exactly one-dimensional.
    """
    if len(samples) < 2600:
        raise ValueError(f"need at least 2600 samples, got {len(samples)}")
    field = ctx.field
    p = _require_small_prime(field)
    rows = evaluation_rows(field, samples)
    kernel = _modp_kernel(rows, p)
    if len(kernel) != 1:
        raise KernelDimError(
            f"interpolation kernel has dimension {len(kernel)}, expected 1"
        )
    coeffs = tuple(field(int(v)) for v in kernel[0])
    return QuarticForm(field, W_DIM, coeffs).normalized()


_DEFAULT_QUARTIC_SAMPLES = 2600


def default_dual_quartic(ctx: SymplecticContext) -> QuarticForm:
    """The interpolated quartic for this context, computed once.

    Sample seeds are fixed so every consumer sees the same form; the
    result is cached on the context.
    """
    cached = getattr(ctx, "_dual_quartic", None)
    if cached is None:
        samples = [
            sample_tangent_hyperplane(ctx, f"dual-quartic-{k}")
            for k in range(_DEFAULT_QUARTIC_SAMPLES)
        ]
        cached = interpolate_dual_quartic(ctx, samples)
        ctx._dual_quartic = cached
    return cached


def restrict(q: QuarticForm, param: Matrix) -> QuarticForm:
    """Substitute a linear parametrization into the form.

    The rows of ``param`` are the images of the new coordinate vectors;
    the result is a quartic in ``param.nrows`` variables.
    """
    field = q.field
    if param.ncols != q.nvars:
        raise ValueError("parametrization does not match the variable count")
    m = param.nrows
    p = getattr(field, "p", None)
    if p is not None:
        new_coeffs = _restrict_modp(q, param, p)
    else:
        new_coeffs = _restrict_generic(q, param)
    if all(c.is_zero() for c in new_coeffs):
        raise ZeroRestrictionError("the form vanishes on the subspace")
    return QuarticForm(field, m, tuple(new_coeffs)).normalized()


def _restrict_modp(q: QuarticForm, param: Matrix, p: int) -> List[FieldScalar]:
    field = q.field
    m = param.nrows
    rows = [[c.val for c in r] for r in param.rows]
    acc: Dict[Tuple[int, int, int, int], int] = {}
    for (i, j, k, l), c in zip(monomial_basis(q.nvars), q.coeffs):
        if c.is_zero():
            continue
        cv = c.val
        for a in range(m):
            pa = rows[a][i]
            if not pa:
                continue
            for b in range(m):
                pb = pa * rows[b][j]
                if not pb:
                    continue
                for e in range(m):
                    pe = pb * rows[e][k]
                    if not pe:
                        continue
                    for f in range(m):
                        pf = pe * rows[f][l]
                        if not pf:
                            continue
                        key = tuple(sorted((a, b, e, f)))
                        acc[key] = (acc.get(key, 0) + cv * pf) % p
    return [field(acc.get(mono, 0)) for mono in monomial_basis(m)]


def _restrict_generic(q: QuarticForm, param: Matrix) -> List[FieldScalar]:
    field = q.field
    m = param.nrows
    acc: Dict[Tuple[int, int, int, int], FieldScalar] = {}
    for (i, j, k, l), c in zip(monomial_basis(q.nvars), q.coeffs):
        if c.is_zero():
            continue
        for a in range(m):
            for b in range(m):
                for e in range(m):
                    for f in range(m):
                        term = (
                            c
                            * param.rows[a][i]
                            * param.rows[b][j]
                            * param.rows[e][k]
                            * param.rows[f][l]
                        )
                        if term.is_zero():
                            continue
                        key = tuple(sorted((a, b, e, f)))
                        acc[key] = acc.get(key, field.zero) + term
    return [acc.get(mono, field.zero) for mono in monomial_basis(m)]


def restrict_to_line(q: QuarticForm, u: Sequence, v: Sequence):
    """The binary form cut on the line spanned by two covectors."""
    from .poly import BinaryForm

    field = q.field
    line = restrict(q, Matrix(field, [list(u), list(v)]))
    # Binary-form convention: coefficient k sits on s^(4-k) t^k; the
    # graded-lex quartic basis in (y0, y1) lists y0^4 first.
    return BinaryForm(field, 4, list(line.coeffs))


def pairing_dual(ctx: SymplecticContext, h: Sequence[FieldScalar]) -> Vector:
    """The 14-vector whose wedge pairing reproduces the covector."""
    return ctx.pairing_gram_inverse().apply_left(list(h))


def crosscheck_hitchin(
    ctx: SymplecticContext,
    q: QuarticForm,
    count: int = 100,
    seed: str = "crosscheck",
) -> dict:
    """Compare the quartic against the endomorphism invariant.

    For each random covector h the quartic value Q(h) is paired with the
    invariant of the wedge-pairing dual of h; the report states whether
    the two agree up to a single global scalar.  Never raises.
    """
    field = ctx.field
    rng = spawn("crosscheck-hitchin", field.short_name, seed)
    scalar = None
    both_zero = 0
    matching = 0
    mismatched = 0
    for _ in range(count):
        h = [field.random_scalar(rng) for _ in range(W_DIM)]
        if all(c.is_zero() for c in h):
            both_zero += 1
            continue
        qv = q.evaluate(h)
        lam = lambda_invariant(ctx, pairing_dual(ctx, h))
        if qv.is_zero() and lam.is_zero():
            both_zero += 1
        elif qv.is_zero() != lam.is_zero():
            mismatched += 1
        else:
            ratio = qv / lam
            if scalar is None:
                scalar = ratio
                matching += 1
            elif ratio == scalar:
                matching += 1
            else:
                mismatched += 1
    return {
        "samples": count,
        "both_zero": both_zero,
        "matching": matching,
        "mismatched": mismatched,
        "scalar": None if scalar is None else str(scalar),
        "agrees": mismatched == 0 and matching > 0,
    }
