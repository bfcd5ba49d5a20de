"""Orbit strata of P(Wspace), the quartic invariant, and bisecant lines.

The symplectic group has four orbit closures on P(Wspace): the Lagrangian
Grassmannian Sigma (dim 6), the middle stratum Omega (dim 9) of classes
x ^ beta with beta of rank 4, a quartic hypersurface (dim 12), and the
whole space.  Through a point off the hypersurface passes a unique
bisecant line of Sigma; on the smooth hypersurface locus the line is
tangent; on Omega the bisecants through the point sweep out a 4-space
whose intersection with Sigma is a 3-fold quadric.

The quartic invariant lambda is evaluated in closed form through the
classical endomorphism phi -> (iota_phi omega) ^ omega of the dual space,
which squares to lambda times the identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    InOmegaError,
    NotInOmegaError,
    NotSplitError,
    RankDeficientError,
    RankUnstableError,
    ResampleError,
)
from .fields import FieldScalar
from .linalg import (
    Matrix,
    ProjPoint,
    ProjSubspace,
    Vector,
    coordinates_in_row_space,
    dot,
    is_zero_vector,
)
from .poly import BinaryForm, binary_gcd
from .rng import spawn
from .symplectic import (
    N_TRIPLES,
    SigmaPoint,
    SymplecticContext,
    SymplecticFrame,
    TRIPLES,
    W_DIM,
    adapted_frame,
    exp_point,
    is_lagrangian,
    perm_sign_sorted,
    random_lagrangian,
    random_symmetric,
    random_symmetric_invertible,
    random_transverse_lagrangian_pair,
    sigma_point_from_lagrangian,
    support_space,
    wedge3,
)

PAIRS: Tuple[Tuple[int, int], ...] = tuple(itertools.combinations(range(6), 2))
PAIR_INDEX: Dict[Tuple[int, int], int] = {p: i for i, p in enumerate(PAIRS)}

# Quintuple coordinates of wedge^5 V indexed by the missing basis index.
_QUINTS: Tuple[Tuple[int, ...], ...] = tuple(
    tuple(i for i in range(6) if i != m) for m in range(6)
)
_QUINT_SIGNS: Tuple[int, ...] = tuple(
    perm_sign_sorted((m,) + _QUINTS[m]) for m in range(6)
)

MONOMIALS2: Tuple[Tuple[int, int], ...] = tuple(
    itertools.combinations_with_replacement(range(W_DIM), 2)
)  # 105 degree-2 monomials on P^13

# Dimension of the space of quadrics through the Grassmannian, pinned from
# the stabilized interpolation over several primes and seeds.
N_QUAD = 21


def _as_omega20(ctx: SymplecticContext, w) -> Tuple[FieldScalar, ...]:
    """Accept a ProjPoint or coordinate tuple in W and lift to 20 coords."""
    if isinstance(w, ProjPoint):
        return ctx.from_w(w.coords)
    w = tuple(w)
    if len(w) == W_DIM:
        return ctx.from_w(w)
    if len(w) == N_TRIPLES:
        return w
    raise ValueError(f"expected 14 or 20 coordinates, got {len(w)}")


def contract_covector(phi: Sequence[FieldScalar], omega20, zero) -> Tuple:
    """iota_phi omega as a 2-vector (15 pair coordinates)."""
    out = [zero] * len(PAIRS)
    for t_idx, (a, b, c) in enumerate(TRIPLES):
        coeff = omega20[t_idx]
        if coeff.is_zero():
            continue
        out[PAIR_INDEX[(b, c)]] = out[PAIR_INDEX[(b, c)]] + phi[a] * coeff
        out[PAIR_INDEX[(a, c)]] = out[PAIR_INDEX[(a, c)]] - phi[b] * coeff
        out[PAIR_INDEX[(a, b)]] = out[PAIR_INDEX[(a, b)]] + phi[c] * coeff
    return tuple(out)


def _wedge_2_3(eta15, omega20, zero) -> Tuple:
    """2-vector wedge 3-vector as quintuple coordinates (missing index)."""
    out = [zero] * 6
    for p_idx, pair in enumerate(PAIRS):
        a = eta15[p_idx]
        if a.is_zero():
            continue
        for t_idx, t in enumerate(TRIPLES):
            b = omega20[t_idx]
            if b.is_zero():
                continue
            idx5 = pair + t
            sign = perm_sign_sorted(idx5)
            if sign == 0:
                continue
            missing = 15 - sum(idx5)
            if sign == 1:
                out[missing] = out[missing] + a * b
            else:
                out[missing] = out[missing] - a * b
    return tuple(out)


def _endo_matrix(ctx: SymplecticContext, omega20) -> Matrix:
    """The contraction-wedge endomorphism matrix, without the square check."""
    field = ctx.field
    zero = field.zero
    rows: List[List[FieldScalar]] = []
    for i in range(6):
        phi = [zero] * 6
        phi[i] = field.one
        eta = contract_covector(phi, omega20, zero)
        xi = _wedge_2_3(eta, omega20, zero)
        rows.append(
            [xi[m] if _QUINT_SIGNS[m] == 1 else -xi[m] for m in range(6)]
        )
    return Matrix(field, rows)


def hitchin_endo(ctx: SymplecticContext, w) -> Tuple[Matrix, FieldScalar]:
    """Endomorphism K of the dual space with K^2 = lambda * id.

    Row i of the returned matrix is K(e_i*); covectors act as row vectors,
    phi -> phi K.  The invariant is normalized so the split form
    e123 + e456 has lambda = 1.
    """
    omega20 = _as_omega20(ctx, w)
    field = ctx.field
    k = _endo_matrix(ctx, omega20)
    ksq = k @ k
    trace = sum((ksq.rows[i][i] for i in range(6)), field.zero)
    lam = trace / field(6)
    for i in range(6):
        for j in range(6):
            expected = lam if i == j else field.zero
            if ksq.rows[i][j] != expected:
                raise ArithmeticError("endomorphism square is not scalar")
    return k, lam


def lambda_invariant(ctx: SymplecticContext, w) -> FieldScalar:
    return hitchin_endo(ctx, w)[1]


def on_sigma(ctx: SymplecticContext, w) -> Tuple[bool, Optional[Matrix]]:
    """Decomposability test; returns the Lagrangian 3-space when true."""
    omega20 = _as_omega20(ctx, w)
    supp = support_space(ctx, omega20)
    if supp.nrows != 3:
        return False, None
    if not is_lagrangian(ctx, supp):
        raise ArithmeticError("3-dimensional support failed isotropy")
    return True, supp


@dataclass
class StratumResult:
    label: str  # SIGMA | OMEGA | F_SMOOTH_LOCUS | GENERIC
    lam: FieldScalar
    k_rank: int
    support_dim: int  # linear dimension of {v : v ^ omega = 0}
    lagrangian: Optional[Matrix] = None  # for SIGMA
    x_omega: Optional[ProjPoint] = None  # for OMEGA


def stratum(ctx: SymplecticContext, w) -> StratumResult:
    """Orbit label, decided down the inclusion chain."""
    omega20 = _as_omega20(ctx, w)
    supp = support_space(ctx, omega20)
    k, lam = hitchin_endo(ctx, omega20)
    k_rank = k.rank()
    if supp.nrows == 3:
        if not is_lagrangian(ctx, supp):
            raise ArithmeticError("3-dimensional support failed isotropy")
        return StratumResult("SIGMA", lam, k_rank, 3, lagrangian=supp)
    if supp.nrows == 1:
        x = ProjPoint(ctx.field, supp.rows[0])
        return StratumResult("OMEGA", lam, k_rank, 1, x_omega=x)
    if lam.is_zero():
        return StratumResult("F_SMOOTH_LOCUS", lam, k_rank, supp.nrows)
    return StratumResult("GENERIC", lam, k_rank, supp.nrows)


@dataclass
class BisecantWitness:
    p: SigmaPoint
    q: SigmaPoint  # equal to p in the tangent case
    line: ProjSubspace  # dim 1 in P^13, W-coordinates
    coefficients: Optional[Tuple[FieldScalar, FieldScalar]] = None
    tangent: bool = False

    def points(self):
        return {self.p, self.q}


def _annihilator_lagrangian(ctx: SymplecticContext, covectors: Matrix) -> Matrix:
    """Common kernel in V of a 3-space of covectors."""
    if covectors.nrows != 3:
        raise RankDeficientError(
            f"expected a 3-dimensional covector space, got {covectors.nrows}"
        )
    return covectors.kernel()


def bisecant_decompose(ctx: SymplecticContext, w) -> BisecantWitness:
    """The unique bisecant or tangent line of Sigma through the point.

    Off the quartic hypersurface the two endomorphism eigenspaces cut out
    the two Lagrangians; on the smooth hypersurface locus the tangency
    point is the annihilator of the endomorphism image.
    """
    omega20 = _as_omega20(ctx, w)
    field = ctx.field
    supp = support_space(ctx, omega20)
    if supp.nrows == 3:
        raise ValueError("point lies on the Grassmannian itself")
    if supp.nrows == 1:
        raise InOmegaError("bisecant through the point is not unique")
    k, lam = hitchin_endo(ctx, omega20)
    w14 = ctx.to_w(omega20)
    if not lam.is_zero():
        root = lam.sqrt()
        if root is None:
            raise NotSplitError("quartic invariant is not a square")
        halves = []
        for sgn_root in (root, -root):
            shifted = k - Matrix.identity(field, 6).scale(sgn_root)
            # Covectors act on the right of k, so eigencovectors form the
            # left kernel.
            eig = shifted.transpose().kernel()
            if eig.nrows != 3:
                raise ArithmeticError(
                    f"eigenspace dimension {eig.nrows}, expected 3"
                )
            lag = _annihilator_lagrangian(ctx, eig)
            halves.append(sigma_point_from_lagrangian(ctx, lag))
        p, q = halves
        span = Matrix(field, [p.w_point.coords, q.w_point.coords])
        coeffs = coordinates_in_row_space(span, w14)
        if coeffs is None:
            raise ArithmeticError("point is not on the recovered bisecant")
        line = ProjSubspace(field, span)
        return BisecantWitness(p, q, line, coefficients=(coeffs[0], coeffs[1]))
    # lam = 0: tangent case on the smooth hypersurface locus
    k_rank = k.rank()
    if k_rank == 0:
        raise InOmegaError("endomorphism vanishes; point lies deeper")
    if k_rank == 3:
        lag = _annihilator_lagrangian(ctx, k.row_space())
    else:
        lag = _tangency_by_polars(ctx, w14)
    p = sigma_point_from_lagrangian(ctx, lag)
    span = Matrix(field, [p.w_point.coords, w14])
    line = ProjSubspace(field, span)
    if line.dim != 1:
        raise ArithmeticError("tangency point coincides with the input")
    return BisecantWitness(p, p, line, tangent=True)


def _tangency_by_polars(ctx: SymplecticContext, w14: Vector) -> Matrix:
    """Tangency point via the polar hyperplanes of the quadric ideal.

    If the line through p in Sigma is tangent at p, then p lies on every
    polar hyperplane of w with respect to the ideal quadrics.
    """
    ideal = default_quadric_ideal(ctx)
    rows = [
        tuple(quadric_gram(ctx.field, q).apply(w14))
        for q in ideal.rows
    ]
    kern = Matrix(ctx.field, rows).kernel()
    if kern.nrows != 1:
        raise ArithmeticError(
            f"polar system has kernel dimension {kern.nrows}, expected 1"
        )
    point = ProjPoint(ctx.field, kern.rows[0])
    ok, lag = on_sigma(ctx, point)
    if not ok or lag is None:
        raise ArithmeticError("polar kernel point is not decomposable")
    return lag


# -- middle stratum witness ------------------------------------------------


@dataclass
class OmegaWitness:
    x_omega: ProjPoint  # common point in P^5
    p4: ProjSubspace  # 4-space in P^13 swept by the bisecants
    quadric_gram: Matrix  # 5x5 symmetric Gram of the 3-fold quadric
    sampled_points: Tuple[SigmaPoint, ...]
    bisecant_lines: Tuple[ProjSubspace, ...]


def omega_witness(
    ctx: SymplecticContext, w, seed: int = 0, samples: int = 10
) -> OmegaWitness:
    """Witness data for a middle-stratum point.

    Bisecants through the point are produced by drawing a Lagrangian
    through the support point and intersecting the joining line with the
    quadric ideal; the second intersection point is rational because one
    root of the restricted pencil is already known.
    """
    omega20 = _as_omega20(ctx, w)
    field = ctx.field
    supp = support_space(ctx, omega20)
    if supp.nrows != 1:
        raise NotInOmegaError(f"support dimension {supp.nrows}, expected 1")
    x_vec = supp.rows[0]
    x_omega = ProjPoint(field, x_vec)
    w14 = ctx.to_w(omega20)
    ideal = default_quadric_ideal(ctx)
    points: List[SigmaPoint] = []
    lines: List[ProjSubspace] = []
    attempts = 0
    while len(lines) < samples:
        attempts += 1
        if attempts > 20 * samples:
            raise ResampleError("could not collect bisecant samples")
        rng = spawn("omega-witness", ctx.field.short_name, seed, attempts)
        lag = random_lagrangian(ctx, rng, through=x_vec)
        rho1 = sigma_point_from_lagrangian(ctx, lag)
        a = rho1.w_point.coords
        if ProjPoint(field, w14) == rho1.w_point:
            continue
        # Restrict every ideal quadric to the line s*w + t*rho1.
        forms = []
        for qrow in ideal.rows:
            gram = quadric_gram(field, qrow)
            c_ss = _gram_value(gram, w14, w14)
            c_st = _gram_value(gram, w14, a) + _gram_value(gram, a, w14)
            c_tt = _gram_value(gram, a, a)
            forms.append(BinaryForm(field, 2, (c_ss, c_st, c_tt)))
        g = binary_gcd(forms)
        if g.d != 2:
            continue
        g0, g1, g2 = g.coeffs
        if not g2.is_zero():
            raise ArithmeticError("known root of the pencil does not vanish")
        if g0.is_zero():
            continue  # line tangent at rho1; resample
        # Remaining root of g0*s + g1*t.
        s0, t0 = -g1, g0
        rho2_coords = tuple(s0 * u + t0 * v for u, v in zip(w14, a))
        rho2_pt = ProjPoint(field, rho2_coords)
        ok, lag2 = on_sigma(ctx, rho2_pt)
        if not ok or lag2 is None:
            raise ArithmeticError("second pencil root is not on the quadric locus")
        rho2 = sigma_point_from_lagrangian(ctx, lag2)
        if rho2 == rho1:
            continue
        if not rho2.plane().contains_point(x_omega):
            raise ArithmeticError("second intersection misses the support point")
        line = ProjSubspace(field, Matrix(field, [a, rho2.w_point.coords]))
        for pt in (rho1, rho2):
            if pt not in points:
                points.append(pt)
        lines.append(line)
    span = ProjSubspace(
        field, Matrix(field, [pt.w_point.coords for pt in points])
    )
    if span.dim != 4:
        raise ArithmeticError(f"bisecant sweep spans dim {span.dim}, expected 4")
    gram5 = _restricted_quadric(ctx, ideal, span)
    return OmegaWitness(x_omega, span, gram5, tuple(points), tuple(lines))


def _gram_value(gram: Matrix, u, v) -> FieldScalar:
    return dot(u, gram.apply(v))


def _restricted_quadric(
    ctx: SymplecticContext, ideal: Matrix, span: ProjSubspace
) -> Matrix:
    """The single quadric cutting Sigma on the 4-space, as a 5x5 Gram."""
    field = ctx.field
    basis = span.basis  # 5 x 14
    restricted_rows = []
    for qrow in ideal.rows:
        gram = quadric_gram(field, qrow)
        small = basis @ gram @ basis.transpose()
        restricted_rows.append([small.rows[i][j] for i, j in
                                itertools.combinations_with_replacement(range(5), 2)])
    space = Matrix(field, restricted_rows).row_space()
    if space.nrows != 1:
        raise ArithmeticError(
            f"restricted quadric space has dimension {space.nrows}, expected 1"
        )
    flat = space.rows[0]
    small = [[field.zero] * 5 for _ in range(5)]
    for idx, (i, j) in enumerate(itertools.combinations_with_replacement(range(5), 2)):
        small[i][j] = flat[idx]
        small[j][i] = flat[idx]
    gram5 = Matrix(field, small)
    if gram5.rank() != 5:
        raise ArithmeticError("3-fold quadric Gram is singular")
    return gram5


# -- samplers --------------------------------------------------------------


def sample_sigma(ctx: SymplecticContext, seed) -> SigmaPoint:
    """Deterministic Grassmannian sample: random symmetric chart matrix in
    a random adapted frame."""
    rng = spawn("sample-sigma", ctx.field.short_name, seed)
    origin, infinity = random_transverse_lagrangian_pair(ctx, rng)
    frame = adapted_frame(ctx, origin, infinity)
    b = random_symmetric(ctx.field, rng)
    return exp_point(frame, b)


def sample_generic(ctx: SymplecticContext, seed) -> ProjPoint:
    rng = spawn("sample-generic", ctx.field.short_name, seed)
    while True:
        coords = tuple(ctx.field.random_scalar(rng) for _ in range(W_DIM))
        if not is_zero_vector(coords):
            return ProjPoint(ctx.field, coords)


def sample_omega(ctx: SymplecticContext, seed) -> ProjPoint:
    """Middle-stratum sample: combination of three Lagrangian wedges
    through a common point."""
    for attempt in range(40):
        rng = spawn("sample-omega", ctx.field.short_name, seed, attempt)
        x = tuple(ctx.field.random_scalar(rng) for _ in range(6))
        if is_zero_vector(x):
            continue
        total = None
        for _ in range(3):
            lag = random_lagrangian(ctx, rng, through=x)
            pt = sigma_point_from_lagrangian(ctx, lag)
            c = ctx.field.random_nonzero(rng)
            term = tuple(c * v for v in pt.plucker20)
            total = term if total is None else tuple(
                u + v for u, v in zip(total, term)
            )
        if support_space(ctx, total).nrows == 1:
            return ProjPoint(ctx.field, ctx.to_w(total))
    raise ResampleError("middle-stratum sampling failed to converge")


def sample_tangent(
    ctx: SymplecticContext, seed
) -> Tuple[ProjPoint, SigmaPoint]:
    """A point on a tangent line of the Grassmannian, off the surface,
    together with its tangency point."""
    for attempt in range(40):
        rng = spawn("sample-tangent", ctx.field.short_name, seed, attempt)
        origin, infinity = random_transverse_lagrangian_pair(ctx, rng)
        frame = adapted_frame(ctx, origin, infinity)
        base = exp_point(frame, Matrix.zeros(ctx.field, 3, 3))
        direction = tangent_direction(ctx, frame, random_symmetric_invertible(ctx.field, rng))
        a = ctx.field.random_nonzero(rng)
        b = ctx.field.random_nonzero(rng)
        omega20 = tuple(
            a * u + b * v for u, v in zip(base.plucker20, direction)
        )
        if support_space(ctx, omega20).nrows == 0:
            return ProjPoint(ctx.field, ctx.to_w(omega20)), base
    raise ResampleError("tangent sampling failed to converge")


def tangent_direction(
    ctx: SymplecticContext, frame: SymplecticFrame, bdot: Matrix
) -> Tuple[FieldScalar, ...]:
    """Derivative of the chart at the origin along a symmetric direction,
    as a 20-coordinate 3-vector."""
    field = ctx.field
    zero, one = field.zero, field.one
    total = [zero] * N_TRIPLES
    base_rows = []
    vel_rows = []
    for i in range(3):
        coords = [one if j == i else zero for j in range(3)] + [zero] * 3
        base_rows.append(frame.from_frame_coords(tuple(coords)))
        vel = [zero] * 3 + list(bdot.rows[i])
        vel_rows.append(frame.from_frame_coords(tuple(vel)))
    for i in range(3):
        rows = [vel_rows[j] if j == i else base_rows[j] for j in range(3)]
        term = wedge3(rows)
        total = [u + v for u, v in zip(total, term)]
    return tuple(total)


# -- the quadric ideal of Sigma -------------------------------------------


def quadric_eval(field, coeffs105, point14) -> FieldScalar:
    acc = field.zero
    for c, (i, j) in zip(coeffs105, MONOMIALS2):
        if not c.is_zero():
            acc = acc + c * point14[i] * point14[j]
    return acc


def quadric_gram(field, coeffs105) -> Matrix:
    """Symmetric 14x14 Gram of a quadric given by monomial coefficients."""
    half = field.one / field(2)
    rows = [[field.zero] * W_DIM for _ in range(W_DIM)]
    for c, (i, j) in zip(coeffs105, MONOMIALS2):
        if c.is_zero():
            continue
        if i == j:
            rows[i][i] = rows[i][i] + c
        else:
            rows[i][j] = rows[i][j] + c * half
            rows[j][i] = rows[j][i] + c * half
    return Matrix(field, rows)


def sigma_quadric_ideal(ctx: SymplecticContext, points: Sequence[SigmaPoint]) -> Matrix:
    """Basis of the quadrics through the given Grassmannian samples.

    Demands enough points that the kernel has visibly stabilized: the
    last 20 points must not change the kernel computed without them.
    """
    if len(points) < 150:
        raise ValueError("need at least 150 sample points")
    field = ctx.field
    rows = [
        [pt.w_point.coords[i] * pt.w_point.coords[j] for (i, j) in MONOMIALS2]
        for pt in points
    ]
    partial = Matrix(field, rows[:-20]).kernel().row_space()
    full = Matrix(field, rows).kernel().row_space()
    if partial != full:
        raise RankUnstableError(
            f"kernel moved from {partial.nrows} to {full.nrows} with 20 more points"
        )
    return full


def default_quadric_ideal(ctx: SymplecticContext) -> Matrix:
    """Session-cached ideal from a fixed deterministic sample set."""
    if ctx._quadric_ideal is None:
        points = [sample_sigma(ctx, f"ideal-{k}") for k in range(170)]
        ctx._quadric_ideal = sigma_quadric_ideal(ctx, points)
    return ctx._quadric_ideal


def restrict_ideal_to_line(
    ctx: SymplecticContext, a14, b14
) -> List[BinaryForm]:
    """All ideal quadrics restricted to the line s*a + t*b."""
    field = ctx.field
    ideal = default_quadric_ideal(ctx)
    forms = []
    for qrow in ideal.rows:
        gram = quadric_gram(field, qrow)
        c_ss = _gram_value(gram, a14, a14)
        c_st = _gram_value(gram, a14, b14) + _gram_value(gram, b14, a14)
        c_tt = _gram_value(gram, b14, b14)
        forms.append(BinaryForm(field, 2, (c_ss, c_st, c_tt)))
    return forms
