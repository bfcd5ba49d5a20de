"""Segre threefolds through a cubic and the residual-curve group law.

A triple of pairwise disjoint lines spanning P^5, conjugate for the
symplectic form, sweeps a threefold of Lagrangian planes; its image in
P(W) is a Segre P^1 x P^1 x P^1 inside the Lagrangian locus.  Cutting
that threefold with a codimension-3 linear space through a curve leaves
a residual twisted cubic; iterating the residual operation over marked
tangent hyperplanes realizes the chain arithmetic on bisecant curves.
"""

import itertools
from dataclasses import dataclass, field as dataclass_field
from typing import Dict, List, Optional, Sequence, Tuple

from .cubics import (
    TwistedCubic,
    cubic_through_triple,
    curve_intersection,
    curves_equal,
    horizontal_line,
    plane_meets_vc,
    plane_split_count,
)
from .dualquartic import (
    QuarticForm,
    TangentHyperplaneSample,
    pairing_dual,
)
from .errors import (
    ConjugacyError,
    InOmegaError,
    LG36Error,
    LineCountError,
    NoHyperplaneError,
    NotHyperplaneError,
    NotOnFXError,
    NotTransverseError,
    ResampleError,
    ResidualDegenerateError,
)
from .fibration import SectionTower, curve_fibration_value
from .fields import Field, FieldScalar
from .linalg import (
    Matrix,
    ProjPoint,
    ProjSubspace,
    Vector,
    coordinates_in_row_space,
    join,
    meet,
    solve_right,
    vstack,
)
from .poly import (
    BiLinearForm,
    UniPoly,
    bilinear_elimination_quadratic,
    distinct_root_count,
    lagrange_interpolate,
    poly_gcd,
    uniroots,
)
from .rng import spawn
from .strata import (
    _endo_matrix,
    bisecant_decompose,
    lambda_invariant,
    sample_sigma,
)
from .symplectic import (
    SigmaPoint,
    SymplecticContext,
    det3,
    sigma_point_from_lagrangian,
    tangent_space,
    wedge3,
)


# ---------------------------------------------------------------------------
# conjugate lines and the Segre threefold


@dataclass(frozen=True)
class ConjugateLines:
    """Three disjoint lines in P^5 spanning it, pairwise symplectically
    orthogonal: every plane through one point of each is Lagrangian."""

    ctx: SymplecticContext
    l1: Matrix
    l2: Matrix
    l3: Matrix

    def __post_init__(self):
        ctx = self.ctx
        lines = self.lines
        for m in lines:
            if m.nrows != 2 or m.ncols != 6 or m.rank() != 2:
                raise ValueError("each line needs an independent 2x6 basis")
        for a in range(3):
            for b in range(a + 1, 3):
                if vstack(lines[a], lines[b]).rank() != 4:
                    raise ConjugacyError("lines are not disjoint")
                for u in lines[a].rows:
                    for v in lines[b].rows:
                        if not ctx.alpha_form(u, v).is_zero():
                            raise ConjugacyError(
                                "lines are not conjugate for the symplectic form"
                            )
        if vstack(*lines).rank() != 6:
            raise ConjugacyError("lines do not span P^5")

    @property
    def lines(self) -> Tuple[Matrix, Matrix, Matrix]:
        return (self.l1, self.l2, self.l3)


class SegreThreefold:
    """The image (a, b, c) -> a ^ b ^ c of a conjugate line triple."""

    def __init__(self, lines: ConjugateLines):
        self.ctx = lines.ctx
        self.lines = lines
        field = self.ctx.field
        rows = []
        for a in lines.l1.rows:
            for b in lines.l2.rows:
                for c in lines.l3.rows:
                    rows.append(self.ctx.to_w(wedge3([a, b, c])))
        span = ProjSubspace(field, Matrix(field, rows))
        if span.dim != 7:
            raise ConjugacyError(f"Segre span has dim {span.dim}, expected 7")
        self.span7 = span

    def point(self, sa: Sequence, sb: Sequence, sc: Sequence) -> SigmaPoint:
        """The Lagrangian point at parameters ((a0:a1), (b0:b1), (c0:c1))."""
        field = self.ctx.field
        rows = []
        for params, line in zip((sa, sb, sc), self.lines.lines):
            s0, s1 = field(params[0]), field(params[1])
            rows.append(
                tuple(s0 * line.rows[0][i] + s1 * line.rows[1][i] for i in range(6))
            )
        return SigmaPoint(self.ctx, Matrix(field, rows))

    def contains_plane(self, plane: Matrix) -> bool:
        """Whether a Lagrangian plane meets all three lines."""
        return all(
            vstack(line, plane).rank() == 4 for line in self.lines.lines
        )

    def factor_plane(
        self, plane: Matrix
    ) -> Tuple[ProjPoint, ProjPoint, ProjPoint]:
        """The meeting points with the three lines."""
        field = self.ctx.field
        out = []
        for line in self.lines.lines:
            cut = meet(
                ProjSubspace(field, line), ProjSubspace(field, plane)
            )
            if cut.dim != 0:
                raise ValueError("plane does not meet the line in one point")
            out.append(ProjPoint(field, cut.basis.rows[0]))
        return tuple(out)


def segre_from_beta(
    ctx: SymplecticContext, beta: Matrix, seed="0"
) -> ConjugateLines:
    """The conjugate line triple carved out by a second 2-form.

    The pencil of the two forms degenerates at three parameter values;
    the corresponding 2-dimensional kernels are the lines.
    """
    field = ctx.field
    if beta.nrows != 6 or beta.ncols != 6:
        raise ValueError("expected a 6x6 matrix")
    for i in range(6):
        for j in range(6):
            if beta.rows[i][j] != -beta.rows[j][i]:
                raise ValueError("the second form must be antisymmetric")
    if beta.det().is_zero():
        raise ValueError("the second form must be nondegenerate")
    alpha = ctx.alpha
    # det(beta - x alpha) by interpolation at seven parameter values.
    xs = [field(k) for k in range(7)]
    pencil = []
    for x in xs:
        m = Matrix(
            field,
            [
                [beta.rows[i][j] - x * alpha.rows[i][j] for j in range(6)]
                for i in range(6)
            ],
        )
        pencil.append((x, m.det()))
    charpoly = lagrange_interpolate(field, pencil)
    roots = uniroots(charpoly)
    if sum(m for _, m in roots) < 6:
        raise ConjugacyError("pencil eigenvalues are irrational")
    if len(roots) != 3 or any(m != 2 for _, m in roots):
        raise ConjugacyError("pencil eigenvalues are not three double points")
    planes = []
    for mu, _ in roots:
        m = Matrix(
            field,
            [
                [beta.rows[i][j] - mu * alpha.rows[i][j] for j in range(6)]
                for i in range(6)
            ],
        )
        ker = m.kernel()
        if ker.nrows != 2:
            raise ConjugacyError("eigenvalue kernel is not 2-dimensional")
        planes.append(ker)
    lines = ConjugateLines(ctx, *planes)
    # Light spot check that sampled planes land on the locus.
    rng = spawn("segre-beta", field.short_name, seed)
    segre = SegreThreefold(lines)
    for _ in range(3):
        params = [
            (field.random_scalar(rng), field.random_scalar(rng))
            for _ in range(3)
        ]
        segre.point(*params)
    return lines


def segre_through(
    curve: TwistedCubic, mark: TangentHyperplaneSample
) -> SegreThreefold:
    """The unique Segre threefold through the curve inside the marked
    tangent hyperplane.

    The mark's Lagrangian tangency plane meets the curve's plane sweep
    in three points; their horizontal lines are the conjugate triple.
    """
    ctx = curve.ctx
    hits = plane_meets_vc(curve, mark.tangency.lagrangian)
    lines = ConjugateLines(
        ctx, *[horizontal_line(curve, u).basis for (_, u, _) in hits]
    )
    segre = SegreThreefold(lines)
    # The whole span must sit inside the marking hyperplane.
    for row in segre.span7.basis.rows:
        if not _dot(mark.h.coords, row).is_zero():
            raise ConjugacyError("Segre span escapes the marking hyperplane")
    return segre


def _dot(a, b):
    acc = None
    for x, y in zip(a, b):
        acc = x * y if acc is None else acc + x * y
    return acc


def _proj_key(vec) -> Optional[Tuple[FieldScalar, ...]]:
    """Scale-normalized tuple identifying a projective point, or None."""
    inv = None
    for x in vec:
        if not x.is_zero():
            inv = x.inverse()
            break
    if inv is None:
        return None
    return tuple(inv * x for x in vec)


# ---------------------------------------------------------------------------
# residual cubic


def _grid_points(field: Field, count: int) -> List[Tuple[FieldScalar, FieldScalar]]:
    """Parameter grid on P^1: (1, 0), (1, 1), ..., and infinity."""
    limit = count - 1
    if field.characteristic:
        limit = min(limit, field.characteristic)
    pts = [(field.one, field(k)) for k in range(limit)]
    pts.append((field.zero, field.one))
    return pts


def residual_cubic(
    curve: TwistedCubic,
    mark: TangentHyperplaneSample,
    tower: SectionTower,
    grid: int = 12,
    check: bool = True,
) -> TwistedCubic:
    """The second component of the Segre threefold cut by the outer P^10.

    Sweeps the first Segre factor; each fiber is a P^1 x P^1 carrying
    three bilinear conditions whose solutions split into a point of the
    input curve and a point of the residual one.  With check=False the
    exact intersection-length certificate against the input curve is
    skipped; callers that revalidate downstream use this during search.
    """
    if tower.p10 is None:
        raise ValueError("residual curves need a tower with an outer P^10")
    ctx = curve.ctx
    field = ctx.field
    segre = segre_through(curve, mark)
    forms3 = tower.p10.basis.kernel()  # the three linear forms cutting P^10
    if forms3.nrows != 3:
        raise ValueError("outer space is not cut by three forms")
    l1, l2, l3 = segre.lines.lines
    # The fiber forms are trilinear in the three line parameters, so eight
    # basis wedges determine the whole sweep; each grid row then costs only
    # scalar arithmetic.
    wbasis = [
        [
            [ctx.to_w(wedge3([rk, mi, nj])) for nj in l3.rows]
            for mi in l2.rows
        ]
        for rk in l1.rows
    ]
    dvals = [
        [
            [[_dot(phi, wbasis[k][i][j]) for j in range(2)] for i in range(2)]
            for k in range(2)
        ]
        for phi in forms3.rows
    ]
    # Solutions inside the input curve's span are the input branch; the two
    # shared points lie on the common bisecant, which the cubic meets only
    # there, so span membership rejects exactly what curve membership did.
    span_ann = curve.span3.basis.kernel()
    wdim = len(wbasis[0][0][0])
    zero = field.zero
    residual_points: List[SigmaPoint] = []
    seen = set()
    for s0, s1 in _grid_points(field, grid):
        forms = []
        for d in dvals:
            grid22 = [
                [s0 * d[0][i][j] + s1 * d[1][i][j] for j in range(2)]
                for i in range(2)
            ]
            forms.append(BiLinearForm(field, grid22))
        live = [f for f in forms if not f.is_zero()]
        if len(live) < 2:
            continue
        quad = bilinear_elimination_quadratic(live[0], live[1])
        if quad.is_zero():
            continue
        for (b_pt, _mult) in quad.roots():
            c_pt = None
            for f in live:
                cr = f.c_row(b_pt)
                if not (cr[0].is_zero() and cr[1].is_zero()):
                    c_pt = (cr[1], -cr[0])
                    break
            if c_pt is None:
                continue
            if any(not f.evaluate(b_pt, c_pt).is_zero() for f in forms):
                continue
            w14 = [zero] * wdim
            for k, sk in enumerate((s0, s1)):
                if sk.is_zero():
                    continue
                for i, bi in enumerate(b_pt):
                    cf_ki = sk * bi
                    if cf_ki.is_zero():
                        continue
                    for j, cj in enumerate(c_pt):
                        cf = cf_ki * cj
                        if cf.is_zero():
                            continue
                        vec = wbasis[k][i][j]
                        for t in range(wdim):
                            w14[t] = w14[t] + cf * vec[t]
            if all(_dot(phi, w14).is_zero() for phi in span_ann.rows):
                continue
            key = _proj_key(w14)
            if key is None or key in seen:
                continue
            seen.add(key)
            a_row = tuple(
                s0 * l1.rows[0][i] + s1 * l1.rows[1][i] for i in range(6)
            )
            b_row = tuple(
                b_pt[0] * l2.rows[0][i] + b_pt[1] * l2.rows[1][i] for i in range(6)
            )
            c_row = tuple(
                c_pt[0] * l3.rows[0][i] + c_pt[1] * l3.rows[1][i] for i in range(6)
            )
            residual_points.append(
                SigmaPoint(ctx, Matrix(field, [a_row, b_row, c_row]))
            )
        if len(residual_points) >= 8:
            break
    if len(residual_points) < 4:
        raise ResidualDegenerateError(
            f"only {len(residual_points)} residual points found"
        )
    try:
        other = cubic_through_triple(*residual_points[:3])
    except NotTransverseError as exc:
        raise ResidualDegenerateError("residual points are degenerate") from exc
    for extra in residual_points[3:]:
        if not other.contains(extra):
            raise ResidualDegenerateError("harvested points are not on one cubic")
    if not tower.p10.contains(other.span3):
        raise ResidualDegenerateError("residual curve escapes the outer space")
    if check:
        length, _ = curve_intersection(curve, other)
        if length != 2:
            raise ResidualDegenerateError(
                f"residual curve meets the input in length {length}, not 2"
            )
    return other


# ---------------------------------------------------------------------------
# marked Fano setups


def sample_curve_mark(curve: TwistedCubic, seed) -> TangentHyperplaneSample:
    """A tangent hyperplane through the curve whose contact plane meets
    the plane sweep in three rational points.

    Generic tangent hyperplanes only split off three rational sweep
    points a sixth of the time over a prime field, so the contact plane
    is built directly: three sweep points whose directions are pairwise
    orthogonal for the chart matrix span a Lagrangian plane, and every
    such plane splits by construction.
    """
    ctx = curve.ctx
    field = ctx.field
    rng = spawn("curve-mark", field.short_name, str(seed))
    b = curve.b
    for _ in range(60):
        u1 = tuple(field.random_scalar(rng) for _ in range(3))
        if all(c.is_zero() for c in u1):
            continue
        perp1 = Matrix(field, [b.apply_left(u1)]).kernel()  # u B u2 = 0
        w = [field.random_scalar(rng) for _ in range(perp1.nrows)]
        u2 = perp1.apply_left(w)
        if Matrix(field, [u1, u2]).rank() != 2:
            continue
        perp12 = Matrix(field, [b.apply_left(u1), b.apply_left(u2)]).kernel()
        if perp12.nrows != 1:
            continue
        u3 = perp12.rows[0]
        if Matrix(field, [u1, u2, u3]).rank() != 3:
            continue
        ts = []
        while len(ts) < 3:
            t = field.random_scalar(rng)
            if t not in ts:
                ts.append(t)
        rows = []
        for u, t in zip((u1, u2, u3), ts):
            ub = b.apply_left(u)
            rows.append(
                curve.frame.from_frame_coords(tuple(u) + tuple(t * c for c in ub))
            )
        plane = Matrix(field, rows)
        if plane.rank() != 3:
            continue
        point = SigmaPoint(ctx, plane)
        stacked = vstack(tangent_space(point).basis, curve.span3.basis)
        allowed = stacked.kernel()
        if allowed.nrows == 0:
            continue
        coeffs = [field.random_scalar(rng) for _ in range(allowed.nrows)]
        h = allowed.apply_left(coeffs)
        if all(c.is_zero() for c in h):
            continue
        return TangentHyperplaneSample(ProjPoint(field, h), point)
    raise NoHyperplaneError(f"no split mark found for seed {seed!r}")


@dataclass(frozen=True)
class MarkedFano:
    """A Fano threefold section with a base curve and three marked
    tangent hyperplanes through it."""

    ctx: SymplecticContext
    tower: SectionTower
    c0: TwistedCubic
    marks: Tuple[TangentHyperplaneSample, ...]
    pX_basis: Matrix  # rows: covector coordinates on the dual plane
    chain_cache: Dict[str, TwistedCubic] = dataclass_field(
        default_factory=dict, repr=False, compare=False
    )

    def mark_plane_point(self, k: int) -> ProjPoint:
        """The mark as a point of the dual plane."""
        coords = coordinates_in_row_space(
            self.pX_basis, list(self.marks[k].h.coords)
        )
        if coords is None:
            raise ValueError("mark does not vanish on the outer space")
        return ProjPoint(self.ctx.field, coords)

    def mark_for_letter(self, letter: str) -> TangentHyperplaneSample:
        try:
            return self.marks["xyz".index(letter)]
        except ValueError:
            raise ValueError(f"letters range over x, y, z; got {letter!r}")


def single_residual_setup(
    ctx: SymplecticContext, seed
) -> Tuple[TwistedCubic, TangentHyperplaneSample, SectionTower]:
    """A curve, one split mark through it, and a tower inside the mark.

    The lightest configuration on which the residual transform runs: the
    outer P^10 passes through the curve span and sits inside the marked
    hyperplane, so the mark is a point of the section's dual plane curve.
    """
    field = ctx.field
    last: Optional[Exception] = None
    for attempt in range(30):
        try:
            pts = [
                sample_sigma(ctx, ("single", str(seed), attempt, i))
                for i in range(3)
            ]
            c0 = cubic_through_triple(*pts)
            mark = sample_curve_mark(c0, ("single-mark", str(seed), attempt))
            rng = spawn("single-frame", field.short_name, str(seed), attempt)
            ann = c0.span3.basis.kernel()
            pX = _extend_covectors(field, ann, [tuple(mark.h.coords)], rng)
            p10 = ProjSubspace(field, pX.kernel())
            tower = _tower_in(ctx, p10, pts, rng, c0.span3)
            return c0, mark, tower
        except ResampleError as exc:
            last = exc
    raise ResampleError(f"no single-mark setup for seed {seed!r}") from last


def _extend_covectors(
    field: Field, ann: Matrix, rows: List[Tuple], rng
) -> Matrix:
    """Three independent covectors from a given annihilator row space."""
    rows = list(rows)
    guard = 0
    while len(rows) < 3:
        cand = ann.apply_left(
            [field.random_scalar(rng) for _ in range(ann.nrows)]
        )
        if Matrix(field, rows + [tuple(cand)]).rank() == len(rows) + 1:
            rows.append(tuple(cand))
        else:
            guard += 1
            if guard > 50:
                raise NotTransverseError("covector extension stalled")
    return Matrix(field, rows)


def _tower_in(
    ctx: SymplecticContext,
    p10: ProjSubspace,
    pts: Sequence[SigmaPoint],
    rng,
    curve_span: ProjSubspace,
) -> SectionTower:
    """A fibration tower with a random inner section through the points."""
    field = ctx.field
    filled = list(
        Matrix(field, [list(p.w_point.coords) for p in pts]).row_space().rows
    )
    guard = 0
    while len(filled) < 10:
        weights = [field.random_scalar(rng) for _ in range(11)]
        cand = p10.basis.apply_left(weights)
        stacked = Matrix(field, filled + [list(cand)])
        if stacked.rank() == len(filled) + 1:
            filled.append(tuple(cand))
        else:
            guard += 1
            if guard > 100:
                raise NotTransverseError("could not extend the inner section")
    p9 = ProjSubspace(field, Matrix(field, filled))
    if p9.contains(curve_span):
        raise NotTransverseError("inner section swallowed the whole curve")
    return SectionTower(ctx, p9, p9.basis.kernel(), p10)


_QUARTIC_EXPS: Tuple[Tuple[int, int, int], ...] = tuple(
    (a, b, 4 - a - b) for a in range(5) for b in range(5 - a)
)
_Z4_INDEX = _QUARTIC_EXPS.index((0, 0, 4))


def _ternary_quartic_value(field, coeffs, u) -> FieldScalar:
    acc = field.zero
    for (a, b, c), coeff in zip(_QUARTIC_EXPS, coeffs):
        if not coeff.is_zero():
            acc = acc + coeff * u[0] ** a * u[1] ** b * u[2] ** c
    return acc


class _LetterPool:
    """Rational points of the dual plane curve, with split bookkeeping.

    Letters are tangent hyperplanes through the outer P^10 whose contact
    plane splits on the base curve; the pool grows lazily along a line
    scan of the dual plane and caches residual curves per letter and per
    viable letter pair.
    """

    def __init__(
        self,
        ctx: SymplecticContext,
        c0: TwistedCubic,
        pX: Matrix,
        tower: SectionTower,
        line_budget: int = 400,
    ):
        self.ctx = ctx
        self.field = ctx.field
        self.c0 = c0
        self.pX = pX
        self.tower = tower
        self.gram_inv = ctx.pairing_gram_inverse()
        self.letters: List[TangentHyperplaneSample] = []
        self.us: List[Tuple[FieldScalar, ...]] = []
        self._curves: Dict[int, Optional[TwistedCubic]] = {}
        self._pairs: Dict[Tuple[int, int], Optional[TwistedCubic]] = {}
        self._step_ok: Dict[Tuple[int, int], bool] = {}
        self._quartic = self._interpolate_plane_quartic()
        self._points = self._scan_points(line_budget)

    def _lambda_at(self, u: Sequence[FieldScalar]) -> FieldScalar:
        h = self.pX.apply_left(list(u))
        return lambda_invariant(self.ctx, self.gram_inv.apply_left(list(h)))

    def _interpolate_plane_quartic(self) -> Tuple[FieldScalar, ...]:
        """Coefficients of the invariant pulled back to the dual plane.

        The invariant is a quartic form on the ambient space, so its
        pullback along the linear embedding of the dual plane has 15
        coefficients; interpolating them once makes every scan line a
        pure polynomial restriction instead of five fresh evaluations.
        """
        field = self.field
        chosen: List[Tuple[FieldScalar, ...]] = []
        raw_rows: List[List[FieldScalar]] = []
        echelon: List[List[FieldScalar]] = []
        pivots: List[int] = []
        for y in range(5):
            if len(chosen) == 15:
                break
            for z in range(5):
                node = (field.one, field(y), field(z))
                row = [
                    node[0] ** a * node[1] ** b * node[2] ** c
                    for a, b, c in _QUARTIC_EXPS
                ]
                red = list(row)
                for p_idx, erow in zip(pivots, echelon):
                    c = red[p_idx]
                    if not c.is_zero():
                        red = [x - c * e for x, e in zip(red, erow)]
                piv = next(
                    (j for j, x in enumerate(red) if not x.is_zero()), None
                )
                if piv is None:
                    continue
                inv = red[piv].inverse()
                echelon.append([inv * x for x in red])
                pivots.append(piv)
                chosen.append(node)
                raw_rows.append(row)
                if len(chosen) == 15:
                    break
        if len(chosen) < 15:
            raise ArithmeticError("quartic interpolation grid lost rank")
        vals = [self._lambda_at(node) for node in chosen]
        coeffs = solve_right(Matrix(field, raw_rows), list(vals))
        if coeffs is None:
            raise ArithmeticError("quartic interpolation system is singular")
        zero, one = field.zero, field.one
        for probe in ((zero, zero, one), (zero, one, zero), (zero, one, one)):
            if _ternary_quartic_value(field, coeffs, probe) != self._lambda_at(probe):
                raise ArithmeticError("interpolated plane quartic failed a probe")
        return tuple(coeffs)

    def _line_poly(self, b0: FieldScalar, b1: FieldScalar) -> UniPoly:
        """Restriction of the plane quartic to the line t -> (b0, b1, t)."""
        field = self.field
        acc = [field.zero] * 5
        for (a, b, c), coeff in zip(_QUARTIC_EXPS, self._quartic):
            if not coeff.is_zero():
                acc[c] = acc[c] + coeff * b0 ** a * b1 ** b
        return UniPoly(field, acc)

    def _scan_points(self, line_budget: int):
        """Dual-plane points where the tangency invariant vanishes."""
        field = self.field
        zero, one = field.zero, field.one
        if self._quartic[_Z4_INDEX].is_zero():
            yield (zero, zero, one)
        charts = itertools.chain(
            [(zero, one)], ((one, field(k)) for k in range(line_budget))
        )
        for base in charts:
            f = self._line_poly(base[0], base[1])
            if f.is_zero() or f.degree() < 1:
                continue
            if distinct_root_count(f) == 0:
                continue
            for root, _mult in uniroots(f):
                yield (base[0], base[1], root)

    def _slim_tangency(
        self, u: Sequence[FieldScalar]
    ) -> Optional[TangentHyperplaneSample]:
        """Contact point from the endomorphism kernel, without the full
        tangent-space recheck; winning marks are revalidated at assembly."""
        ctx = self.ctx
        h = self.pX.apply_left(list(u))
        w20 = ctx.from_w(self.gram_inv.apply_left(list(h)))
        k = _endo_matrix(ctx, w20)
        if k.rank() != 3:
            return None
        lag = k.row_space().kernel()
        if lag.nrows != 3:
            return None
        try:
            point = sigma_point_from_lagrangian(ctx, lag)
        except (ValueError, LG36Error):
            return None
        return TangentHyperplaneSample(ProjPoint(self.field, list(h)), point)

    def grow(self) -> bool:
        """Admit the next letter that splits on the base curve."""
        for u in self._points:
            letter = self._slim_tangency(u)
            if letter is None:
                continue
            if not self.splits(self.c0, letter):
                continue
            self.letters.append(letter)
            self.us.append(tuple(u))
            return True
        return False

    @property
    def size(self) -> int:
        return len(self.letters)

    def splits(self, curve: TwistedCubic, letter: TangentHyperplaneSample) -> bool:
        try:
            return plane_split_count(curve, letter.tangency.lagrangian) == 3
        except LG36Error:
            return False

    def curve_of(self, i: int) -> Optional[TwistedCubic]:
        """Residual of the base curve under letter i, or None if it fails."""
        if i not in self._curves:
            try:
                self._curves[i] = residual_cubic(
                    self.c0, self.letters[i], self.tower, check=False
                )
            except ResampleError:
                self._curves[i] = None
        return self._curves[i]

    def step_ok(self, i: int, j: int) -> bool:
        """Whether letter j split-probes cleanly on the residual of i."""
        key = (i, j)
        if key not in self._step_ok:
            ci = self.curve_of(i)
            self._step_ok[key] = ci is not None and self.splits(
                ci, self.letters[j]
            )
        return self._step_ok[key]

    def pair_curve(self, i: int, j: int) -> Optional[TwistedCubic]:
        """Residual of curve_of(i) under letter j when the step splits."""
        key = (i, j)
        if key not in self._pairs:
            out = None
            if self.step_ok(i, j):
                try:
                    out = residual_cubic(
                        self.curve_of(i), self.letters[j], self.tower,
                        check=False,
                    )
                except ResampleError:
                    out = None
            self._pairs[key] = out
        return self._pairs[key]


def _search_letter_triple(
    pool: _LetterPool, pool_cap: int = 60
) -> Tuple[Tuple[int, int, int], Dict[str, TwistedCubic]]:
    """Letter roles (x, y, z) whose full chain battery splits rationally.

    The five chain steps beyond the constructed singles each split for a
    random letter only about a fifth of the time, so completable setups
    are located by search: grow the pool one letter at a time and test
    every new role assignment, memoizing residual curves along the way.
    Boolean split probes come first so residual curves are only built
    for assignments that already passed every cheap gate.
    """
    while pool.size < pool_cap:
        if not pool.grow():
            break
        n = pool.size - 1
        for ix, iy, iz in itertools.permutations(range(pool.size), 3):
            if max(ix, iy, iz) != n:
                continue
            if det3((pool.us[ix], pool.us[iy], pool.us[iz])).is_zero():
                continue
            if not pool.step_ok(ix, iy) or not pool.step_ok(iz, iy):
                continue
            cxy = pool.pair_curve(ix, iy)
            if cxy is None:
                continue
            if not pool.splits(cxy, pool.letters[iz]):
                continue
            czy = pool.pair_curve(iz, iy)
            if czy is None:
                continue
            if not pool.splits(czy, pool.letters[ix]):
                continue
            try:
                cxyz = residual_cubic(
                    cxy, pool.letters[iz], pool.tower, check=False
                )
            except ResampleError:
                continue
            if not pool.splits(cxyz, pool.letters[iy]):
                continue
            cache = {
                "x": pool.curve_of(ix),
                "y": pool.curve_of(iy),
                "z": pool.curve_of(iz),
                "xy": cxy,
                "zy": czy,
                "xyz": cxyz,
            }
            if any(v is None for v in cache.values()):
                continue
            return (ix, iy, iz), cache
    raise NoHyperplaneError("letter pool exhausted without a chain triple")


def marked_fano_setup(ctx: SymplecticContext, seed) -> MarkedFano:
    """A random Fano section with a curve and three chain-ready marks.

    The marks are rational points of the section's dual plane curve,
    selected so that every chain word of the identity battery splits over
    the base field.  Deterministic in the seed; internally resamples
    degenerate draws.
    """
    last: Optional[Exception] = None
    for attempt in range(10):
        try:
            return _marked_fano_once(ctx, seed, attempt)
        except ResampleError as exc:
            last = exc
    raise ResampleError(f"no marked setup found for seed {seed!r}") from last


def _marked_fano_once(ctx: SymplecticContext, seed, attempt: int) -> MarkedFano:
    field = ctx.field
    pts = [
        sample_sigma(ctx, ("fano", str(seed), attempt, i)) for i in range(3)
    ]
    c0 = cubic_through_triple(*pts)
    rng = spawn("fano-frame", field.short_name, str(seed), attempt)
    ann = c0.span3.basis.kernel()
    pX = _extend_covectors(field, ann, [], rng)
    p10 = ProjSubspace(field, pX.kernel())
    if p10.dim != 10 or not p10.contains(c0.span3):
        raise NotTransverseError("covectors do not cut a P^10 through the curve")
    tower = _tower_in(ctx, p10, pts, rng, c0.span3)
    pool = _LetterPool(ctx, c0, pX, tower)
    (ix, iy, iz), cache = _search_letter_triple(pool)
    marks = []
    for i in (ix, iy, iz):
        slim = pool.letters[i]
        try:
            full = recover_tangency(ctx, list(slim.h.coords))
        except NotOnFXError as exc:
            raise NotTransverseError(
                "pool tangency failed the full recheck"
            ) from exc
        if full.tangency != slim.tangency:
            raise NotTransverseError("pool tangency recheck disagrees")
        marks.append(full)
    setup = MarkedFano(ctx, tower, c0, tuple(marks), pX, chain_cache=cache)
    seen = set()
    for k in range(3):
        seen.add(setup.mark_plane_point(k))
    if len(seen) != 3:
        raise NotTransverseError("marks collide in the dual plane")
    return setup


# ---------------------------------------------------------------------------
# chains


def formal_chain_class(word: str) -> Dict[str, int]:
    """Alternating-sign tally of a chain word.

    Applying a letter a sends a divisor class d to (a - cinf) - d; the
    base curve class is the symbol C0.
    """
    cls = {"C0": 1}
    for letter in word:
        if letter not in "xyz":
            raise ValueError(f"letters range over x, y, z; got {letter!r}")
        nxt = {letter: 1, "cinf": -1}
        for k, v in cls.items():
            nxt[k] = nxt.get(k, 0) - v
        cls = {k: v for k, v in nxt.items() if v}
    return cls


@dataclass(frozen=True)
class Chain:
    """A chain of residual transforms with its formal bookkeeping."""

    setup: MarkedFano
    word: str
    curve: TwistedCubic

    @property
    def formal_class(self) -> Dict[str, int]:
        return formal_chain_class(self.word)


def _chain_curve(setup: MarkedFano, word: str) -> TwistedCubic:
    """Chain image of the base curve, memoized per prefix on the setup."""
    if not word:
        return setup.c0
    cache = setup.chain_cache
    if word not in cache:
        prev = _chain_curve(setup, word[:-1])
        cache[word] = residual_cubic(
            prev, setup.mark_for_letter(word[-1]), setup.tower
        )
    return cache[word]


def chain_apply(
    setup: MarkedFano, start: TwistedCubic, word: str
) -> TwistedCubic:
    """Left-to-right composition of residual transforms."""
    if start is setup.c0:
        return _chain_curve(setup, word)
    cur = start
    for letter in word:
        cur = residual_cubic(cur, setup.mark_for_letter(letter), setup.tower)
    return cur


def make_chain(setup: MarkedFano, word: str) -> Chain:
    return Chain(setup, word, chain_apply(setup, setup.c0, word))


# ---------------------------------------------------------------------------
# recovering the chain point of a bisecant pair


_M2 = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
_M2_INDEX = {m: k for k, m in enumerate(_M2)}


def _lin_mul(field: Field, x: Sequence, y: Sequence) -> List[FieldScalar]:
    """Product of two linear ternary forms as a quadric coefficient vector."""
    out = [field.zero] * 6
    for k in range(3):
        for l in range(3):
            key = (k, l) if k <= l else (l, k)
            out[_M2_INDEX[key]] = out[_M2_INDEX[key]] + x[k] * y[l]
    return out


def _quadric_eval(field: Field, q: Sequence, u: Sequence) -> FieldScalar:
    acc = field.zero
    for (k, l), c in zip(_M2, q):
        acc = acc + c * u[k] * u[l]
    return acc


def _conic_as_poly_in(field, q: Sequence, var: int, vals: Sequence) -> UniPoly:
    """The conic at fixed values of the other two variables, univariate in
    the chosen one.  ``vals`` lists the fixed scalars in variable order
    with a placeholder at ``var``."""
    a = field.zero  # coefficient of var^2
    b = field.zero  # linear
    c = field.zero  # constant
    for (k, l), coeff in zip(_M2, q):
        powers = (k == var) + (l == var)
        rest = field.one
        if k != var:
            rest = rest * vals[k]
        if l != var:
            rest = rest * vals[l]
        if powers == 2:
            a = a + coeff
        elif powers == 1:
            b = b + coeff * rest
        else:
            c = c + coeff * rest
    return UniPoly(field, [c, b, a])


def _resultant_quartic(
    field, q1: Sequence, q2: Sequence, elim: int, keep: Tuple[int, int]
):
    """Resultant of two conics in the eliminated variable, as a function
    on the (keep0, keep1) chart; returns a UniPoly in keep1 with keep0=1."""
    i, j = keep

    def part(q):
        # split q into A var^2 + B var + C with A scalar, B, C polys in t
        a = field.zero
        b = [field.zero, field.zero]  # b0 + b1 t
        c = [field.zero, field.zero, field.zero]
        for (k, l), coeff in zip(_M2, q):
            powers = (k == elim) + (l == elim)
            others = [v for v in (k, l) if v != elim]
            tdeg = sum(1 for v in others if v == j)
            if powers == 2:
                a = a + coeff
            elif powers == 1:
                b[tdeg] = b[tdeg] + coeff
            else:
                c[tdeg] = c[tdeg] + coeff
        return UniPoly(field, [a]), UniPoly(field, b), UniPoly(field, c)

    a1, b1, c1 = part(q1)
    a2, b2, c2 = part(q2)
    t1 = a1 * c2 - a2 * c1
    t2 = a1 * b2 - a2 * b1
    t3 = b1 * c2 - b2 * c1
    return t1 * t1 - t2 * t3


def solve_conic_system(field: Field, quadrics: Sequence[Sequence]) -> List[ProjPoint]:
    """All rational common zeros of a system of ternary quadrics with
    finitely many solutions."""
    reduced = Matrix(field, [list(q) for q in quadrics]).row_space()
    if reduced.nrows == 0:
        raise LineCountError("quadric system vanishes identically")
    conics = list(reduced.rows)
    solutions = []

    def check(u) -> bool:
        return all(_quadric_eval(field, q, u).is_zero() for q in conics)

    def add(u):
        p = ProjPoint(field, u)
        if all(p != s for s in solutions):
            solutions.append(p)

    # Coordinate points need a direct test: the chart sweeps miss them.
    for var in range(3):
        u = [field.zero] * 3
        u[var] = field.one
        if check(u):
            add(tuple(u))
    for elim in range(3):
        keep = tuple(v for v in range(3) if v != elim)
        res = None
        for i in range(len(conics)):
            for j in range(i + 1, len(conics)):
                cand = _resultant_quartic(field, conics[i], conics[j], elim, keep)
                if not cand.is_zero():
                    res = cand if res is None else poly_gcd(res, cand)
        if res is None or res.degree() == 0:
            continue
        for root, _mult in uniroots(res):
            # chart: keep0 = 1, keep1 = root; solve for the eliminated one
            vals = [field.zero] * 3
            vals[keep[0]] = field.one
            vals[keep[1]] = root
            g = None
            for q in conics:
                poly = _conic_as_poly_in(field, q, elim, vals)
                if poly.is_zero():
                    continue
                g = poly if g is None else poly_gcd(g, poly)
            if g is None or g.degree() == 0:
                continue
            for r2, _m in uniroots(g):
                vals2 = list(vals)
                vals2[elim] = r2
                if check(vals2):
                    add(tuple(vals2))
    return solutions


def common_horizontal_lines(
    c1: TwistedCubic, c2: TwistedCubic
) -> List[Tuple[FieldScalar, ...]]:
    """Directions whose horizontal line for the first curve lies inside
    the second curve's plane sweep."""
    ctx = c1.ctx
    field = ctx.field
    f2inv = c2.frame.inverse
    a_vec = [f2inv.apply_left(row) for row in c1.frame.matrix.rows[:3]]
    g_rows = []
    for k in range(3):
        acc = [field.zero] * 6
        for j in range(3):
            coeff = c1.b.rows[k][j]
            row = c1.frame.matrix.rows[3 + j]
            for i in range(6):
                acc[i] = acc[i] + coeff * row[i]
        g_rows.append(tuple(acc))
    b_vec = [f2inv.apply_left(row) for row in g_rows]
    b2 = c2.b
    # (B2 v)_i and w_j as linear forms in u, split along the line chart.
    p_s = [
        [sum((b2.rows[i][m] * a_vec[k][m] for m in range(3)), field.zero) for k in range(3)]
        for i in range(3)
    ]
    p_t = [
        [sum((b2.rows[i][m] * b_vec[k][m] for m in range(3)), field.zero) for k in range(3)]
        for i in range(3)
    ]
    w_s = [[a_vec[k][3 + j] for k in range(3)] for j in range(3)]
    w_t = [[b_vec[k][3 + j] for k in range(3)] for j in range(3)]
    quadrics = []
    for i in range(3):
        for j in range(i + 1, 3):
            mm = lambda x, y: _lin_mul(field, x, y)
            s2 = _sub6(field, mm(p_s[i], w_s[j]), mm(p_s[j], w_s[i]))
            t2 = _sub6(field, mm(p_t[i], w_t[j]), mm(p_t[j], w_t[i]))
            st = _sub6(
                field,
                _add6(field, mm(p_s[i], w_t[j]), mm(p_t[i], w_s[j])),
                _add6(field, mm(p_s[j], w_t[i]), mm(p_t[j], w_s[i])),
            )
            quadrics.extend([s2, st, t2])
    sols = solve_conic_system(field, quadrics)
    return [s.coords for s in sols]


def _add6(field, x, y):
    return [a + b for a, b in zip(x, y)]


def _sub6(field, x, y):
    return [a - b for a, b in zip(x, y)]


def find_chain_point(
    setup: MarkedFano,
    c1: TwistedCubic,
    c2: TwistedCubic,
    quartic: Optional[QuarticForm] = None,
) -> ProjPoint:
    """The dual-plane point whose Segre links a bisecant pair in X.

    The two curves span a unique Segre threefold; joining its span with
    the outer P^10 cuts a hyperplane whose covector is returned in the
    coordinates of the dual plane.  When the interpolated quartic is
    supplied, membership on the dual plane curve is verified.
    """
    ctx = setup.ctx
    field = ctx.field
    length, _ = curve_intersection(c1, c2)
    if length != 2:
        raise ValueError(f"curves meet in length {length}, not 2")
    directions = common_horizontal_lines(c1, c2)
    if len(directions) != 3:
        raise LineCountError(
            f"{len(directions)} common horizontal lines, expected 3"
        )
    lines = ConjugateLines(
        ctx, *[horizontal_line(c1, u).basis for u in directions]
    )
    segre = SegreThreefold(lines)
    h_space = join(segre.span7, setup.tower.p10)
    if h_space.dim != 12:
        raise NotHyperplaneError(
            f"Segre span joins the outer space in dim {h_space.dim}"
        )
    cov = h_space.basis.kernel()
    if cov.nrows != 1:
        raise NotHyperplaneError("hyperplane covector is not unique")
    hrow = cov.rows[0]
    if quartic is not None and not quartic.evaluate(hrow).is_zero():
        raise NotOnFXError("recovered hyperplane misses the dual quartic")
    coords = coordinates_in_row_space(setup.pX_basis, list(hrow))
    if coords is None:
        raise NotHyperplaneError("hyperplane does not contain the outer space")
    return ProjPoint(field, coords)


def recover_tangency(
    ctx: SymplecticContext, h: Sequence[FieldScalar]
) -> TangentHyperplaneSample:
    """Tangency point of a tangent hyperplane covector (experimental).

    The wedge-pairing dual of the covector lands on the tangent-line
    locus; its tangent witness names the contact point.  The answer is
    checked exactly against the hyperplane before returning.
    """
    field = ctx.field
    omega = pairing_dual(ctx, list(h))
    try:
        witness = bisecant_decompose(ctx, omega)
    except (InOmegaError, ResampleError) as exc:
        raise NotOnFXError("covector dual has no tangent witness") from exc
    if not witness.tangent:
        raise NotOnFXError("covector dual lies off the tangent locus")
    point = witness.p
    for row in tangent_space(point).basis.rows:
        if not _dot(h, row).is_zero():
            raise NotOnFXError("recovered tangency fails the exact check")
    return TangentHyperplaneSample(ProjPoint(field, h), point)


# ---------------------------------------------------------------------------
# identity suite


def group_identity_suite(
    setups: Sequence[MarkedFano], quartic: Optional[QuarticForm] = None
) -> dict:
    """Chain-law identities over a batch of setups, reported per identity.

    Covers reversal (xyz = zyx), the involution aa = identity for each
    mark, two-letter block commutation and inversion, chain-point
    round-trips, and fiber closure of all chain images.
    """
    report = {
        "setups": len(setups),
        "completed": 0,
        "resampled": 0,
        "reversal": 0,
        "involution": 0,
        "block_commute": 0,
        "block_invert": 0,
        "chain_point": 0,
        "fiber_closure": 0,
    }
    for setup in setups:
        try:
            outcome = _identity_battery(setup, quartic)
        except ResampleError:
            report["resampled"] += 1
            continue
        report["completed"] += 1
        for key, ok in outcome.items():
            if ok:
                report[key] += 1
    return report


def _identity_battery(
    setup: MarkedFano, quartic: Optional[QuarticForm]
) -> Dict[str, bool]:
    c0 = setup.c0
    w = lambda word: _chain_curve(setup, word)
    involution = all(curves_equal(w(a + a), c0) for a in "xyz")
    reversal = curves_equal(w("xyz"), w("zyx"))
    block_commute = curves_equal(w("xyzy"), w("zyxy")) and (
        formal_chain_class("xyzy") == formal_chain_class("zyxy")
    )
    block_invert = curves_equal(w("xyyx"), c0) and (
        formal_chain_class("xyyx") == {"C0": 1}
    )
    chain_point = True
    for k, letter in enumerate("xyz"):
        found = find_chain_point(setup, c0, w(letter), quartic)
        if found != setup.mark_plane_point(k):
            chain_point = False
    values = {
        str(curve_fibration_value(w(word), setup.tower).h)
        for word in ("", "x", "y", "z", "xy", "xyz", "zyx", "xyzy")
    }
    fiber_closure = len(values) == 1
    return {
        "reversal": reversal,
        "involution": involution,
        "block_commute": block_commute,
        "block_invert": block_invert,
        "chain_point": chain_point,
        "fiber_closure": fiber_closure,
    }
