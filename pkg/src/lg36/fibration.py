"""Linear sections of the Lagrangian locus and the induced map to P^3.

A codimension-4 linear section carries four linear forms ell_0..ell_3
cutting it out.  Restricting those forms to a twisted cubic through three
section points gives four proportional binary cubics, so evaluating them
at any curve point off the section yields a well defined point of P^3.
That point is the fibration value of the triple; its fiber is the family
of curves sweeping the same value.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .cubics import INFINITY, TwistedCubic, cubic_through_triple
from .errors import (
    ChartFailureError,
    CubicInSectionError,
    FieldMismatchError,
    NonReducedError,
    NotOnSectionError,
    NotSplitError,
    TooManyPointsError,
    WrongLengthError,
)
from .linalg import Matrix, ProjPoint, ProjSubspace, meet
from .poly import BinaryForm, binary_gcd
from .rng import spawn
from .symplectic import SigmaPoint, SymplecticContext, W_DIM


@dataclass(frozen=True)
class SectionTower:
    """A P^9 inside P(W) with its cutting forms, optionally inside a P^10.

    The rows of ``ell`` are a fixed basis of the linear forms vanishing on
    ``p9``; their values serve as coordinates on the P^3 of hyperplane
    classes through the section.
    """

    ctx: SymplecticContext
    p9: ProjSubspace
    ell: Matrix
    p10: Optional[ProjSubspace] = None

    def __post_init__(self):
        if self.p9.dim != 9:
            raise ValueError(f"section has dim {self.p9.dim}, expected 9")
        if self.ell.nrows != 4 or self.ell.ncols != W_DIM:
            raise ValueError("cutting forms must be a 4x14 matrix")
        if self.ell.rank() != 4:
            raise ValueError("cutting forms are dependent")
        for row in self.p9.basis.rows:
            for form in self.ell.rows:
                if not _dot(row, form).is_zero():
                    raise ValueError("cutting form does not vanish on the section")
        if self.p10 is not None:
            if self.p10.dim != 10 or not self.p10.contains(self.p9):
                raise ValueError("outer space must be a P^10 through the section")
            # One extra direction kills exactly one value dimension.
            vals = self.ell @ self.p10.basis.transpose()
            if vals.rank() != 1:
                raise ValueError("outer space is not cut by a 3-space of forms")

    def evaluate(self, coords: Sequence) -> Tuple:
        """The four form values at a 14-vector."""
        return tuple(_dot(form, coords) for form in self.ell.rows)

    def contains(self, point: SigmaPoint) -> bool:
        return self.p9.contains_point(point.w_point)


@dataclass(frozen=True)
class FiberPoint:
    """A point of the P^3 of values, in the coordinates of the tower."""

    h: ProjPoint


def _dot(a, b):
    acc = None
    for x, y in zip(a, b):
        acc = x * y if acc is None else acc + x * y
    return acc


def section_through(
    ctx: SymplecticContext,
    points: Sequence[SigmaPoint],
    target_dim: int = 9,
    seed: str = "0",
) -> SectionTower:
    """A random linear section of the given dimension through the points.

    Deterministic in the seed.  With target_dim 10 the extra direction is
    appended after the P^9, so the points land in the inner section.
    """
    if target_dim not in (9, 10):
        raise ValueError("target_dim must be 9 or 10")
    field = ctx.field
    rows = [list(p.w_point.coords) for p in points]
    base = Matrix(field, rows).row_space() if rows else None
    base_rank = 0 if base is None else base.nrows
    if base_rank > target_dim + 1:
        raise TooManyPointsError(
            f"points span projective dim {base_rank - 1} > {target_dim}"
        )
    rng = spawn("section", field.short_name, str(target_dim), seed)
    current = base
    filled = [] if current is None else list(current.rows)
    tries = 0
    while len(filled) < 11:
        cand = [field.random_scalar(rng) for _ in range(W_DIM)]
        stacked = Matrix(field, filled + [cand])
        if stacked.rank() == len(filled) + 1:
            filled.append(tuple(field(c) for c in cand))
        else:
            tries += 1
            if tries > 200:
                raise ChartFailureError("could not extend the section basis")
    p9 = ProjSubspace(field, Matrix(field, filled[:10]))
    for p in points:
        if not p9.contains_point(p.w_point):
            raise ChartFailureError("section lost a prescribed point")
    ell = p9.basis.kernel()
    p10 = None
    if target_dim == 10:
        p10 = ProjSubspace(field, Matrix(field, filled))
    return SectionTower(ctx, p9, ell, p10)


def restricted_section_forms(
    curve: TwistedCubic, tower: SectionTower
) -> List[BinaryForm]:
    """The four cutting forms pulled back along the curve parametrization."""
    if curve.ctx.field is not tower.ctx.field:
        raise FieldMismatchError("curve and section live over different fields")
    path = curve.path()
    field = curve.ctx.field
    out = []
    for form in tower.ell.rows:
        out.append(BinaryForm(field, 3, [_dot(form, v) for v in path]))
    return out


def fibration_value(
    xi: Sequence[SigmaPoint], tower: SectionTower
) -> FiberPoint:
    """The value in P^3 of the curve through a triple on the section.

    Evaluates the cutting forms at the first scan point t = 4, 5, ... that
    leaves the section; by the secant lemma the choice does not matter.
    """
    if len(xi) != 3:
        raise ValueError("a triple of section points is required")
    for p in xi:
        if not tower.contains(p):
            raise NotOnSectionError("triple point is off the section")
    curve = cubic_through_triple(*xi)
    return _value_of_curve(curve, tower)


def curve_fibration_value(curve: TwistedCubic, tower: SectionTower) -> FiberPoint:
    """The value of a curve that meets the section in a length-3 scheme.

    The restricted forms share a cubic factor, so scan points off the
    section all give the same projective value; no root splitting needed.
    """
    field = curve.ctx.field
    if tower.p9.contains(curve.span3):
        raise CubicInSectionError("curve lies inside the section")
    t = 4
    while True:
        vals = tower.evaluate(curve.path_point(field.one, field(t)))
        if any(not v.is_zero() for v in vals):
            return FiberPoint(ProjPoint(field, vals))
        t += 1


_value_of_curve = curve_fibration_value


def intersect_with_section(
    curve: TwistedCubic, tower: SectionTower
) -> List[SigmaPoint]:
    """The three curve points cut out by the section forms.

    The common zero scheme of the four restricted cubics must have length
    exactly 3, reduced and rational; irrational or degenerate scheme
    configurations raise resample errors.
    """
    forms = restricted_section_forms(curve, tower)
    if all(f.is_zero() for f in forms):
        raise CubicInSectionError("curve lies inside the section")
    g = binary_gcd(forms)
    if g.d != 3:
        raise WrongLengthError(f"section cuts the curve in length {g.d}, not 3")
    roots = g.roots()
    total = sum(m for _, m in roots)
    if total < 3:
        raise NotSplitError("section points of the curve are irrational")
    if any(m > 1 for _, m in roots):
        raise NonReducedError("section is tangent to the curve")
    out = []
    for (s, t), _ in roots:
        if s.is_zero():
            out.append(curve.point_at(INFINITY))
        else:
            out.append(curve.point_at(t / s))
    return out


def span_meet_check(curve: TwistedCubic, tower: SectionTower) -> bool:
    """Whether span3 meets the section exactly in the triple's plane."""
    try:
        triple = intersect_with_section(curve, tower)
    except CubicInSectionError:
        return False
    rows = Matrix(
        curve.ctx.field, [list(p.w_point.coords) for p in triple]
    )
    if rows.rank() != 3:
        return False
    plane = ProjSubspace(curve.ctx.field, rows)
    try:
        cut = meet(curve.span3, tower.p9)
    except ValueError:
        return False
    return cut == plane


def same_fiber(
    xi1: Sequence[SigmaPoint],
    xi2: Sequence[SigmaPoint],
    tower: SectionTower,
) -> bool:
    """Whether two triples on the section share a fibration value."""
    h1 = fibration_value(xi1, tower)
    h2 = fibration_value(xi2, tower)
    return h1.h == h2.h
