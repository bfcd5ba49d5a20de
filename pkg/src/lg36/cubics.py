"""Twisted cubics on the Lagrangian Grassmannian.

A transverse triple of Lagrangian planes determines a unique twisted cubic
on the Grassmannian: in the adapted frame of the first and last plane the
curve is the matrix parametrization

    (s, t)  ->  (s^3 : s^2 t B : s t^2 adj-ish wedge : t^3 det B),

realized here as the wedge class of the graph rows [s I | t B].  The curve
spans a 3-space, is cut out there by a determinantal net of quadrics with
a 2x3 Hilbert-Burch matrix, and sweeps the plane family V_C inside P^5.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import (
    DegeneratePlaneError,
    InOmegaConfigError,
    NetDimError,
    NotThreePointsError,
    NotTransverseError,
    RankDeficientError,
    SameSpanError,
    SyzygyError,
)
from .fields import FieldScalar
from .linalg import Matrix, ProjPoint, ProjSubspace, Vector, dot, is_zero_vector
from .poly import BinaryForm, UniPoly, binary_gcd, distinct_root_count
from .symplectic import (
    SigmaPoint,
    SymplecticContext,
    SymplecticFrame,
    adapted_frame,
    exp_infinity,
    exp_point,
    lagrangians_transverse,
    wedge3,
)


class _Infinity:
    """Sentinel for the parameter at infinity."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()

Parameter = Union[FieldScalar, _Infinity]

# Degree-2 and degree-3 monomials in the four span coordinates.
MONO2_P3: Tuple[Tuple[int, int], ...] = tuple(
    itertools.combinations_with_replacement(range(4), 2)
)
MONO3_P3: Tuple[Tuple[int, int, int], ...] = tuple(
    itertools.combinations_with_replacement(range(4), 3)
)


class TwistedCubic:
    """Twisted cubic through exp(0), exp(B), and the frame's infinity plane."""

    def __init__(self, frame: SymplecticFrame, b: Matrix):
        self.ctx: SymplecticContext = frame.ctx
        self.frame = frame
        if not b.is_symmetric():
            raise NotTransverseError("chart matrix of the middle point is not symmetric")
        if b.det().is_zero():
            raise NotTransverseError("middle point is not transverse to the origin")
        self.b = b
        self._path: Optional[Tuple[Vector, ...]] = None
        self._span3: Optional[ProjSubspace] = None
        self._net: Optional[DeterminantalNet] = None
        self._binv: Optional[Matrix] = None

    @property
    def b_inverse(self) -> Matrix:
        if self._binv is None:
            self._binv = self.b.inverse()
        return self._binv

    def point_at(self, t: Parameter) -> SigmaPoint:
        if t is INFINITY:
            return exp_infinity(self.frame)
        return exp_point(self.frame, self.b.scale(self.ctx.field(t)))

    def sample_points(self, count: int) -> List[SigmaPoint]:
        """The points at t = 0, 1, ..., count-2 and infinity."""
        field = self.ctx.field
        pts = [self.point_at(field(k)) for k in range(count - 1)]
        pts.append(self.point_at(INFINITY))
        return pts

    def path(self) -> Tuple[Vector, ...]:
        """Coefficient vectors v0..v3 with w(s, t) = sum s^(3-k) t^k v_k.

        Recovered from four chart evaluations by a Vandermonde solve; the
        leading coefficient is checked against the infinity point.
        """
        if self._path is not None:
            return self._path
        ctx, field = self.ctx, self.ctx.field
        ts = [field(k) for k in range(4)]
        values = []
        for t in ts:
            # Raw graph rows keep a scaling consistent in t, which the
            # canonical SigmaPoint basis would destroy.
            rows = []
            for i in range(3):
                coords = tuple(
                    field.one if j == i else field.zero for j in range(3)
                ) + tuple(t * v for v in self.b.rows[i])
                rows.append(self.frame.from_frame_coords(coords))
            values.append(ctx.to_w(wedge3(rows)))
        vmat = Matrix.from_function(field, 4, 4, lambda i, j: ts[i] ** j)
        vinv = vmat.inverse()
        coeffs = []
        for k in range(4):
            row = vinv.rows[k]
            coeffs.append(
                tuple(
                    sum((row[i] * values[i][c] for i in range(4)), field.zero)
                    for c in range(14)
                )
            )
        inf_pt = self.point_at(INFINITY)
        if ProjPoint(field, coeffs[3]) != inf_pt.w_point:
            raise ArithmeticError("cubic leading coefficient misses infinity")
        self._path = tuple(coeffs)
        return self._path

    def path_point(self, s, t) -> Vector:
        """w(s, t) as a 14-vector."""
        field = self.ctx.field
        s, t = field(s), field(t)
        v = self.path()
        out = []
        sp = [field.one, s, s * s, s * s * s]
        tp = [field.one, t, t * t, t * t * t]
        for c in range(14):
            acc = field.zero
            for k in range(4):
                acc = acc + sp[3 - k] * tp[k] * v[k][c]
            out.append(acc)
        return tuple(out)

    @property
    def span3(self) -> ProjSubspace:
        if self._span3 is None:
            span = ProjSubspace(
                self.ctx.field, Matrix(self.ctx.field, list(self.path()))
            )
            if span.dim != 3:
                raise RankDeficientError(f"curve spans dim {span.dim}, expected 3")
            self._span3 = span
        return self._span3

    def parameter_of(self, point: SigmaPoint) -> Optional[Parameter]:
        """The parameter with point_at(t) = point, or None if off the curve."""
        r = point.lagrangian @ self.frame.inverse
        r1 = r.submatrix(range(3), range(3))
        r2 = r.submatrix(range(3), range(3, 6))
        if r1.rank() == 0:
            return INFINITY
        if r1.det().is_zero():
            return None
        scaled = (r1.inverse() @ r2) @ self.b_inverse
        t = scaled.rows[0][0]
        field = self.ctx.field
        for i in range(3):
            for j in range(3):
                expected = t if i == j else field.zero
                if scaled.rows[i][j] != expected:
                    return None
        return t

    def contains(self, point: SigmaPoint) -> bool:
        return self.parameter_of(point) is not None

    def net(self) -> "DeterminantalNet":
        if self._net is None:
            self._net = compute_net(self)
        return self._net

    def __repr__(self):
        return f"TwistedCubic(B={self.b!r})"


def cubic_through_triple(
    x: SigmaPoint, y: SigmaPoint, z: SigmaPoint
) -> TwistedCubic:
    """The twisted cubic through a pairwise-transverse triple.

    Parameters 0, 1, infinity land on x, y, z respectively.
    """
    ctx = x.ctx
    for a, b in ((x, y), (x, z), (y, z)):
        if not lagrangians_transverse(ctx, a.lagrangian, b.lagrangian):
            raise NotTransverseError("triple is not pairwise transverse")
    frame = adapted_frame(ctx, x.lagrangian, z.lagrangian)
    r = y.lagrangian @ frame.inverse
    r1 = r.submatrix(range(3), range(3))
    r2 = r.submatrix(range(3), range(3, 6))
    if r1.det().is_zero():
        raise NotTransverseError("middle point is not a graph over the origin")
    b = r1.inverse() @ r2
    if not b.is_symmetric():
        raise ArithmeticError("graph matrix of a Lagrangian failed symmetry")
    curve = TwistedCubic(frame, b)
    return curve


def standard_cubic(ctx: SymplecticContext) -> TwistedCubic:
    """The classical model: identity frame and identity chart matrix.

    Its span coordinates carry the parametrization (s^3 : s^2 t : s t^2 : t^3)
    up to the basis ordering of the span.
    """
    frame = SymplecticFrame(ctx, Matrix.identity(ctx.field, 6))
    return TwistedCubic(frame, Matrix.identity(ctx.field, 3))


class DeterminantalNet:
    """Net of quadrics cutting the curve in its 3-space, with the 2x3
    matrix of linear forms whose rank-1 locus is the curve."""

    def __init__(
        self,
        curve: TwistedCubic,
        quadrics: Matrix,  # 3 x 10 coefficient rows over MONO2_P3
        hb_rows: Tuple[Tuple[Vector, ...], ...],  # 2 x 3 grid of 4-coeff forms
    ):
        self.curve = curve
        self.quadrics = quadrics
        self.hb_rows = hb_rows

    def evaluate_matrix(self, coords4: Sequence[FieldScalar]) -> Matrix:
        """The 2x3 scalar matrix at a point given in span coordinates."""
        field = self.curve.ctx.field
        return Matrix(
            field,
            [[dot(form, coords4) for form in row] for row in self.hb_rows],
        )

    def quadric_values(self, coords4: Sequence[FieldScalar]) -> List[FieldScalar]:
        field = self.curve.ctx.field
        out = []
        for q in self.quadrics.rows:
            acc = field.zero
            for c, (i, j) in zip(q, MONO2_P3):
                if not c.is_zero():
                    acc = acc + c * coords4[i] * coords4[j]
            out.append(acc)
        return out

    def vanishes_at(self, coords4: Sequence[FieldScalar]) -> bool:
        return all(v.is_zero() for v in self.quadric_values(coords4))


def _minor_form(field, row0, row1, j, k) -> Vector:
    """Quadratic form coefficients of the 2x2 minor on columns j, k."""
    acc: Dict[Tuple[int, int], FieldScalar] = {}

    def add(prod_pairs, sign):
        for (a, fa) in prod_pairs[0]:
            for (b, fb) in prod_pairs[1]:
                key = (a, b) if a <= b else (b, a)
                val = fa * fb
                acc[key] = acc.get(key, field.zero) + (val if sign > 0 else -val)

    terms0 = [(i, c) for i, c in enumerate(row0[j]) if not c.is_zero()]
    terms1 = [(i, c) for i, c in enumerate(row1[k]) if not c.is_zero()]
    terms2 = [(i, c) for i, c in enumerate(row0[k]) if not c.is_zero()]
    terms3 = [(i, c) for i, c in enumerate(row1[j]) if not c.is_zero()]
    add((terms0, terms1), +1)
    add((terms2, terms3), -1)
    return tuple(acc.get(m, field.zero) for m in MONO2_P3)


def compute_net(curve: TwistedCubic) -> DeterminantalNet:
    """Interpolate the net on 8 curve points and extract the 2x3 matrix
    from the linear syzygies of the three quadrics."""
    ctx, field = curve.ctx, curve.ctx.field
    span = curve.span3
    pts = curve.sample_points(8)
    rows = []
    for p in pts:
        c = span.point_coordinates(p.w_point)
        if c is None:
            raise ArithmeticError("curve point fell outside its own span")
        rows.append([c[i] * c[j] for (i, j) in MONO2_P3])
    kern = Matrix(field, rows).kernel()
    if kern.nrows != 3:
        raise NetDimError(f"quadric space has dimension {kern.nrows}, expected 3")
    quadrics = kern.row_space()
    # Linear syzygies: triples of linear forms (a1, a2, a3) with
    # sum a_i q_i = 0; 12 unknown coefficients against 20 cubic monomials.
    cubic_index = {m: i for i, m in enumerate(MONO3_P3)}
    syz_cols = []
    for qi in range(3):
        for var in range(4):
            col = [field.zero] * len(MONO3_P3)
            for c, (i, j) in zip(quadrics.rows[qi], MONO2_P3):
                if c.is_zero():
                    continue
                mono = tuple(sorted((var, i, j)))
                col[cubic_index[mono]] = col[cubic_index[mono]] + c
            syz_cols.append(col)
    syz_matrix = Matrix.from_function(
        field, len(MONO3_P3), 12, lambda i, j: syz_cols[j][i]
    )
    syz = syz_matrix.kernel()
    if syz.nrows != 2:
        raise SyzygyError(f"linear syzygy space has dimension {syz.nrows}, expected 2")
    hb_rows = tuple(
        tuple(tuple(row[4 * qi + v] for v in range(4)) for qi in range(3))
        for row in syz.rows
    )
    net = DeterminantalNet(curve, quadrics, hb_rows)
    # The 2x2 minors must regenerate the net.
    minor_rows = [
        _minor_form(field, hb_rows[0], hb_rows[1], j, k)
        for (j, k) in ((0, 1), (0, 2), (1, 2))
    ]
    if Matrix(field, minor_rows).row_space() != quadrics:
        raise SyzygyError("Hilbert-Burch minors do not regenerate the net")
    return net


def secant_forms_from_net(
    field, hb_rows, coords4: Sequence[FieldScalar]
) -> Tuple[Vector, Vector]:
    """The two linear forms cutting the unique secant line through a
    rank-2 point of a 2x3 determinantal net.

    Works on any Hilbert-Burch grid, including reducible rank-1 loci.
    """
    m = Matrix(
        field, [[dot(form, coords4) for form in row] for row in hb_rows]
    )
    if m.rank() < 2:
        raise ValueError("net matrix has rank < 2 at the point")
    a = m.kernel()
    if a.nrows != 1:
        raise ArithmeticError("rank-2 matrix with kernel dimension != 1")
    avec = a.rows[0]
    forms = []
    for row in hb_rows:
        combined = [field.zero] * 4
        for j in range(3):
            if avec[j].is_zero():
                continue
            for v in range(4):
                combined[v] = combined[v] + avec[j] * row[j][v]
        forms.append(tuple(combined))
    if Matrix(field, forms).rank() < 2:
        raise DegeneratePlaneError(
            "secant forms are dependent: point lies in a plane meeting the "
            "rank-1 locus in a degree-2 curve"
        )
    return forms[0], forms[1]


def bisecant_line_in_span(curve: TwistedCubic, p: ProjPoint) -> ProjSubspace:
    """The unique line through a point of the curve's 3-space meeting the
    curve in a length-2 scheme.

    The kernel vector of the 2x3 matrix at p yields two linear forms that
    cut the line.
    """
    field = curve.ctx.field
    span = curve.span3
    coords = span.point_coordinates(p)
    if coords is None:
        raise ValueError("point does not lie in the curve's 3-space")
    net = curve.net()
    if net.evaluate_matrix(coords).rank() < 2:
        raise ValueError("point lies on the curve; the secant is not unique")
    f1, f2 = secant_forms_from_net(field, net.hb_rows, coords)
    inside = Matrix(field, [f1, f2]).kernel()  # 2 x 4 within the span
    line_rows = inside @ span.basis
    line = ProjSubspace(field, line_rows)
    if line.dim != 1 or not line.contains_point(p):
        raise ArithmeticError("secant construction lost the input point")
    return line


class VCthreefold:
    """The surface-of-planes swept by the curve inside P^5: at parameter t
    the Lagrangian plane of the curve point."""

    def __init__(self, curve: TwistedCubic):
        self.curve = curve

    def plane_at(self, t: Parameter) -> Matrix:
        """Basis rows (3x6, standard coordinates) of the plane."""
        frame = self.curve.frame
        field = self.curve.ctx.field
        if t is INFINITY:
            return frame.infinity_rows()
        t = field(t)
        rows = []
        for i in range(3):
            coords = (
                [field.one if j == i else field.zero for j in range(3)]
                + [t * v for v in self.curve.b.rows[i]]
            )
            rows.append(frame.from_frame_coords(tuple(coords)))
        return Matrix(field, rows)

    def point_from_u(self, u: Sequence[FieldScalar], t: Parameter) -> ProjPoint:
        """The P^5 point of the plane at t cut by the horizontal line of u."""
        field = self.curve.ctx.field
        u = tuple(field(val) for val in u)
        ub = self.curve.b.apply_left(u)
        if t is INFINITY:
            coords = (field.zero,) * 3 + ub
        else:
            t = field(t)
            coords = u + tuple(t * v for v in ub)
        return ProjPoint(field, self.curve.frame.from_frame_coords(coords))


def vc(curve: TwistedCubic) -> VCthreefold:
    return VCthreefold(curve)


def _plane_pencil(curve: TwistedCubic, plane: Matrix):
    """Matrix pencil and parameter cubic of a plane against the sweep."""
    field = curve.ctx.field
    if plane.nrows != 3 or plane.ncols != 6:
        raise ValueError("plane must be a 3x6 basis matrix")
    if plane.rank() != 3:
        raise RankDeficientError("plane basis is rank deficient")
    covectors = plane.kernel()  # 3 covectors vanishing on the plane
    g1_cols = []
    g2_cols = []
    for k in range(3):
        gk = curve.frame.matrix.apply(covectors.rows[k])
        gp, gpp = gk[:3], gk[3:]
        g1_cols.append(gp)
        g2_cols.append(tuple(curve.b.apply_left(gpp)))
    g1 = Matrix.from_function(field, 3, 3, lambda i, j: g1_cols[j][i])
    g2 = Matrix.from_function(field, 3, 3, lambda i, j: g2_cols[j][i])

    def det_at(s, t):
        return (g1.scale(field(s)) + g2.scale(field(t))).det()

    c0 = det_at(1, 0)
    c3 = det_at(0, 1)
    s1 = det_at(1, 1)
    s2 = det_at(1, -1)
    two = field(2)
    c2 = (s1 + s2 - c0 - c0) / two
    c1 = s1 - c0 - c2 - c3
    form = BinaryForm(field, 3, (c0, c1, c2, c3))
    return covectors, g1, g2, form


def plane_split_count(curve: TwistedCubic, plane: Matrix) -> int:
    """Distinct rational parameters at which a plane meets the sweep.

    A count of three certifies that plane_meets_vc will succeed with three
    simple points; the probe costs one gcd ladder instead of a root scan.
    """
    _, _, _, form = _plane_pencil(curve, plane)
    if form.is_zero():
        raise InOmegaConfigError("plane meets the threefold in a curve")
    finite = UniPoly(curve.ctx.field, form.coeffs)
    count = 0 if finite.degree() <= 0 else distinct_root_count(finite)
    if form.coeffs[-1].is_zero():
        count += 1  # parameter at infinity
    return count


def plane_meets_vc(
    curve: TwistedCubic, plane: Matrix
) -> List[Tuple[Parameter, Vector, ProjPoint]]:
    """Intersection of a plane in P^5 with the plane-sweep threefold.

    Returns three (parameter, u-vector, point) triples: u is the kernel
    direction in the curve frame, the point is common to the input plane
    and the swept plane at the parameter.
    """
    ctx, field = curve.ctx, curve.ctx.field
    covectors, g1, g2, form = _plane_pencil(curve, plane)
    if form.is_zero():
        raise InOmegaConfigError("plane meets the threefold in a curve")
    roots = form.roots()
    total = sum(mult for _, mult in roots)
    if total < 3:
        raise NotThreePointsError("parameter cubic does not split")
    if any(mult > 1 for _, mult in roots):
        raise NotThreePointsError("parameter cubic has a multiple root")
    out = []
    for (s0, t0), _ in roots:
        m = g1.scale(s0) + g2.scale(t0)
        kern = m.transpose().kernel()  # u with u . M = 0
        if kern.nrows != 1:
            raise InOmegaConfigError("plane is incident to a whole swept plane")
        u = kern.rows[0]
        t_param: Parameter = INFINITY if s0.is_zero() else t0 / s0
        point = vc(curve).point_from_u(u, t_param)
        for cov in covectors.rows:
            if not dot(cov, point.coords).is_zero():
                raise ArithmeticError("intersection point left the input plane")
        out.append((t_param, u, point))
    return out


def horizontal_line(curve: TwistedCubic, u: Sequence[FieldScalar]) -> ProjSubspace:
    """The line meeting every swept plane in one point: spans of (u, 0)
    and (0, Bu) in frame coordinates."""
    field = curve.ctx.field
    u = tuple(field(v) for v in u)
    if is_zero_vector(u):
        raise ValueError("direction vector must be nonzero")
    ub = curve.b.apply_left(u)
    r1 = curve.frame.from_frame_coords(u + (field.zero,) * 3)
    r2 = curve.frame.from_frame_coords((field.zero,) * 3 + ub)
    line = ProjSubspace(field, Matrix(field, [r1, r2]))
    if line.dim != 1:
        raise ArithmeticError("horizontal span degenerated")
    return line


def restriction_forms(c1: TwistedCubic, c2: TwistedCubic) -> List[BinaryForm]:
    """C2's defining forms pulled back along C1's parametrization.

    Ten linear forms cutting C2's 3-space give binary cubics; the three
    net quadrics, extended off the span through the pivot-coordinate
    retraction, give binary sextics.
    """
    field = c1.ctx.field
    path = c1.path()
    forms: List[BinaryForm] = []
    ann = c2.span3.basis.kernel()  # 10 x 14 annihilator rows
    for row in ann.rows:
        coeffs = tuple(dot(row, path[k]) for k in range(4))
        forms.append(BinaryForm(field, 3, coeffs))
    net = c2.net()
    pivots = c2.span3.pivots
    coord_cubics = [
        tuple(path[k][p] for k in range(4)) for p in pivots
    ]  # four binary cubics: the span coordinates along C1

    def cubic_mul(a, b):
        out = [field.zero] * 7
        for i in range(4):
            for j in range(4):
                out[i + j] = out[i + j] + a[i] * b[j]
        return out

    for q in net.quadrics.rows:
        acc = [field.zero] * 7
        for c, (i, j) in zip(q, MONO2_P3):
            if c.is_zero():
                continue
            prod = cubic_mul(coord_cubics[i], coord_cubics[j])
            acc = [x + c * y for x, y in zip(acc, prod)]
        forms.append(BinaryForm(field, 6, tuple(acc)))
    return forms


def curve_intersection(
    c1: TwistedCubic, c2: TwistedCubic
) -> Tuple[int, List[Tuple[Tuple[FieldScalar, FieldScalar], int]]]:
    """Length of the intersection scheme, with the split parameter roots
    on the first curve.

    The length is the degree of the gcd of all of C2's defining forms
    restricted to C1; roots in a quadratic extension still count toward
    the length.
    """
    if c1.span3 == c2.span3:
        if curves_equal(c1, c2):
            raise SameSpanError("curves are equal")
        raise SameSpanError("curves span the same 3-space")
    forms = restriction_forms(c1, c2)
    g = binary_gcd(forms)
    if g.d > 3:
        raise ArithmeticError("intersection longer than a twisted cubic allows")
    return g.d, g.roots()


def curves_equal(c1: TwistedCubic, c2: TwistedCubic) -> bool:
    """Span equality plus seven-point membership."""
    if c1.ctx is not c2.ctx:
        return False
    if c1.span3 != c2.span3:
        return False
    net2 = c2.net()
    for p in c1.sample_points(7):
        coords = c2.span3.point_coordinates(p.w_point)
        if coords is None or not net2.vanishes_at(coords):
            return False
    return True
