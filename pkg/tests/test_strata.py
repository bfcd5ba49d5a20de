"""Strata, the quartic invariant, bisecant lines, and the quadric ideal."""

import pytest

from lg36.errors import InOmegaError, NotInOmegaError
from lg36.fields import prime_field
from lg36.linalg import Matrix, ProjPoint, ProjSubspace
from lg36.poly import binary_gcd
from lg36.rng import spawn
from lg36.strata import (
    N_QUAD,
    bisecant_decompose,
    default_quadric_ideal,
    hitchin_endo,
    omega_witness,
    on_sigma,
    quadric_eval,
    restrict_ideal_to_line,
    sample_generic,
    sample_omega,
    sample_sigma,
    sample_tangent,
    sigma_quadric_ideal,
    stratum,
    tangent_direction,
)
from lg36.symplectic import (
    TRIPLE_INDEX,
    adapted_frame,
    exp_point,
    make_context,
    random_lagrangian,
    random_symmetric_invertible,
    random_transverse_lagrangian_pair,
    sigma_point_from_lagrangian,
    tangent_space,
)

FP = prime_field(10007)


@pytest.fixture(scope="module")
def ctx():
    return make_context(FP)


def split_form(ctx):
    field = ctx.field
    om = [field.zero] * 20
    om[TRIPLE_INDEX[(0, 1, 2)]] = field.one
    om[TRIPLE_INDEX[(3, 4, 5)]] = field.one
    return tuple(om)


def bisecant_point(ctx, rng):
    """Random off-surface point on the line joining a transverse pair."""
    field = ctx.field
    l1, l2 = random_transverse_lagrangian_pair(ctx, rng)
    p1 = sigma_point_from_lagrangian(ctx, l1)
    p2 = sigma_point_from_lagrangian(ctx, l2)
    a, b = field.random_nonzero(rng), field.random_nonzero(rng)
    om20 = tuple(a * u + b * v for u, v in zip(p1.plucker20, p2.plucker20))
    return om20, p1, p2


def test_normalization_anchor(ctx):
    k, lam = hitchin_endo(ctx, split_form(ctx))
    field = ctx.field
    assert lam == field.one
    # Eigen-covector spaces annihilate the two coordinate Lagrangians.
    plus = (k - Matrix.identity(field, 6)).transpose().kernel()
    minus = (k + Matrix.identity(field, 6)).transpose().kernel()
    assert plus.nrows == 3 and minus.nrows == 3
    assert plus.kernel().row_space() == Matrix(
        field, [[field(1 if j == i else 0) for j in range(6)] for i in (3, 4, 5)]
    ).row_space()
    assert minus.kernel().row_space() == Matrix(
        field, [[field(1 if j == i else 0) for j in range(6)] for i in (0, 1, 2)]
    ).row_space()


def test_lambda_vanishes_on_decomposables(ctx):
    for i in range(10):
        p = sample_sigma(ctx, f"dec-{i}")
        k, lam = hitchin_endo(ctx, p.plucker20)
        assert lam.is_zero()
        assert k.rank() == 0


def test_lambda_homogeneity(ctx):
    rng = spawn("strata-hom")
    field = ctx.field
    for _ in range(10):
        w = sample_generic(ctx, field.random_scalar(rng).val)
        om20 = ctx.from_w(w.coords)
        c = field.random_nonzero(rng)
        _, l1 = hitchin_endo(ctx, om20)
        _, l2 = hitchin_endo(ctx, tuple(c * v for v in om20))
        assert l2 == c * c * c * c * l1


def test_on_sigma_chart_point(ctx):
    p = sample_sigma(ctx, "onsigma")
    ok, lag = on_sigma(ctx, p.w_point)
    assert ok
    assert lag.row_space() == p.lagrangian.row_space()


def test_on_sigma_rejects_sum_of_transverse(ctx):
    ok, lag = on_sigma(ctx, split_form(ctx))
    assert not ok and lag is None


def test_stratum_labels(ctx):
    assert stratum(ctx, sample_sigma(ctx, 0).w_point).label == "SIGMA"
    res = stratum(ctx, sample_omega(ctx, 0))
    assert res.label == "OMEGA"
    assert res.k_rank == 1 and res.lam.is_zero() and res.x_omega is not None
    w, base = sample_tangent(ctx, 0)
    res = stratum(ctx, w)
    assert res.label == "F_SMOOTH_LOCUS"
    assert res.k_rank == 3 and res.lam.is_zero()
    res = stratum(ctx, sample_generic(ctx, 0))
    assert res.label == "GENERIC"
    assert not res.lam.is_zero()


def test_stratum_of_tangent_space_point(ctx):
    # A random point of the embedded tangent space is on the hypersurface.
    rng = spawn("tangent-space-point")
    field = ctx.field
    p = sample_sigma(ctx, "tsp")
    tp = tangent_space(p, seed=9)
    coeffs = [field.random_scalar(rng) for _ in range(tp.basis.nrows)]
    w = ProjPoint(field, tp.basis.apply_left(tuple(coeffs)))
    res = stratum(ctx, w)
    assert res.lam.is_zero()
    assert res.label in ("SIGMA", "OMEGA", "F_SMOOTH_LOCUS")


def test_bisecant_roundtrip(ctx):
    rng = spawn("bisecant-rt")
    for _ in range(20):
        om20, p1, p2 = bisecant_point(ctx, rng)
        wit = bisecant_decompose(ctx, ctx.to_w(om20))
        assert wit.points() == {p1, p2}
        assert not wit.tangent
        assert wit.line.contains_point(ProjPoint(ctx.field, ctx.to_w(om20)))
        s, t = wit.coefficients
        rec = tuple(
            s * u + t * v
            for u, v in zip(wit.p.w_point.coords, wit.q.w_point.coords)
        )
        assert ProjPoint(ctx.field, rec) == ProjPoint(ctx.field, ctx.to_w(om20))


def test_bisecant_tangent_case(ctx):
    for i in range(5):
        w, base = sample_tangent(ctx, f"bt-{i}")
        wit = bisecant_decompose(ctx, w)
        assert wit.tangent
        assert wit.p == wit.q == base
        assert wit.line.contains_point(w)
        # The line really is tangent: it lies inside the tangent space.
        assert tangent_space(base, seed=1).contains(wit.line)


def test_bisecant_rejects_omega(ctx):
    with pytest.raises(InOmegaError):
        bisecant_decompose(ctx, sample_omega(ctx, 3))


def test_bisecant_rejects_sigma(ctx):
    with pytest.raises(ValueError):
        bisecant_decompose(ctx, sample_sigma(ctx, 3).w_point)


def test_omega_witness_through_e1(ctx):
    rng = spawn("omega-e1")
    field = ctx.field
    e1 = tuple(field(1 if j == 0 else 0) for j in range(6))
    total = None
    for _ in range(3):
        lag = random_lagrangian(ctx, rng, through=e1)
        pt = sigma_point_from_lagrangian(ctx, lag)
        c = field.random_nonzero(rng)
        term = tuple(c * v for v in pt.plucker20)
        total = term if total is None else tuple(
            u + v for u, v in zip(total, term)
        )
    res = stratum(ctx, ctx.to_w(total))
    assert res.label == "OMEGA"
    assert res.x_omega == ProjPoint(field, e1)


def test_omega_witness_data(ctx):
    w = sample_omega(ctx, 11)
    wit = omega_witness(ctx, w, seed=1, samples=8)
    assert wit.p4.dim == 4
    assert wit.quadric_gram.rank() == 5
    assert len(wit.sampled_points) >= 8
    for pt in wit.sampled_points:
        assert pt.plane().contains_point(wit.x_omega)
        assert wit.p4.contains_point(pt.w_point)
    w14 = ProjPoint(ctx.field, w.coords)
    assert wit.p4.contains_point(w14)
    for line in wit.bisecant_lines:
        assert line.contains_point(w14)


def test_omega_witness_rejects_generic(ctx):
    with pytest.raises(NotInOmegaError):
        omega_witness(ctx, sample_generic(ctx, 2))


def test_sampler_determinism(ctx):
    assert sample_sigma(ctx, 7) == sample_sigma(ctx, 7)
    assert sample_omega(ctx, 7) == sample_omega(ctx, 7)
    assert sample_generic(ctx, 7) == sample_generic(ctx, 7)
    w1, b1 = sample_tangent(ctx, 7)
    w2, b2 = sample_tangent(ctx, 7)
    assert w1 == w2 and b1 == b2
    assert sample_sigma(ctx, 8) != sample_sigma(ctx, 7)


def test_quadric_ideal_dimension_and_stability(ctx):
    ideal = default_quadric_ideal(ctx)
    assert ideal.nrows == N_QUAD
    # Independent seed set gives the same space of quadrics.
    pts = [sample_sigma(ctx, f"alt-{k}") for k in range(170)]
    other = sigma_quadric_ideal(ctx, pts)
    assert other.row_space() == ideal.row_space()


def test_quadric_ideal_kills_fresh_samples(ctx):
    ideal = default_quadric_ideal(ctx)
    for k in range(25):
        pt = sample_sigma(ctx, f"kill-{k}")
        for q in ideal.rows:
            assert quadric_eval(ctx.field, q, pt.w_point.coords).is_zero()


def test_quadric_ideal_nonvanishing_generic(ctx):
    ideal = default_quadric_ideal(ctx)
    g = sample_generic(ctx, 17)
    values = [quadric_eval(ctx.field, q, g.coords) for q in ideal.rows]
    assert any(not v.is_zero() for v in values)


def test_quadric_ideal_needs_enough_points(ctx):
    pts = [sample_sigma(ctx, f"few-{k}") for k in range(30)]
    with pytest.raises(ValueError):
        sigma_quadric_ideal(ctx, pts)


def test_bisecant_uniqueness_by_gcd(ctx):
    # The line through two surface points meets the quadric locus in a
    # scheme of length exactly 2.
    rng = spawn("uniq-gcd")
    for _ in range(5):
        om20, p1, p2 = bisecant_point(ctx, rng)
        forms = restrict_ideal_to_line(
            ctx, p1.w_point.coords, p2.w_point.coords
        )
        g = binary_gcd(forms)
        assert g.d == 2
        roots = g.roots()
        pts = set()
        for (s, t), mult in roots:
            assert mult == 1
            pts.add(
                ProjPoint(
                    ctx.field,
                    tuple(
                        s * u + t * v
                        for u, v in zip(p1.w_point.coords, p2.w_point.coords)
                    ),
                )
            )
        assert pts == {p1.w_point, p2.w_point}


def test_tangent_line_gcd_double_root(ctx):
    w, base = sample_tangent(ctx, 21)
    forms = restrict_ideal_to_line(ctx, base.w_point.coords, w.coords)
    g = binary_gcd(forms)
    assert g.d == 2
    ((s, t), mult), = g.roots()
    assert mult == 2
    rec = ProjPoint(
        ctx.field,
        tuple(s * u + t * v for u, v in zip(base.w_point.coords, w.coords)),
    )
    assert rec == base.w_point


def test_lambda_vanishes_on_tangent_lines(ctx):
    rng = spawn("lam-tangent")
    field = ctx.field
    for i in range(10):
        origin, infinity = random_transverse_lagrangian_pair(ctx, rng)
        frame = adapted_frame(ctx, origin, infinity)
        base = exp_point(frame, Matrix.zeros(field, 3, 3))
        bdot = random_symmetric_invertible(field, rng)
        direction = tangent_direction(ctx, frame, bdot)
        a, b = field.random_nonzero(rng), field.random_nonzero(rng)
        om20 = tuple(a * u + b * v for u, v in zip(base.plucker20, direction))
        _, lam = hitchin_endo(ctx, om20)
        assert lam.is_zero()


def test_small_field_smoke():
    ctx11 = make_context(prime_field(11))
    p = sample_sigma(ctx11, 1)
    assert stratum(ctx11, p.w_point).label == "SIGMA"
    rng = spawn("f11-bisecant")
    for attempt in range(30):
        l1, l2 = random_transverse_lagrangian_pair(ctx11, rng)
        p1 = sigma_point_from_lagrangian(ctx11, l1)
        p2 = sigma_point_from_lagrangian(ctx11, l2)
        a = ctx11.field.random_nonzero(rng)
        b = ctx11.field.random_nonzero(rng)
        om20 = tuple(
            a * u + b * v for u, v in zip(p1.plucker20, p2.plucker20)
        )
        wit = bisecant_decompose(ctx11, ctx11.to_w(om20))
        assert wit.points() == {p1, p2}
        break
