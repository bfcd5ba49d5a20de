"""Symplectic core: contraction kernel, chart, tangent spaces, pairing."""

import pytest
from hypothesis import given, settings, strategies as st

from lg36.errors import (
    NotSymmetricError,
    NotTransverseError,
    RankDeficientError,
)
from lg36.fields import QQ, prime_field
from lg36.linalg import Matrix, ProjSubspace, is_zero_vector
from lg36.rng import spawn
from lg36.symplectic import (
    TRIPLE_INDEX,
    TRIPLES,
    W_DIM,
    adapted_frame,
    alpha_perp,
    chart_at,
    exp_infinity,
    exp_point,
    is_lagrangian,
    lagrangians_transverse,
    make_context,
    random_lagrangian,
    random_symmetric,
    random_transverse_lagrangian_pair,
    sigma_point_from_lagrangian,
    support_space,
    tangent_space,
    wedge3,
)

F11 = prime_field(11)
FP = prime_field(10007)


@pytest.fixture(scope="module")
def ctx():
    return make_context(FP)


@pytest.fixture(scope="module")
def ctx11():
    return make_context(F11)


def basis_triple(field, i, j, k):
    """Rows e_i, e_j, e_k."""
    m = Matrix.identity(field, 6)
    return Matrix(field, [m.rows[i], m.rows[j], m.rows[k]])


def test_alpha_matrix_standard(ctx):
    a = ctx.alpha
    for i in range(6):
        for j in range(6):
            expected = 0
            if j == i + 3:
                expected = 1
            if i == j + 3:
                expected = -1
            assert a.rows[i][j] == ctx.field(expected)


def test_contraction_kernel_dimension(ctx, ctx11):
    assert ctx.w_basis.nrows == W_DIM
    assert ctx11.w_basis.nrows == W_DIM
    assert make_context(QQ).w_basis.nrows == W_DIM


def test_contraction_on_basis_triple(ctx):
    # e0 ^ e1 ^ e3 contracts to -e1: only the (0,3) pair contributes.
    field = ctx.field
    omega = [field.zero] * 20
    omega[TRIPLE_INDEX[(0, 1, 3)]] = field.one
    image = ctx.d_alpha(tuple(omega))
    expected = tuple(field(-1 if i == 1 else 0) for i in range(6))
    assert image == expected


def test_wedge_of_coordinate_plane(ctx):
    field = ctx.field
    rows = basis_triple(field, 0, 1, 2)
    w20 = wedge3(rows.rows)
    for idx, t in enumerate(TRIPLES):
        expected = field.one if t == (0, 1, 2) else field.zero
        assert w20[idx] == expected


def test_w_roundtrip_on_coordinate_points(ctx):
    field = ctx.field
    for t in [(0, 1, 2), (3, 4, 5)]:
        omega = [field.zero] * 20
        omega[TRIPLE_INDEX[t]] = field.one
        omega = tuple(omega)
        assert ctx.in_w(omega)
        assert ctx.from_w(ctx.to_w(omega)) == omega


def test_to_w_rejects_nonkernel(ctx):
    field = ctx.field
    # e0 ^ e1 ^ e3 is not in the kernel.
    omega = [field.zero] * 20
    omega[TRIPLE_INDEX[(0, 1, 3)]] = field.one
    with pytest.raises(ValueError):
        ctx.to_w(tuple(omega))


def test_alpha_perp_contains_isotropic_vector(ctx):
    field = ctx.field
    v = tuple(field(x) for x in [1, 2, 3, 4, 5, 6])
    perp = alpha_perp(ctx, [v])
    assert perp.nrows == 5
    stacked = Matrix(field, list(perp.rows) + [v])
    assert stacked.rank() == 5  # v pairs to zero with itself, so it is inside


def test_random_lagrangian_is_lagrangian(ctx):
    rng = spawn("lagrangian-sample")
    for k in range(5):
        lag = random_lagrangian(ctx, rng)
        assert is_lagrangian(ctx, lag)


def test_random_lagrangian_through_vector(ctx):
    rng = spawn("lagrangian-through")
    field = ctx.field
    v = tuple(field(x) for x in [1, 0, 2, 0, 1, 3])
    lag = random_lagrangian(ctx, rng, through=v)
    assert is_lagrangian(ctx, lag)
    assert Matrix(field, list(lag.rows) + [v]).rank() == 3


def test_is_lagrangian_rejects_rank_deficient(ctx):
    field = ctx.field
    row = tuple(field(x) for x in [1, 0, 0, 0, 0, 0])
    with pytest.raises(RankDeficientError):
        is_lagrangian(ctx, Matrix(field, [row, row, row]))


def test_adapted_frame_properties(ctx):
    rng = spawn("frame")
    origin, infinity = random_transverse_lagrangian_pair(ctx, rng)
    frame = adapted_frame(ctx, origin, infinity)
    # Frame constructor checks the alpha-standard Gram; origin rows survive.
    assert frame.origin_rows() == origin
    assert frame.infinity_rows().row_space() == infinity.row_space()
    v = tuple(ctx.field(x) for x in [3, 1, 4, 1, 5, 9])
    assert frame.from_frame_coords(frame.to_frame_coords(v)) == v


def test_adapted_frame_requires_transversality(ctx):
    rng = spawn("frame-fail")
    origin = random_lagrangian(ctx, rng)
    with pytest.raises(NotTransverseError):
        adapted_frame(ctx, origin, origin)


def test_exp_point_lagrangian_and_in_w(ctx):
    rng = spawn("exp")
    origin, infinity = random_transverse_lagrangian_pair(ctx, rng)
    frame = adapted_frame(ctx, origin, infinity)
    b = random_symmetric(ctx.field, rng)
    p = exp_point(frame, b)
    assert is_lagrangian(ctx, p.lagrangian)
    assert ctx.in_w(p.plucker20)


def test_exp_point_at_zero_is_origin(ctx):
    rng = spawn("exp-zero")
    origin, infinity = random_transverse_lagrangian_pair(ctx, rng)
    frame = adapted_frame(ctx, origin, infinity)
    p = exp_point(frame, Matrix.zeros(ctx.field, 3, 3))
    assert p == sigma_point_from_lagrangian(ctx, origin)
    q = exp_infinity(frame)
    assert q == sigma_point_from_lagrangian(ctx, infinity)
    assert p != q


def test_exp_point_injective_sample(ctx):
    rng = spawn("exp-injective")
    origin, infinity = random_transverse_lagrangian_pair(ctx, rng)
    frame = adapted_frame(ctx, origin, infinity)
    b1 = random_symmetric(ctx.field, rng)
    b2 = random_symmetric(ctx.field, rng)
    if b1 != b2:
        assert exp_point(frame, b1) != exp_point(frame, b2)


def test_exp_point_rejects_asymmetric(ctx):
    rng = spawn("exp-asym")
    origin, infinity = random_transverse_lagrangian_pair(ctx, rng)
    frame = adapted_frame(ctx, origin, infinity)
    field = ctx.field
    b = Matrix(field, [[field(0), field(1), field(0)],
                       [field(2), field(0), field(0)],
                       [field(0), field(0), field(0)]])
    with pytest.raises(NotSymmetricError):
        exp_point(frame, b)


def test_support_of_decomposable_is_the_plane(ctx):
    rng = spawn("support")
    lag = random_lagrangian(ctx, rng)
    p = sigma_point_from_lagrangian(ctx, lag)
    supp = support_space(ctx, p.plucker20)
    assert supp.nrows == 3
    assert supp.row_space() == lag.row_space()


def test_support_of_split_sum_is_zero(ctx):
    field = ctx.field
    omega = [field.zero] * 20
    omega[TRIPLE_INDEX[(0, 1, 2)]] = field.one
    omega[TRIPLE_INDEX[(3, 4, 5)]] = field.one
    supp = support_space(ctx, tuple(omega))
    assert supp.nrows == 0


def test_tangent_space_dimension_and_membership(ctx):
    rng = spawn("tangent")
    lag = random_lagrangian(ctx, rng)
    p = sigma_point_from_lagrangian(ctx, lag)
    tp = tangent_space(p, seed=1)
    assert tp.dim == 6
    assert tp.contains_point(p.w_point)


def test_tangent_space_chart_independent(ctx):
    rng = spawn("tangent-consistency")
    lag = random_lagrangian(ctx, rng)
    p = sigma_point_from_lagrangian(ctx, lag)
    assert tangent_space(p, seed=2) == tangent_space(p, seed=77)


def test_tangent_space_intersection_criterion(ctx):
    # A Lagrangian meeting the base plane in a 2-plane lies in the embedded
    # tangent space; a transverse one does not.
    rng = spawn("tangent-criterion")
    field = ctx.field
    lag = random_lagrangian(ctx, rng)
    p = sigma_point_from_lagrangian(ctx, lag)
    tp = tangent_space(p, seed=3)
    shared = Matrix(field, [lag.rows[0], lag.rows[1]])
    extension = alpha_perp(ctx, list(shared.rows))
    hits = 0
    for cand_row in extension.rows:
        candidate = Matrix(field, list(shared.rows) + [cand_row])
        if candidate.rank() == 3 and is_lagrangian(ctx, candidate):
            q = sigma_point_from_lagrangian(ctx, candidate)
            assert tp.contains_point(q.w_point)
            hits += 1
    assert hits >= 1
    for _ in range(3):
        neighbor = random_lagrangian(ctx, rng)
        if lagrangians_transverse(ctx, lag, neighbor):
            far = sigma_point_from_lagrangian(ctx, neighbor)
            assert not tp.contains_point(far.w_point)


def test_pairing_antisymmetric_nondegenerate(ctx):
    gram = ctx.pairing_gram()
    assert gram.is_antisymmetric()
    assert not gram.det().is_zero()


def test_pairing_volume_normalization(ctx):
    field = ctx.field
    a = [field.zero] * 20
    a[TRIPLE_INDEX[(0, 1, 2)]] = field.one
    b = [field.zero] * 20
    b[TRIPLE_INDEX[(3, 4, 5)]] = field.one
    assert ctx.pairing20(tuple(a), tuple(b)) == field.one
    assert ctx.pairing20(tuple(b), tuple(a)) == -field.one


def test_w_pairing_matches_pairing20(ctx):
    rng = spawn("pairing-w")
    lag1 = random_lagrangian(ctx, rng)
    lag2 = random_lagrangian(ctx, rng)
    p1 = sigma_point_from_lagrangian(ctx, lag1)
    p2 = sigma_point_from_lagrangian(ctx, lag2)
    lhs = ctx.w_pairing(p1.w_point.coords, p2.w_point.coords)
    # Pairing on decomposables vanishes iff the planes meet.
    meet_rank = Matrix(ctx.field, list(lag1.rows) + list(lag2.rows)).rank()
    assert lhs.is_zero() == (meet_rank < 6)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_exp_chart_lagrangian_f11(seed):
    ctx = make_context(F11)
    rng = spawn("hyp-exp", seed)
    origin, infinity = random_transverse_lagrangian_pair(ctx, rng)
    frame = adapted_frame(ctx, origin, infinity)
    b = random_symmetric(ctx.field, rng)
    p = exp_point(frame, b)
    assert is_lagrangian(ctx, p.lagrangian)
    assert ctx.in_w(p.plucker20)
    assert support_space(ctx, p.plucker20).row_space() == p.lagrangian.row_space()


def test_rational_context_chart():
    ctx = make_context(QQ)
    rng = spawn("rational-chart")
    origin, infinity = random_transverse_lagrangian_pair(ctx, rng)
    frame = adapted_frame(ctx, origin, infinity)
    b = random_symmetric(QQ, rng)
    p = exp_point(frame, b)
    assert is_lagrangian(ctx, p.lagrangian)
    assert tangent_space(p, seed=5).dim == 6
