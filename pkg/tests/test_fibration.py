"""Linear section towers and the induced value map to P^3."""

import pytest

from lg36.cubics import INFINITY, cubic_through_triple, curves_equal
from lg36.errors import (
    CubicInSectionError,
    NonReducedError,
    NotOnSectionError,
    NotSplitError,
    NotTransverseError,
    TooManyPointsError,
)
from lg36.fibration import (
    SectionTower,
    fibration_value,
    intersect_with_section,
    restricted_section_forms,
    same_fiber,
    section_through,
    span_meet_check,
)
from lg36.fields import prime_field
from lg36.linalg import Matrix, ProjPoint, ProjSubspace, meet
from lg36.rng import spawn
from lg36.strata import sample_sigma
from lg36.symplectic import make_context

FP = prime_field(10007)


@pytest.fixture(scope="module")
def ctx():
    return make_context(FP)


def _triple(ctx, tag):
    for k in range(50):
        pts = [sample_sigma(ctx, f"{tag}-{axis}-{k}") for axis in "xyz"]
        try:
            cubic_through_triple(*pts)
        except NotTransverseError:
            continue
        return pts
    raise RuntimeError("no transverse triple found")


@pytest.fixture(scope="module")
def setup(ctx):
    xi = _triple(ctx, "fib")
    tower = section_through(ctx, xi, 9, "fib-tower")
    return xi, tower


def test_section_contains_points_and_forms_vanish(ctx, setup):
    xi, tower = setup
    assert tower.p9.dim == 9
    assert tower.ell.rank() == 4
    for p in xi:
        assert tower.contains(p)
        assert all(v.is_zero() for v in tower.evaluate(p.w_point.coords))


def test_section_determinism(ctx, setup):
    xi, tower = setup
    again = section_through(ctx, xi, 9, "fib-tower")
    assert again.p9 == tower.p9
    assert again.ell == tower.ell
    other = section_through(ctx, xi, 9, "fib-tower-b")
    assert other.p9 != tower.p9


def test_section_no_points_and_tower_invariant(ctx):
    bare = section_through(ctx, [], 9, "bare")
    assert bare.p9.dim == 9 and bare.p10 is None
    tall = section_through(ctx, [sample_sigma(ctx, "tall-pt")], 10, "tall")
    assert tall.p10 is not None and tall.p10.dim == 10
    assert tall.p10.contains(tall.p9)
    # Forms vanishing on the outer P^10 form a 3-dim subspace of span(ell).
    vals = tall.ell @ tall.p10.basis.transpose()
    assert vals.rank() == 1


def test_too_many_points(ctx):
    pts = [sample_sigma(ctx, f"many-{k}") for k in range(12)]
    rows = Matrix(FP, [list(p.w_point.coords) for p in pts])
    assert rows.rank() == 12  # generic points span too much
    with pytest.raises(TooManyPointsError):
        section_through(ctx, pts, 9, "many")


def test_value_proportional_over_sample_points(ctx, setup):
    xi, tower = setup
    h = fibration_value(xi, tower).h
    curve = cubic_through_triple(*xi)
    for t in range(4, 24):
        vals = tower.evaluate(curve.path_point(FP.one, FP(t)))
        assert any(not v.is_zero() for v in vals)
        assert ProjPoint(FP, vals) == h


def test_value_invariant_under_ordering(ctx, setup):
    import itertools

    xi, tower = setup
    h = fibration_value(xi, tower).h
    for perm in itertools.permutations(xi):
        assert fibration_value(perm, tower).h == h


def test_value_off_section_rejected(ctx, setup):
    _, tower = setup
    stray = _triple(ctx, "stray")
    with pytest.raises(NotOnSectionError):
        fibration_value(stray, tower)


def _section_containing_rows(ctx, rows, tag):
    """A tower whose P^9 holds the given 14-vectors."""
    field = ctx.field
    rng = spawn("engineered-section", tag)
    filled = list(Matrix(field, rows).row_space().rows)
    while len(filled) < 10:
        cand = [field.random_scalar(rng) for _ in range(14)]
        stacked = Matrix(field, filled + [cand])
        if stacked.rank() == len(filled) + 1:
            filled = list(stacked.row_space().rows)
    p9 = ProjSubspace(field, Matrix(field, filled))
    return SectionTower(ctx, p9, p9.basis.kernel())


def test_cubic_inside_section_rejected(ctx, setup):
    xi, _ = setup
    curve = cubic_through_triple(*xi)
    swallowing = _section_containing_rows(ctx, list(curve.path()), "swallow")
    assert swallowing.p9.contains(curve.span3)
    with pytest.raises(CubicInSectionError):
        fibration_value(xi, swallowing)
    with pytest.raises(CubicInSectionError):
        intersect_with_section(curve, swallowing)
    assert not span_meet_check(curve, swallowing)


def test_intersection_round_trip(ctx):
    for k in range(20):
        xi = _triple(ctx, f"rt-{k}")
        tower = section_through(ctx, xi, 9, f"rt-tower-{k}")
        curve = cubic_through_triple(*xi)
        forms = restricted_section_forms(curve, tower)
        assert all(f.d == 3 for f in forms)
        back = intersect_with_section(curve, tower)
        assert set(back) == set(xi)
        rebuilt = cubic_through_triple(*back)
        assert curves_equal(curve, rebuilt)


def test_sigma_injective_on_shared_section(ctx):
    seen = {}
    xi1 = _triple(ctx, "inj-a")
    xi2 = _triple(ctx, "inj-b")
    tower = section_through(ctx, xi1 + xi2, 9, "inj-tower")
    for xi in (xi1, xi2):
        curve = cubic_through_triple(*xi)
        back = frozenset(intersect_with_section(curve, tower))
        assert back not in seen
        seen[back] = curve
    assert not curves_equal(*seen.values())


def test_span_meet_is_triple_plane(ctx):
    for k in range(10):
        xi = _triple(ctx, f"meet-{k}")
        tower = section_through(ctx, xi, 9, f"meet-tower-{k}")
        curve = cubic_through_triple(*xi)
        assert span_meet_check(curve, tower)
        cut = meet(curve.span3, tower.p9)
        assert cut.dim == 2


def test_tangent_section_non_reduced(ctx):
    # P^9 through the tangent line at t=0 and the point at t=5: the cut
    # scheme is a double point plus a simple one.
    xi = _triple(ctx, "tangent-sec")
    curve = cubic_through_triple(*xi)
    v = curve.path()
    five = curve.path_point(FP.one, FP(5))
    tower = _section_containing_rows(ctx, [list(v[0]), list(v[1]), list(five)], "tg")
    with pytest.raises(NonReducedError):
        intersect_with_section(curve, tower)


def test_conjugate_section_not_split(ctx):
    # P^9 through the symmetric combinations of two conjugate parameters
    # (roots of t*t = t + c with non-square discriminant) and t=7.
    xi = _triple(ctx, "conj-sec")
    curve = cubic_through_triple(*xi)
    v = curve.path()
    a = FP.one
    c = next(FP(k) for k in range(2, 300) if (FP.one + FP(4) * FP(k)).sqrt() is None)
    p_pow = [FP(2), a]
    for _ in range(2):
        p_pow.append(a * p_pow[-1] + c * p_pow[-2])
    q_pow = [a] + [-c * p_pow[k] for k in range(3)]
    w1 = [sum((p_pow[k] * v[k][i] for k in range(4)), FP.zero) for i in range(14)]
    w2 = [sum((q_pow[k] * v[k][i] for k in range(4)), FP.zero) for i in range(14)]
    seven = curve.path_point(FP.one, FP(7))
    tower = _section_containing_rows(ctx, [w1, w2, list(seven)], "conj")
    with pytest.raises(NotSplitError):
        intersect_with_section(curve, tower)


def test_same_fiber_basics(ctx, setup):
    xi, tower = setup
    assert same_fiber(xi, xi, tower)
    other = _triple(ctx, "fiber-other")
    tower2 = section_through(ctx, xi + other, 9, "fiber-two")
    assert same_fiber(xi, xi, tower2)
    assert not same_fiber(xi, other, tower2)


def test_distinct_triples_distinct_values(ctx):
    # Shared section through many triples: the value separates them.
    triples = [_triple(ctx, f"sep-{k}") for k in range(3)]
    pts = [p for xi in triples for p in xi]
    tower = section_through(ctx, pts, 9, "sep-tower")
    values = {fibration_value(xi, tower).h for xi in triples}
    assert len(values) == 3
