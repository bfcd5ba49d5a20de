"""Dual quartic: tangent hyperplane sampling, interpolation, restriction."""

import numpy as np
import pytest

from lg36.cubics import cubic_through_triple
from lg36.dualquartic import (
    MONOMIALS4,
    QuarticForm,
    crosscheck_hitchin,
    evaluation_rows,
    interpolate_dual_quartic,
    monomial_basis,
    pairing_dual,
    restrict,
    restrict_to_line,
    sample_tangent_hyperplane,
)
from lg36.errors import (
    KernelDimError,
    NoHyperplaneError,
    NotTransverseError,
    ZeroRestrictionError,
)
from lg36.fields import QQ, prime_field
from lg36.linalg import Matrix
from lg36.rng import spawn
from lg36.strata import lambda_invariant, sample_sigma
from lg36.symplectic import make_context, tangent_space

FP = prime_field(10007)


@pytest.fixture(scope="module")
def ctx():
    return make_context(FP)


@pytest.fixture(scope="module")
def quartic(ctx):
    samples = [sample_tangent_hyperplane(ctx, f"dq-test-{k}") for k in range(2600)]
    return interpolate_dual_quartic(ctx, samples)


def test_monomial_order():
    assert len(MONOMIALS4) == 2380
    assert MONOMIALS4[0] == (0, 0, 0, 0)
    assert MONOMIALS4[1] == (0, 0, 0, 1)
    assert MONOMIALS4[-1] == (13, 13, 13, 13)
    assert monomial_basis(2) == (
        (0, 0, 0, 0),
        (0, 0, 0, 1),
        (0, 0, 1, 1),
        (0, 1, 1, 1),
        (1, 1, 1, 1),
    )


def test_sample_kills_tangency(ctx):
    for k in range(5):
        s = sample_tangent_hyperplane(ctx, f"kill-{k}")
        tangent = tangent_space(s.tangency)
        for row in tangent.basis.rows:
            acc = FP.zero
            for a, b in zip(s.h.coords, row):
                acc = acc + a * b
            assert acc.is_zero()


def test_sample_determinism(ctx):
    a = sample_tangent_hyperplane(ctx, "det")
    b = sample_tangent_hyperplane(ctx, "det")
    c = sample_tangent_hyperplane(ctx, "det-other")
    assert a.h == b.h and a.tangency == b.tangency
    assert a.h != c.h


def test_constrained_sample_contains_span(ctx):
    for k in range(40):
        pts = [sample_sigma(ctx, f"cs-{axis}-{k}") for axis in "xyz"]
        try:
            curve = cubic_through_triple(*pts)
        except NotTransverseError:
            continue
        break
    s = sample_tangent_hyperplane(ctx, "constrained", constraints=curve.span3.basis)
    for row in curve.span3.basis.rows:
        acc = FP.zero
        for a, b in zip(s.h.coords, row):
            acc = acc + a * b
        assert acc.is_zero()


def test_no_hyperplane_when_overconstrained(ctx):
    with pytest.raises(NoHyperplaneError):
        sample_tangent_hyperplane(
            ctx, "over", constraints=Matrix.identity(FP, 14)
        )


def test_tangent_samples_kill_lambda_dual(ctx):
    # Independent of interpolation: the endomorphism invariant vanishes
    # on the pairing-duals of tangent hyperplane covectors.
    for k in range(5):
        s = sample_tangent_hyperplane(ctx, f"lam-{k}")
        omega = pairing_dual(ctx, list(s.h.coords))
        assert lambda_invariant(ctx, omega).is_zero()


def test_interpolation_holdout_and_nonzero(ctx, quartic):
    holdout = [sample_tangent_hyperplane(ctx, f"hold-{k}") for k in range(50)]
    rows = evaluation_rows(FP, holdout)
    cvec = np.array([c.val for c in quartic.coeffs], dtype=np.int64)
    vals = (rows * cvec[None, :] % FP.p).sum(axis=1) % FP.p
    assert not np.any(vals)
    for s in holdout[:3]:
        assert quartic.evaluate(list(s.h.coords)).is_zero()
    rng = spawn("dq-nonzero")
    for _ in range(20):
        h = [FP.random_scalar(rng) for _ in range(14)]
        assert not quartic.evaluate(h).is_zero()


def test_degree_four_on_lines(ctx, quartic):
    rng = spawn("dq-lines")
    for _ in range(10):
        u = [FP.random_scalar(rng) for _ in range(14)]
        v = [FP.random_scalar(rng) for _ in range(14)]
        f = restrict_to_line(quartic, u, v)
        assert not f.coeffs[0].is_zero()
        assert not f.coeffs[4].is_zero()


def test_interpolate_validation(ctx):
    few = [sample_tangent_hyperplane(ctx, f"few-{k}") for k in range(10)]
    with pytest.raises(ValueError):
        interpolate_dual_quartic(ctx, few)
    padded = (few * 260)
    with pytest.raises(KernelDimError):
        interpolate_dual_quartic(ctx, padded)
    with pytest.raises(ValueError):
        interpolate_dual_quartic(make_context(QQ), [])


def test_crosscheck_report(ctx, quartic):
    report = crosscheck_hitchin(ctx, quartic, count=30)
    assert report["agrees"]
    assert report["mismatched"] == 0
    assert report["matching"] > 0
    assert report["scalar"] is not None


def test_restrict_handmade_exact():
    # y0^4 + 5 y0 y1 y1 y2 under y0 = s, y1 = t, y2 = t.
    for field in (prime_field(10007), QQ):
        coeffs = [field.zero] * 15
        basis3 = monomial_basis(3)
        coeffs[basis3.index((0, 0, 0, 0))] = field.one
        coeffs[basis3.index((0, 1, 1, 2))] = field(5)
        q = QuarticForm(field, 3, tuple(coeffs))
        r = restrict(q, Matrix(field, [[1, 0, 0], [0, 1, 1]]))
        assert [str(c) for c in r.coeffs] == ["1", "0", "0", "5", "0"]


def test_restrict_functoriality(ctx, quartic):
    rng = spawn("dq-functorial")
    p4 = Matrix(FP, [[FP.random_scalar(rng) for _ in range(14)] for _ in range(4)])
    p2 = Matrix(FP, [[FP.random_scalar(rng) for _ in range(4)] for _ in range(2)])
    step = restrict(restrict(quartic, p4), p2)
    direct = restrict(quartic, p2 @ p4)
    assert step.proportional_to(direct)


def test_zero_restriction():
    field = prime_field(10007)
    coeffs = [field.zero] * 2380
    coeffs[0] = field.one  # x0^4
    q = QuarticForm(field, 14, tuple(coeffs))
    rows = [[field.zero] * 14 for _ in range(2)]
    rows[0][1] = field.one
    rows[1][2] = field.one
    with pytest.raises(ZeroRestrictionError):
        restrict(q, Matrix(field, rows))


def test_section_surface_restriction(ctx, quartic):
    from lg36.fibration import section_through

    tower = section_through(ctx, [], 9, "dq-section")
    surface = restrict(quartic, tower.ell)
    assert surface.nvars == 4
    assert len(surface.coeffs) == 35
