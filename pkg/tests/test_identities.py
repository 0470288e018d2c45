import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sfkahler import identities as ids
from sfkahler import reduction as red
from conftest import fam


def test_record_flag_must_match_residual():
    ok = ids.IdentityCheck("x", ids.POINTWISE, "f", "p", 1.0, 1.0, 1e-9, 1e-6, True, "a = a")
    assert ok.passed
    with pytest.raises(ValueError):
        ids.IdentityCheck("x", ids.POINTWISE, "f", "p", 1.0, 1.0, 1e-3, 1e-6, True, "a = a")
    assert ids.IdentityCheck.from_dict(ok.as_dict()) == ok


@given(st.floats(1e-12, 1e3), st.floats(1e-12, 1.0))
def test_make_check_passed_iff_within_tolerance(res, tol):
    rec = ids.make_check("x", ids.INEQUALITY, "fam", "z=0", 0.0, 0.0, res, tol, "f >= 0")
    assert rec.passed == (res <= tol)


def test_relative_residual_floor():
    assert ids.relative_residual(1e-20, 0.0, 0.0) == pytest.approx(1e-8)
    assert ids.relative_residual(1.0, 2.0, -4.0) == pytest.approx(0.25)


def test_estimator_validation():
    with pytest.raises(ValueError):
        ids.ZDerivativeEstimator(1e-3, 1)
    with pytest.raises(ValueError):
        ids.ZDerivativeEstimator(0.0)
    assert ids.ZDerivativeEstimator.for_range(-3.0, -0.2).base_step == pytest.approx(2.8e-3)
    with pytest.raises(ValueError):
        ids.DEFAULT_ESTIMATOR.derivative(math.sin, 0.0, 3)


@given(st.floats(-2.0, 2.0), st.floats(0.5, 2.0), st.sampled_from([1, 2]), st.integers(2, 3))
def test_richardson_observed_order(z, a, order, levels):
    f = lambda t: math.exp(a * t) + math.cosh(t)  # noqa: E731
    est = ids.ZDerivativeEstimator(0.2, levels)
    assert est.observed_order(f, z, order) >= 2.0


def test_richardson_accuracy():
    est = ids.ZDerivativeEstimator(1e-2, 2)
    assert est.first(math.exp, 0.3) == pytest.approx(math.exp(0.3), rel=1e-9)
    assert est.second(math.exp, 0.3) == pytest.approx(math.exp(0.3), rel=1e-7)
    more = ids.ZDerivativeEstimator(1e-2, 3)
    assert abs(more.first(math.exp, 0.3) - math.exp(0.3)) <= abs(est.first(math.exp, 0.3) - math.exp(0.3)) + 1e-15


@pytest.mark.parametrize("quantity,order", [("lap2", 1), ("lap2", 2), ("ric2", 1), ("ric2", 2)])
def test_observed_order_on_quadratures(instanton3, quantity, order):
    # steps large enough that truncation, not quadrature roundoff, dominates
    est = ids.ZDerivativeEstimator(0.2)
    f = lambda t: ids.reduced_integral(instanton3, t, quantity)  # noqa: E731
    assert est.observed_order(f, -1.5, order) >= 2.0


def test_domain_errors(burns, s2h2_combined):
    with pytest.raises(ids.CheckDomainError):
        ids.check_area_growth(burns, 0.0)
    with pytest.raises(ids.CheckDomainError):
        ids.check_area_growth(burns, -1e-4)
    with pytest.raises(ids.CheckDomainError):
        ids.check_dv_closed_form(s2h2_combined, s2h2_combined.sample(3, 0))
    with pytest.raises(ids.CheckDomainError):
        ids.check_ricci_flat_relation(burns, -1.0)
    with pytest.raises(ids.CheckDomainError):
        ids.check_bochner(fam("flat_c2"), np.zeros((1, 4)))


def test_laplacian_lebrun_variant_note(burns):
    rec = ids.check_laplacian_lebrun(burns, burns.sample(20, 0))
    assert rec.passed
    assert "variant" in rec.notes[0]


def test_holder_golden(instanton3):
    # (int Delta)^2 = (-10 pi)^2 and Vol2 int Delta^2 = 7 pi * 100 pi / 7 at k=3, m=1, z=-1
    rec = ids.check_holder(instanton3, -1.0)
    assert rec.lhs == pytest.approx(100 * math.pi**2, rel=1e-12)
    assert rec.rhs == pytest.approx(100 * math.pi**2, rel=1e-12)
    assert rec.passed and "equality expected" in rec.notes[0]


def test_holder_strict_on_combined(s2h2_combined):
    rec = ids.check_holder(s2h2_combined, 0.3)
    assert rec.passed and rec.rhs > rec.lhs * 1.01
    assert "strict" in rec.notes[0]


def test_sign_constraints(burns, s2h2):
    recs = ids.check_sign_constraints(burns, -1.0)
    assert [r.name for r in recs] == ["chi_g_sign", "e_g_sign_minus"]
    assert all(r.passed for r in recs)
    assert len(ids.check_sign_constraints(s2h2, 0.0)) == 3


def test_toda_and_transgression(burns):
    P = burns.sample(10, 3)
    assert ids.check_toda_global(burns, P).passed
    assert ids.check_transgression_steps(burns, P).passed


def test_flat_transgression_form_value(flat):
    # on flat C2 both assemblies equal -16 / r^3 dVol3 with r^2 = -2z
    P = flat.sample(5, 1)
    from sfkahler import kahler

    r3 = (-2.0 * flat.momentum(P)) ** 1.5
    expected = (-16.0 / r3)[:, None, None, None] * kahler.dvol3(flat, P)
    np.testing.assert_allclose(ids.transgression_step1(flat, P), expected, atol=1e-10)
    np.testing.assert_allclose(ids.transgression_step2(flat, P), expected, atol=1e-8)


def test_eguchi_hanson_transgression_closed_not_zero(eguchi_hanson):
    P = eguchi_hanson.sample(10, 2)
    from sfkahler import kahler
    from sfkahler.forms import norm2_arrays

    tp = ids.transgression_step1(eguchi_hanson, P)
    assert np.min(norm2_arrays(tp, kahler.metric(eguchi_hanson, P), 3)) > 1e-3
    assert ids.check_p_ric(eguchi_hanson, P).passed


def test_p_ric_assemblies(burns):
    P = burns.sample(5, 0)
    assert ids.check_p_ric(burns, P).passed
    assert ids.check_p_ric(burns, P, assembly="step3").residual < 1e-3
    with pytest.raises(ValueError):
        ids.check_p_ric(burns, P, assembly="nope")


def test_integration_lemma(instanton3):
    assert ids.check_integration_lemma(instanton3, -1.3).passed


def test_topological_constancy(instanton3):
    recs = ids.check_topological_constancy(instanton3, [-3.0, -1.0, -0.2])
    assert [r.name for r in recs] == ["e_g_constant", "chi_g_constant"]
    assert all(r.passed for r in recs)


def test_applicability(s2h2_combined, burns):
    app = ids.applicable_checks(s2h2_combined)
    assert "dv_closed_form" in app.skipped and "bochner" in app.point
    assert not ids.applicable_checks(burns).skipped


def test_reduced_integral_errors(burns):
    with pytest.raises(ValueError):
        ids.reduced_integral(burns, -1.0, "nope")
    with pytest.raises(ValueError):
        ids.reduced_integral(burns, -1.0, "vol2", "nope")
    assert ids.reduced_integral(burns, -1.0, "vol2") == pytest.approx(red.vol2(burns, -1.0))
