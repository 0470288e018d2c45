import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sfkahler import kahler
from sfkahler.curvature import MetricField, curvature_at, fd_first, fd_second, sectional
from conftest import fam


def _random_metric(A, B):
    """A smooth positive metric field built from constant matrices."""

    def g(P):
        P = np.asarray(P, float)
        S = np.einsum("...k,kij->...ij", np.sin(P), A)
        return np.eye(4) * 2.0 + 0.3 * (S + np.swapaxes(S, -1, -2)) + 0.1 * np.einsum("...k,kij->...ij", P**2, B + np.swapaxes(B, -1, -2))

    return MetricField(g)


mats = arrays(float, (4, 4, 4), elements=st.floats(-0.5, 0.5))
pts = arrays(float, (4,), elements=st.floats(-0.5, 0.5))


@given(mats, mats, pts)
def test_riemann_symmetries_numeric_metric(A, B, p):
    rm = curvature_at(_random_metric(A, B), p).riemann
    scale = max(1.0, np.max(np.abs(rm)))
    tol = 1e-5 * scale
    assert np.max(np.abs(rm + np.swapaxes(rm, 0, 1))) < tol
    assert np.max(np.abs(rm + np.swapaxes(rm, 2, 3))) < tol
    assert np.max(np.abs(rm - np.transpose(rm, (2, 3, 0, 1)))) < tol
    bianchi = rm + np.transpose(rm, (1, 2, 0, 3)) + np.transpose(rm, (2, 0, 1, 3))
    assert np.max(np.abs(bianchi)) < tol


@given(st.integers(0, 10_000))
def test_symmetries_exact_derivatives(seed):
    b = fam("lebrun_instanton", k=3, m=1.0)
    p = b.sample(1, seed)[0]
    data = curvature_at(b.metric, p)
    rm = data.riemann
    tol = 1e-10 * max(1.0, np.max(np.abs(rm)))
    assert np.max(np.abs(rm - np.transpose(rm, (2, 3, 0, 1)))) < tol
    assert np.max(np.abs(rm + np.transpose(rm, (1, 2, 0, 3)) + np.transpose(rm, (2, 0, 1, 3)))) < tol
    np.testing.assert_allclose(data.ricci, data.ricci.T, atol=tol)


def test_fd_derivatives_match_exact(burns):
    P = burns.sample(5, 3)
    np.testing.assert_allclose(fd_first(burns.metric.metric, P), burns.metric.dg(P), atol=1e-8)
    np.testing.assert_allclose(fd_second(burns.metric.metric, P), burns.metric.d2g(P), atol=1e-5)


def test_round_sphere_times_hyperbolic(s2h2):
    P = s2h2.sample(6, 0)
    data = curvature_at(s2h2.metric, P)
    e = np.eye(4)
    sec_s2 = sectional(data, np.broadcast_to(e[0], P.shape), np.broadcast_to(e[1], P.shape))
    sec_h2 = sectional(data, np.broadcast_to(e[2], P.shape), np.broadcast_to(e[3], P.shape))
    np.testing.assert_allclose(sec_s2, 1.0, atol=1e-12)
    np.testing.assert_allclose(sec_h2, -1.0, atol=1e-12)
    np.testing.assert_allclose(data.scalar, 0.0, atol=1e-12)
    np.testing.assert_allclose(data.ric_norm2, 4.0, atol=1e-12)
    np.testing.assert_allclose(data.rm_norm2, 8.0, atol=1e-12)


def test_flat_is_flat(flat):
    data = curvature_at(flat.metric, flat.sample(4, 0))
    assert np.max(np.abs(data.riemann)) == 0.0


def test_instanton_ricci_closed_form(burns, instanton3, eguchi_hanson):
    # |Ric|^2 = 16 m^4 (k-2)^2 e^{4w} in the chart with first coordinate w
    for b, k in ((burns, 1), (eguchi_hanson, 2), (instanton3, 3)):
        P = b.sample(6, 1)
        data = curvature_at(b.metric, P)
        np.testing.assert_allclose(data.ric_norm2, 16.0 * (k - 2) ** 2 * np.exp(4 * P[:, 0]), rtol=1e-9, atol=1e-20)
        np.testing.assert_allclose(data.scalar, 0.0, atol=1e-9)


def test_eguchi_hanson_is_anti_self_dual(eguchi_hanson):
    P = eguchi_hanson.sample(5, 2)
    data = curvature_at(eguchi_hanson.metric, P, kahler.orientation(eguchi_hanson, P))
    assert np.max(data.weyl_plus_norm2) < 1e-10 * np.max(data.weyl_minus_norm2)


def test_kahler_curvature_constraint(instanton3):
    from sfkahler.curvature import kahler_curvature_checks

    P = instanton3.sample(5, 4)
    data = curvature_at(instanton3.metric, P, kahler.orientation(instanton3, P))
    res = kahler_curvature_checks(data, instanton3.omega(P))
    assert np.max(res["rm_pp_norm2"]) < 1e-18 * max(1.0, float(np.max(data.rm_norm2)))


def test_numeric_metric_flag(burns):
    assert burns.metric.analytic
    assert not burns.metric.numeric().analytic
    with pytest.raises(Exception):
        curvature_at(MetricField(lambda P: np.zeros(np.shape(P)[:-1] + (4, 4))), np.zeros(4))
