import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sfkahler import kahler
from sfkahler import reduction as red
from conftest import fam

CASES = [
    ("flat_c2", {}, (-3.0, -0.2)),
    ("lebrun_instanton", {"k": 1, "m": 0.5}, (-3.0, -0.2)),
    ("lebrun_instanton", {"k": 3, "m": 1.0}, (-3.0, -0.2)),
    ("s2_h2", {"case": "hyperbolic", "field": "theta2"}, (-2.0, 2.0)),
    ("s2_h2", {"case": "hyperbolic", "field": "combined"}, (-2.0, 2.0)),
]


@pytest.mark.parametrize("name,params,zr", CASES)
@given(t=st.floats(0.0, 1.0))
def test_order_doubling_stable(name, params, zr, t):
    b = fam(name, **params)
    z = zr[0] + t * (zr[1] - zr[0])
    for integrand in (None, lambda P: kahler.laplacian_z(b, P) ** 2, lambda P: kahler.v_norm2(b, P)):
        fine = red.integrate_reduced(b, z, integrand, 32)
        coarse = red.integrate_reduced(b, z, integrand, 16)
        assert abs(fine - coarse) <= 1e-8 * max(1.0, abs(fine))


def test_order_doubling_check_flag(burns):
    assert red.integrate_reduced(burns, -1.0, None, 32, check=True) == pytest.approx(math.pi * 3.0)


@pytest.mark.parametrize("name,params,zr", CASES)
def test_gauss_curvature_two_routes(name, params, zr):
    b = fam(name, **params)
    z = 0.5 * (zr[0] + zr[1]) if zr[1] <= 0 else 0.7
    chart = b.reduction(z)
    S = np.array([[0.7, 1.1], [1.3, 4.0], [2.2, 2.5]])
    intrinsic = red.gauss_curvature_intrinsic(b, chart, S)
    ambient = red.gauss_curvature(b, chart.embed(S))
    np.testing.assert_allclose(intrinsic, ambient, rtol=1e-5, atol=1e-6)


def test_flat_quotient_is_round(flat):
    # Hopf quotient of the sphere |x|^2 = -2z is a round sphere of radius sqrt(-z/2)
    z = -1.7
    P = flat.reduction(z).embed(np.array([[0.4, 0.3], [2.0, 5.0]]))
    np.testing.assert_allclose(red.gauss_curvature(flat, P), 2.0 / (-z), rtol=1e-12)
    assert red.vol2(flat, z) == pytest.approx(-2.0 * math.pi * z, rel=1e-12)


def test_level_set_volume(burns):
    # Vol(M3) = 2 pi int |V| dVol2 with |V| constant on instanton level sets
    z = -1.0
    lhs = red.integrate_level_set(burns, z)
    rhs = 2.0 * math.pi * red.integrate_reduced(burns, z, lambda P: np.sqrt(kahler.v_norm2(burns, P)))
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_chart_off_level_raises(burns):
    chart = burns.reduction(-1.0)
    bad = red.ReductionChart(z=-1.5, embed=chart.embed, domain=chart.domain, jacobian=chart.jacobian)
    with pytest.raises(red.QuadratureError):
        red._integrate(burns, bad, None or (lambda P: np.ones(len(P))), 8)


def test_quadrature_rule_exact_on_sphere():
    rule = red.quadrature_rule(((0.0, math.pi), (0.0, 2 * math.pi)), 8)
    th = rule.nodes[:, 0]
    assert math.fsum((rule.weights * np.sin(th)).tolist()) == pytest.approx(4 * math.pi, rel=1e-14)
    assert math.fsum((rule.weights * np.sin(th) * np.cos(th) ** 2).tolist()) == pytest.approx(4 * math.pi / 3, rel=1e-14)
