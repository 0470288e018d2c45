import numpy as np
import pytest

from sfkahler import kahler
from sfkahler.families import UnsupportedFamily, build_family
from sfkahler.forms import wedge_arrays
from conftest import fam

FAMILIES = [
    ("flat_c2", {}),
    ("lebrun_instanton", {"k": 1, "m": 0.5}),
    ("lebrun_instanton", {"k": 2, "m": 1.0}),
    ("lebrun_instanton", {"k": 3, "m": 1.0}),
    ("s2_h2", {"case": "hyperbolic", "field": "theta2"}),
    ("s2_h2", {"case": "hyperbolic", "field": "combined"}),
]


@pytest.mark.parametrize("name,params", FAMILIES)
def test_structure_equations(name, params):
    b = fam(name, **params)
    P = b.sample(20, 11)
    for key, res in kahler.kahler_residuals(b, P).items():
        assert np.max(res) < 1e-8, key
    for key, res in kahler.killing_residual(b, P).items():
        assert np.max(res) < 1e-8, key


@pytest.mark.parametrize("name,params", FAMILIES)
def test_laplacian_routes_agree(name, params):
    b = fam(name, **params)
    P = b.sample(20, 5)
    exact = kahler.laplacian_z(b, P)
    np.testing.assert_allclose(kahler.laplacian_z(b, P, "hessian"), exact, rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(kahler.laplacian_z(b, P, "fd"), exact, rtol=1e-7, atol=1e-7)


@pytest.mark.parametrize("name,params", FAMILIES)
def test_volume_form_relations(name, params):
    b = fam(name, **params)
    P = b.sample(10, 2)
    np.testing.assert_allclose(kahler.dvol2(b, P), kahler.dvol2_interior(b, P), atol=1e-10)
    d4 = wedge_arrays(kahler.dz(b, P) / np.sqrt(kahler.grad_z_norm2(b, P))[:, None], kahler.dvol3(b, P), 1, 3)
    np.testing.assert_allclose(d4, kahler.dvol4(b, P), atol=1e-10)


def test_euclidean_values(flat):
    P = flat.sample(10, 0)
    z = flat.momentum(P)
    np.testing.assert_allclose(kahler.laplacian_z(flat, P), -4.0)
    np.testing.assert_allclose(kahler.v_norm2(flat, P), -2.0 * z)


def test_momentum_gradient_relation(burns):
    P = burns.sample(8, 1)
    J = kahler.complex_structure(burns, P)
    JV = np.einsum("...ab,...b->...a", J, burns.killing(P))
    np.testing.assert_allclose(kahler.grad_z(burns, P), -JV, atol=1e-12)


def test_lie_derivative_pointwise_matches_batch(burns):
    from sfkahler.forms import FormField

    P = burns.sample(2, 9)
    X = lambda Q: kahler.d_z_vector(burns, Q)  # noqa: E731
    batch = kahler.lie_derivative_batch(X, lambda Q: kahler.dvol2(burns, Q), P, 2)
    for i, p in enumerate(P):
        single = kahler.lie_derivative(X, FormField(2, lambda q: kahler.dvol2(burns, q)), p)
        np.testing.assert_allclose(single.components, batch[i], atol=1e-8)


def test_family_errors():
    with pytest.raises(UnsupportedFamily):
        build_family("no_such_family")
    with pytest.raises(UnsupportedFamily):
        build_family("lebrun_instanton", k=0)
    with pytest.raises(UnsupportedFamily):
        fam("lebrun_instanton", k=1, m=1.0).reduction(0.5)
