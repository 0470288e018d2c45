"""Kahler structure, Killing field and momentum data on a geometry bundle.

Conventions: ``omega(X, Y) = g(JX, Y)``, so ``J = -g^{-1} omega`` as a matrix
``J[a, b] = J^a_b``; ``J`` acts on 1-forms by ``(J eta)(X) = eta(JX)``; the
volume form is ``omega ^ omega / 2``; the momentum satisfies
``dz = -i_V omega``, hence ``grad z = -JV`` and ``dz = J(V_flat)``.

Functions take a point or a batch of points ``(..., 4)`` unless they are
documented as pointwise.
"""

from __future__ import annotations

import numpy as np

from .curvature import christoffel, fd_first
from .forms import (
    FormField,
    FormValue,
    check_metric,
    exterior_derivative,
    exterior_derivative_batch,
    hodge_arrays,
    interior_arrays,
    top_arrays,
    wedge_arrays,
)

FD_STEP = 1e-5


def _P(P) -> np.ndarray:
    return np.asarray(P, float)


def metric(bundle, P) -> np.ndarray:
    return bundle.metric.g(_P(P))


def orientation(bundle, P) -> np.ndarray:
    """Sign of ``omega ^ omega / 2`` against the chart orientation."""
    om = bundle.omega(_P(P))
    pf = om[..., 0, 1] * om[..., 2, 3] - om[..., 0, 2] * om[..., 1, 3] + om[..., 0, 3] * om[..., 1, 2]
    return np.sign(pf)


def complex_structure(bundle, P) -> np.ndarray:
    P = _P(P)
    return -np.einsum("...ab,...bc->...ac", check_metric(metric(bundle, P)), bundle.omega(P))


def j_form(J, eta) -> np.ndarray:
    """``(J eta)_i = eta_a J^a_i``."""
    return np.einsum("...a,...ai->...i", eta, J)


def killing(bundle, P) -> np.ndarray:
    return bundle.killing(_P(P))


def v_flat(bundle, P) -> np.ndarray:
    P = _P(P)
    return np.einsum("...ij,...j->...i", metric(bundle, P), bundle.killing(P))


def v_norm2(bundle, P) -> np.ndarray:
    P = _P(P)
    V = bundle.killing(P)
    return np.einsum("...i,...i->...", v_flat(bundle, P), V)


def dz(bundle, P) -> np.ndarray:
    P = _P(P)
    if bundle.momentum_grad is not None:
        return bundle.momentum_grad(P)
    return fd_first(bundle.momentum, P, FD_STEP)


def grad_z(bundle, P) -> np.ndarray:
    P = _P(P)
    return np.einsum("...ij,...j->...i", check_metric(metric(bundle, P)), dz(bundle, P))


def grad_z_norm2(bundle, P) -> np.ndarray:
    P = _P(P)
    d = dz(bundle, P)
    return np.einsum("...i,...ij,...j->...", d, check_metric(metric(bundle, P)), d)


def d_v_norm2(bundle, P) -> np.ndarray:
    P = _P(P)
    if bundle.v_norm2_grad is not None:
        return bundle.v_norm2_grad(P)
    return fd_first(lambda Q: v_norm2(bundle, Q), P, FD_STEP)


def d_z_vector(bundle, P) -> np.ndarray:
    """The field ``d/dz = grad z / |grad z|^2``."""
    P = _P(P)
    return grad_z(bundle, P) / grad_z_norm2(bundle, P)[..., None]


def d_over_dz(bundle, P, df) -> np.ndarray:
    """``d/dz`` of a function with differential ``df``."""
    return np.einsum("...i,...i->...", d_z_vector(bundle, P), df)


def dv_flat(bundle, P, method: str = "analytic") -> np.ndarray:
    """``d(V_flat)``; ``method="fd"`` differences the 1-form field numerically."""
    P = _P(P)
    if method == "analytic" and bundle.dv_flat is not None:
        return bundle.dv_flat(P)
    return exterior_derivative_batch(lambda Q: v_flat(bundle, Q), P, 1, FD_STEP)


def dvol4(bundle, P) -> np.ndarray:
    om = bundle.omega(_P(P))
    return 0.5 * wedge_arrays(om, om, 2, 2)


def unit_normal(bundle, P) -> np.ndarray:
    P = _P(P)
    return grad_z(bundle, P) / np.sqrt(grad_z_norm2(bundle, P))[..., None]


def dvol3(bundle, P) -> np.ndarray:
    """``i_n dVol4`` with ``n = grad z / |grad z|``."""
    P = _P(P)
    return interior_arrays(unit_normal(bundle, P), dvol4(bundle, P), 4)


def star_dvol2(bundle, P) -> np.ndarray:
    """``|grad z|^{-2} dz ^ V_flat``."""
    P = _P(P)
    return wedge_arrays(dz(bundle, P), v_flat(bundle, P), 1, 1) / grad_z_norm2(bundle, P)[..., None, None]


def dvol2(bundle, P) -> np.ndarray:
    """Area form of the quotient pulled back to M^4, ``omega - *dVol2``."""
    P = _P(P)
    return bundle.omega(P) - star_dvol2(bundle, P)


def dvol2_interior(bundle, P) -> np.ndarray:
    """The same area form built as ``i_{V/|V|} i_n dVol4``."""
    P = _P(P)
    V = bundle.killing(P) / np.sqrt(v_norm2(bundle, P))[..., None]
    return interior_arrays(V, dvol3(bundle, P), 3)


def hodge(bundle, P, a, k: int) -> np.ndarray:
    P = _P(P)
    return hodge_arrays(a, metric(bundle, P), k, orientation(bundle, P))


def laplacian_z(bundle, P, method: str = "analytic") -> np.ndarray:
    """``Delta z`` (trace of the Hessian, positive on convex functions).

    ``analytic`` / ``fd`` evaluate ``*(dV_flat ^ omega)`` with the exact or
    numerically differenced ``dV_flat``; ``hessian`` traces the Hessian;
    ``declared`` uses the family's closed form.
    """
    P = _P(P)
    if method == "hessian":
        ginv = check_metric(metric(bundle, P))
        return np.einsum("...ij,...ij->...", ginv, hessian_z(bundle, P))
    if method == "declared":
        if bundle.laplacian_declared is None:
            raise ValueError(f"{bundle.label} declares no closed form for the Laplacian")
        return bundle.laplacian_declared(P)
    top = top_arrays(wedge_arrays(dv_flat(bundle, P, method), bundle.omega(P), 2, 2))
    return top / top_arrays(dvol4(bundle, P))


def hessian_z(bundle, P) -> np.ndarray:
    """``Hess z_ij = d_i d_j z - Gamma^k_ij d_k z``."""
    P = _P(P)
    if bundle.momentum_hess is not None:
        ddz = bundle.momentum_hess(P)
    else:
        ddz = fd_first(lambda Q: dz(bundle, Q), P, FD_STEP)
        ddz = 0.5 * (ddz + np.swapaxes(ddz, -1, -2))
    gam = christoffel(metric(bundle, P), bundle.metric.dg(P))
    return ddz - np.einsum("...kij,...k->...ij", gam, dz(bundle, P))


def nabla_omega(bundle, P) -> np.ndarray:
    """``(nabla_k omega)_ij`` from the Christoffel symbols."""
    P = _P(P)
    om = bundle.omega(P)
    dom = fd_first(bundle.omega, P, FD_STEP)
    gam = christoffel(metric(bundle, P), bundle.metric.dg(P))
    return dom - np.einsum("...lki,...lj->...kij", gam, om) - np.einsum("...lkj,...il->...kij", gam, om)


def kahler_residuals(bundle, P) -> dict:
    """Pointwise residuals of ``J^2 = -1``, ``g(J., J.) = g``, ``nabla omega = 0``, ``d omega = 0``."""
    P = _P(P)
    g = metric(bundle, P)
    J = complex_structure(bundle, P)
    eye = np.broadcast_to(np.eye(4), J.shape)
    jj = np.einsum("...ab,...bc->...ac", J, J)
    compat = np.einsum("...ai,...ab,...bj->...ij", J, g, J)
    scale = np.sqrt(np.sum(g * g, axis=(-2, -1)))
    nab = nabla_omega(bundle, P)
    om_scale = np.sqrt(np.sum(bundle.omega(P) ** 2, axis=(-2, -1)))
    dom = np.max(np.abs(exterior_derivative_batch(bundle.omega, P, 2, FD_STEP)), axis=(-3, -2, -1))
    return {
        "j_squared": np.max(np.abs(jj + eye), axis=(-2, -1)),
        "compatible": np.max(np.abs(compat - g), axis=(-2, -1)) / scale,
        "parallel": np.max(np.abs(nab), axis=(-3, -2, -1)) / om_scale,
        "closed": dom / om_scale,
    }


def killing_residual(bundle, P) -> dict:
    """Residuals of ``L_V g = 0``, ``L_V omega = 0`` and ``dz + i_V omega = 0``."""
    P = _P(P)
    g = metric(bundle, P)
    V = bundle.killing(P)
    dV = bundle.killing_jacobian(P) if bundle.killing_jacobian is not None else fd_first(bundle.killing, P, FD_STEP)
    dg = bundle.metric.dg(P)
    lvg = np.einsum("...k,...kij->...ij", V, dg) + np.einsum("...kj,...ik->...ij", g, dV) + np.einsum("...ik,...jk->...ij", g, dV)
    om = bundle.omega(P)
    dom = fd_first(bundle.omega, P, FD_STEP)
    lvo = np.einsum("...k,...kij->...ij", V, dom) + np.einsum("...kj,...ik->...ij", om, dV) + np.einsum("...ik,...jk->...ij", om, dV)
    mom = dz(bundle, P) + interior_arrays(V, om, 2)
    gs = np.sqrt(np.sum(g * g, axis=(-2, -1)))
    vs = np.sqrt(np.einsum("...i,...i->...", V, V))
    return {
        "metric": np.max(np.abs(lvg), axis=(-2, -1)) / np.maximum(gs * np.maximum(vs, 1.0), 1e-300),
        "kahler_form": np.max(np.abs(lvo), axis=(-2, -1)) / np.maximum(gs * np.maximum(vs, 1.0), 1e-300),
        "momentum": np.max(np.abs(mom), axis=-1) / np.maximum(np.max(np.abs(dz(bundle, P)), axis=-1), 1e-300),
    }


def lebrun_uw(bundle, P) -> tuple:
    """``u = log|grad z|^2 - log|grad x|^2`` and ``w = |grad z|^{-2}``."""
    if bundle.isothermal_grad is None:
        raise ValueError(f"{bundle.label} has no isothermal coordinates")
    P = _P(P)
    ginv = check_metric(metric(bundle, P))
    dx = bundle.isothermal_grad(P)[..., 0, :]
    gx2 = np.einsum("...i,...ij,...j->...", dx, ginv, dx)
    gz2 = grad_z_norm2(bundle, P)
    return np.log(gz2) - np.log(gx2), 1.0 / gz2


def uw_at(bundle, x, y, z) -> tuple:
    """``(u, w)`` as functions of LeBrun coordinates ``(x, y, z)``."""
    if "u" in bundle.declared:
        pts = bundle.lebrun_point(x, y, z)
        return bundle.declared["u"](pts), bundle.declared["w"](pts)
    return lebrun_uw(bundle, bundle.lebrun_point(x, y, z))


def mixed_frame(bundle, P) -> dict:
    """Frame ``grad x, grad y, grad z, V`` and its defining relations.

    Residuals: pairwise orthogonality, ``|grad x| = |grad y|``, ``dx = J dy``,
    ``|grad z| = |V|``, and ``grad z = -JV``; all relative.
    """
    P = _P(P)
    g = metric(bundle, P)
    ginv = check_metric(g)
    J = complex_structure(bundle, P)
    V = bundle.killing(P)
    gz = grad_z(bundle, P)
    out = {"grad_z": gz, "V": V}
    res = {}
    vv = np.einsum("...i,...ij,...j->...", V, g, V)
    res["grad_z_is_minus_JV"] = np.max(np.abs(gz + np.einsum("...ab,...b->...a", J, V)), axis=-1) / np.sqrt(
        np.max(np.abs(np.einsum("...ii->...i", g)), axis=-1) * vv
    )
    res["norm_z_equals_norm_V"] = np.abs(grad_z_norm2(bundle, P) - vv) / vv
    res["z_orthogonal_V"] = np.abs(np.einsum("...i,...ij,...j->...", gz, g, V)) / vv
    if bundle.isothermal_grad is not None:
        dxy = bundle.isothermal_grad(P)
        dx, dy = dxy[..., 0, :], dxy[..., 1, :]
        gx = np.einsum("...ij,...j->...i", ginv, dx)
        gy = np.einsum("...ij,...j->...i", ginv, dy)
        out.update(grad_x=gx, grad_y=gy)
        nx = np.einsum("...i,...i->...", dx, gx)
        res["norm_x_equals_norm_y"] = np.abs(nx - np.einsum("...i,...i->...", dy, gy)) / nx
        res["dx_equals_J_dy"] = np.max(np.abs(dx - j_form(J, dy)), axis=-1) / np.max(np.abs(dx), axis=-1)
        cross = [
            np.einsum("...i,...ij,...j->...", a, g, b) / np.sqrt(
                np.einsum("...i,...ij,...j->...", a, g, a) * np.einsum("...i,...ij,...j->...", b, g, b)
            )
            for a, b in ((gx, gy), (gx, gz), (gx, V), (gy, gz), (gy, V))
        ]
        res["pairwise_orthogonal"] = np.max(np.abs(np.stack(cross)), axis=0)
    out["residuals"] = res
    return out


def horizontal_pair(bundle, P) -> tuple:
    """Orthonormal ``X, JX`` spanning the complement of ``grad z`` and ``V``."""
    P = _P(P)
    g = metric(bundle, P)
    J = complex_structure(bundle, P)
    n1 = unit_normal(bundle, P)
    V = bundle.killing(P)
    n2 = V / np.sqrt(np.einsum("...i,...ij,...j->...", V, g, V))[..., None]
    best = None
    best_norm = None
    for i in range(4):
        e = np.zeros(P.shape)
        e[..., i] = 1.0
        for n in (n1, n2):
            e = e - np.einsum("...i,...ij,...j->...", e, g, n)[..., None] * n
        nrm = np.sqrt(np.einsum("...i,...ij,...j->...", e, g, e))
        if best is None:
            best, best_norm = e, nrm
        else:
            pick = (nrm > best_norm)[..., None]
            best = np.where(pick, e, best)
            best_norm = np.maximum(nrm, best_norm)
    X = best / best_norm[..., None]
    return X, np.einsum("...ab,...b->...a", J, X)


def lie_derivative(vector_field, form_field: FormField, p, inner_step: float = FD_STEP, outer_step: float = FD_STEP) -> FormValue:
    """Cartan formula ``L_X a = d(i_X a) + i_X da`` at a single point.

    ``vector_field`` maps a point to vector components.  ``outer_step`` is used
    for ``d(i_X a)``; raise it when ``form_field`` itself differences.
    """
    k = form_field.degree
    p = np.asarray(p, float)
    X = vector_field(p)
    parts = []
    if k >= 1:
        contracted = FormField(k - 1, lambda q: interior_arrays(vector_field(q), form_field.func(q), k))
        parts.append(exterior_derivative(contracted, p, outer_step).components)
    if k < 4:
        da = exterior_derivative(form_field, p, inner_step)
        parts.append(interior_arrays(X, da.components, k + 1))
    return FormValue(k, sum(parts))


def lie_derivative_batch(vector_field, form_func, P, k: int, step: float = FD_STEP) -> np.ndarray:
    """Batched Cartan formula for a k-form field given as component arrays.

    Both ``vector_field`` and ``form_func`` take batches of points.  Each term
    needs one level of differencing of the supplied fields.
    """
    P = _P(P)
    X = vector_field(P)
    out = 0.0
    if k >= 1:
        out = out + exterior_derivative_batch(lambda Q: interior_arrays(vector_field(Q), form_func(Q), k), P, k - 1, step)
    if k < 4:
        out = out + interior_arrays(X, exterior_derivative_batch(form_func, P, k, step), k + 1)
    return out
