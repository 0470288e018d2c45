"""Numerical verification of the identities of a Kahler surface with symmetry.

Three kinds of check are produced, all as :class:`IdentityCheck` records:

* pointwise form identities, evaluated on a batch of sample points and
  reported at the worst point;
* integral identities over the quotient surfaces ``M2_z``, where
  ``z``-derivatives of quadratures are estimated with Richardson-extrapolated
  central differences and compared with topological or curvature integrals;
* inequalities along a ``z`` grid.

Residuals are relative: ``|lhs - rhs| / max(|lhs|, |rhs|, scale)`` where the
norms are metric norms of forms or tensors and ``scale`` is a natural size of
the ingredients (floored at ``REL_FLOOR``).  Identities that hold because both
sides vanish identically on flat space are judged absolutely on flat families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kahler
from . import reduction as red
from .curvature import SECOND_STEP, curvature_at, fd_first, kahler_curvature_checks
from .forms import (
    check_metric,
    exterior_derivative_batch,
    hodge_arrays,
    interior_arrays,
    norm2_arrays,
    top_arrays,
    wedge_arrays,
)

POINTWISE = "pointwise-form"
EVOLUTION = "integral-evolution"
INEQUALITY = "inequality"
CLOSED_FORM = "closed-form"

REL_FLOOR = 1e-12
EQUALITY_TOL = 1e-8
CONSTANT_SPREAD = 1e-8
NESTED_STEP = 1e-3
# second derivatives of u, w in LeBrun coordinates; the 4th-order stencil is roundoff-limited below this
PDE_STEP = 1e-3

TOLERANCES = {
    "closed_form": 1e-6,
    "closed_form_fd": 1e-4,
    "evolution": 1e-4,
    "pointwise": 1e-5,
    "p_ric": 1e-4,
    "lebrun_pde": 1e-6,
    "volume_linear": 1e-6,
    "ricci_flat": 1e-6,
    "constancy": 1e-6,
    "inequality": EQUALITY_TOL,
}

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


class CheckDomainError(ValueError):
    """The requested point or level is singular or outside the regular range."""


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    kind: str
    family: str
    where: str
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    passed: bool
    provenance: str
    notes: tuple = ()

    def __post_init__(self):
        if self.passed != bool(self.residual <= self.tolerance):
            raise ValueError(f"{self.name}: passed flag disagrees with residual {self.residual} vs {self.tolerance}")

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "family": self.family,
            "where": self.where,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "provenance": self.provenance,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IdentityCheck":
        d = dict(d)
        d["notes"] = tuple(d.get("notes", ()))
        return cls(**d)


def make_check(name, kind, bundle, where, lhs, rhs, residual, tolerance, provenance, notes=()) -> IdentityCheck:
    residual = float(residual)
    if not math.isfinite(residual):
        residual = math.inf
    return IdentityCheck(
        name=name,
        kind=kind,
        family=bundle.label if hasattr(bundle, "label") else str(bundle),
        where=where,
        lhs=float(lhs),
        rhs=float(rhs),
        residual=residual,
        tolerance=float(tolerance),
        passed=bool(residual <= tolerance),
        provenance=provenance,
        notes=tuple(notes),
    )


def relative_residual(diff, lhs, rhs, scale=0.0):
    """``diff / max(lhs, rhs, scale, REL_FLOOR)``, elementwise."""
    den = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), np.maximum(np.abs(scale), REL_FLOOR))
    return np.abs(diff) / den


# ------------------------------------------------------------------- helpers


def _form_norm(bundle, P, a, k):
    return np.sqrt(np.abs(norm2_arrays(a, kahler.metric(bundle, P), k)))


def _tensor2_norm(T, ginv):
    return np.sqrt(np.abs(np.einsum("...ij,...ia,...jb,...ab->...", T, ginv, ginv, T, optimize=True)))


def _top_ratio(bundle, P, four_form):
    """Coefficient of ``dVol4`` in a 4-form."""
    return top_arrays(four_form) / top_arrays(kahler.dvol4(bundle, P))


def _is_flat(bundle) -> bool:
    return "flat" in bundle.notes


def _is_ricci_flat(bundle) -> bool:
    return "ricci_flat" in bundle.notes


def _curv(bundle, P):
    return curvature_at(bundle.metric, P, kahler.orientation(bundle, P))


def _points(bundle, P):
    P = np.atleast_2d(np.asarray(P, float))
    vv = kahler.v_norm2(bundle, P)
    if np.any(vv < 1e-16):
        raise CheckDomainError(f"{bundle.label}: sample point on the zero set of the Killing field")
    return P


def _where_points(P, worst) -> str:
    p = ", ".join(f"{c:.6g}" for c in P[worst])
    return f"{len(P)} points; worst ({p})"


def _pointwise(name, bundle, P, diff, lhs, rhs, scale, tolerance, provenance, absolute=False, notes=()):
    res = np.abs(diff) if absolute else relative_residual(diff, lhs, rhs, scale)
    worst = int(np.argmax(res))
    extra = ("absolute residual (identically zero on flat space)",) if absolute else ()
    return make_check(
        name, POINTWISE, bundle, _where_points(P, worst), np.ravel(lhs)[worst], np.ravel(rhs)[worst], res[worst], tolerance, provenance, extra + tuple(notes)
    )


def _laplacian(bundle):
    return lambda Q: kahler.laplacian_z(bundle, Q)


def _require_isothermal(bundle):
    if bundle.isothermal_grad is None:
        raise CheckDomainError(f"{bundle.label}: no isothermal coordinates on the quotient")


def _log_grad_x2(bundle):
    def f(Q):
        ginv = check_metric(kahler.metric(bundle, Q))
        dx = bundle.isothermal_grad(Q)[..., 0, :]
        return np.log(np.einsum("...i,...ij,...j->...", dx, ginv, dx))

    return f


def _d_dz(bundle, P, func):
    """``d/dz`` of a scalar field, one level of differencing."""
    return kahler.d_over_dz(bundle, P, exterior_derivative_batch(func, P, 0))


# ------------------------------------------------------------ pointwise lemmas


def check_bochner(bundle, P, tolerance=TOLERANCES["pointwise"]) -> IdentityCheck:
    """``d(Delta z) + 2 Ric(grad z) = 0``."""
    P = _points(bundle, P)
    lhs = exterior_derivative_batch(_laplacian(bundle), P, 0)
    data = _curv(bundle, P)
    rhs = -2.0 * np.einsum("...ij,...j->...i", data.ricci, kahler.grad_z(bundle, P))
    n = lambda a: _form_norm(bundle, P, a, 1)  # noqa: E731
    scale = np.sqrt(np.abs(data.rm_norm2)) * np.sqrt(kahler.grad_z_norm2(bundle, P))
    return _pointwise("bochner", bundle, P, n(lhs - rhs), n(lhs), n(rhs), scale, tolerance, "d(Delta z) = -2 Ric(grad z)", absolute=_is_flat(bundle))


def check_hess_invariance(bundle, P, tolerance=TOLERANCES["pointwise"]) -> IdentityCheck:
    """``Hess z(J., J.) = Hess z``."""
    P = _points(bundle, P)
    H = kahler.hessian_z(bundle, P)
    J = kahler.complex_structure(bundle, P)
    HJJ = np.einsum("...ai,...bj,...ab->...ij", J, J, H, optimize=True)
    ginv = check_metric(kahler.metric(bundle, P))
    return _pointwise(
        "hess_j_invariance", bundle, P, _tensor2_norm(HJJ - H, ginv), _tensor2_norm(HJJ, ginv), _tensor2_norm(H, ginv), 0.0, tolerance, "Hess z(J., J.) = Hess z"
    )


def check_hess_dv(bundle, P, tolerance=TOLERANCES["pointwise"]) -> IdentityCheck:
    """``Hess z(J., .) = nabla V_flat = dV_flat / 2``."""
    P = _points(bundle, P)
    H = kahler.hessian_z(bundle, P)
    J = kahler.complex_structure(bundle, P)
    HJ = np.einsum("...ai,...aj->...ij", J, H)
    half_dv = 0.5 * kahler.dv_flat(bundle, P)
    g = kahler.metric(bundle, P)
    ginv = check_metric(g)
    gam = kahler.christoffel(g, bundle.metric.dg(P))
    jac = bundle.killing_jacobian(P) if bundle.killing_jacobian is not None else fd_first(bundle.killing, P)
    dvf = np.einsum("...ia,...ja->...ij", jac, g) + np.einsum("...a,...iaj->...ij", bundle.killing(P), bundle.metric.dg(P))
    nabla_v = dvf - np.einsum("...kij,...k->...ij", gam, kahler.v_flat(bundle, P))
    n = lambda T: _tensor2_norm(T, ginv)  # noqa: E731
    r1 = relative_residual(n(HJ - half_dv), n(HJ), n(half_dv))
    r2 = relative_residual(n(nabla_v - half_dv), n(nabla_v), n(half_dv))
    res = np.maximum(r1, r2)
    worst = int(np.argmax(res))
    return make_check(
        "hess_j_dv", POINTWISE, bundle, _where_points(P, worst), n(HJ)[worst], n(half_dv)[worst], res[worst], tolerance, "Hess z(J., .) = nabla V_flat = dV_flat / 2"
    )


def dv_flat_closed_form(bundle, P) -> np.ndarray:
    """``dV_flat`` rebuilt from ``|grad z|``, ``|grad x|`` and the frame."""
    _require_isothermal(bundle)
    P = np.asarray(P, float)
    dL = exterior_derivative_batch(lambda Q: np.log(kahler.grad_z_norm2(bundle, Q)), P, 0)
    dzL = kahler.d_over_dz(bundle, P, dL)
    dzX = _d_dz(bundle, P, _log_grad_x2(bundle))
    J = kahler.complex_structure(bundle, P)
    dz = kahler.dz(bundle, P)
    vf = kahler.v_flat(bundle, P)
    gz2 = kahler.grad_z_norm2(bundle, P)
    out = -dzL[..., None, None] * wedge_arrays(dz, vf, 1, 1)
    out = out - wedge_arrays(dz, kahler.j_form(J, dL), 1, 1)
    out = out - wedge_arrays(vf, dL, 1, 1)
    return out - (gz2 * dzX)[..., None, None] * kahler.dvol2(bundle, P)


def check_dv_closed_form(bundle, P, tolerance=TOLERANCES["pointwise"]) -> IdentityCheck:
    P = _points(bundle, P)
    lhs = kahler.dv_flat(bundle, P)
    rhs = dv_flat_closed_form(bundle, P)
    n = lambda a: _form_norm(bundle, P, a, 2)  # noqa: E731
    return _pointwise(
        "dv_closed_form",
        bundle,
        P,
        n(lhs - rhs),
        n(lhs),
        n(rhs),
        0.0,
        tolerance,
        "dV_flat = -(d_z log|grad z|^2) dz^V_flat - dz^J dlog|grad z|^2 - V_flat^dlog|grad z|^2 - |grad z|^2 (d_z log|grad x|^2) dVol2",
    )


def check_v_wedge_dv(bundle, P, tolerance=TOLERANCES["pointwise"]) -> IdentityCheck:
    """``V_flat ^ dV_flat = *(-d|V|^2 + Delta z dz)``."""
    P = _points(bundle, P)
    vf = kahler.v_flat(bundle, P)
    dv = kahler.dv_flat(bundle, P)
    lhs = wedge_arrays(vf, dv, 1, 2)
    one = -kahler.d_v_norm2(bundle, P) + kahler.laplacian_z(bundle, P)[..., None] * kahler.dz(bundle, P)
    rhs = kahler.hodge(bundle, P, one, 1)
    n = lambda a: _form_norm(bundle, P, a, 3)  # noqa: E731
    scale = np.sqrt(kahler.v_norm2(bundle, P)) * _form_norm(bundle, P, dv, 2)
    return _pointwise("v_wedge_dv", bundle, P, n(lhs - rhs), n(lhs), n(rhs), scale, tolerance, "V_flat ^ dV_flat = *(-d|V|^2 + (Delta z) dz)")


def check_volume_forms(bundle, P, tolerance=TOLERANCES["pointwise"]) -> IdentityCheck:
    """``dVol3 = |V| dt ^ dVol2`` and ``dVol4 = dz ^ dt ^ dVol2``, plus two routes to ``dVol2``."""
    if bundle.dt is None:
        raise CheckDomainError(f"{bundle.label}: no angular coordinate along the Killing field")
    P = _points(bundle, P)
    dt = bundle.dt(P)
    d2 = kahler.dvol2(bundle, P)
    v = np.sqrt(kahler.v_norm2(bundle, P))
    d3 = kahler.dvol3(bundle, P)
    r3 = v[..., None, None, None] * wedge_arrays(dt, d2, 1, 2)
    d4 = kahler.dvol4(bundle, P)
    r4 = wedge_arrays(wedge_arrays(kahler.dz(bundle, P), dt, 1, 1), d2, 2, 2)
    res = [
        relative_residual(_form_norm(bundle, P, d3 - r3, 3), 1.0, 0.0),
        relative_residual(_form_norm(bundle, P, d4 - r4, 4), 1.0, 0.0),
        relative_residual(_form_norm(bundle, P, d2 - kahler.dvol2_interior(bundle, P), 2), 1.0, 0.0),
    ]
    if bundle.isothermal_grad is not None:
        dxy = bundle.isothermal_grad(P)
        gx2 = np.exp(_log_grad_x2(bundle)(P))
        iso = wedge_arrays(dxy[..., 0, :], dxy[..., 1, :], 1, 1) / gx2[..., None, None]
        res.append(relative_residual(_form_norm(bundle, P, d2 - iso, 2), 1.0, 0.0))
    res = np.max(np.stack(res), axis=0)
    worst = int(np.argmax(res))
    return make_check(
        "volume_forms", POINTWISE, bundle, _where_points(P, worst), 1.0, 1.0, res[worst], tolerance, "dVol3 = |V| dt^dVol2, dVol4 = dz^dt^dVol2"
    )


def check_lie_ladder(bundle, P, tolerance=TOLERANCES["pointwise"]) -> IdentityCheck:
    """Lie derivatives of the volume forms along ``d/dz``."""
    _require_isothermal(bundle)
    P = _points(bundle, P)
    X = lambda Q: kahler.d_z_vector(bundle, Q)  # noqa: E731
    xnorm = np.sqrt(1.0 / kahler.grad_z_norm2(bundle, P))
    dzX = _d_dz(bundle, P, _log_grad_x2(bundle))
    dzL = _d_dz(bundle, P, lambda Q: np.log(kahler.grad_z_norm2(bundle, Q)))
    dzV = kahler.d_over_dz(bundle, P, kahler.d_v_norm2(bundle, P)) / kahler.v_norm2(bundle, P)
    lap = kahler.laplacian_z(bundle, P)
    vn = np.sqrt(kahler.v_norm2(bundle, P))
    J = kahler.complex_structure(bundle, P)
    d_inv_v2 = -kahler.d_v_norm2(bundle, P) / kahler.v_norm2(bundle, P)[..., None] ** 2

    def c(a, k):
        return a[(...,) + (None,) * k]

    cases = [
        (lambda Q: kahler.dvol4(bundle, Q), 4, c(-dzX, 4) * kahler.dvol4(bundle, P)),
        (lambda Q: kahler.dvol3(bundle, Q), 3, c(0.5 * dzL - dzX, 3) * kahler.dvol3(bundle, P)),
        (lambda Q: kahler.dvol2(bundle, Q), 2, c(-dzX, 2) * kahler.dvol2(bundle, P)),
        (lambda Q: kahler.v_norm2(bundle, Q)[..., None, None] * kahler.dvol2(bundle, Q), 2, c(lap, 2) * kahler.dvol2(bundle, P)),
        (lambda Q: wedge_arrays(kahler.v_flat(bundle, Q), kahler.dvol2(bundle, Q), 1, 2), 3, c(lap / vn, 3) * kahler.dvol3(bundle, P)),
        (
            lambda Q: kahler.star_dvol2(bundle, Q),
            2,
            c(-dzV, 2) * kahler.star_dvol2(bundle, P) + wedge_arrays(kahler.dz(bundle, P), kahler.j_form(J, d_inv_v2), 1, 1),
        ),
    ]
    res = []
    for func, k, rhs in cases:
        lhs = kahler.lie_derivative_batch(X, func, P, k)
        scale = xnorm * _form_norm(bundle, P, func(P), k)
        res.append(relative_residual(_form_norm(bundle, P, lhs - rhs, k), _form_norm(bundle, P, lhs, k), _form_norm(bundle, P, rhs, k), scale))
    res = np.max(np.stack(res), axis=0)
    worst = int(np.argmax(res))
    return make_check(
        "lie_ladder", POINTWISE, bundle, _where_points(P, worst), 0.0, 0.0, res[worst], tolerance, "Lie derivatives of dVol4, dVol3, dVol2, |V|^2 dVol2, V_flat^dVol2, *dVol2 along d/dz"
    )


def check_laplacian_lebrun(bundle, P, tolerance=TOLERANCES["pointwise"]) -> IdentityCheck:
    """``Delta z = <grad z, grad u>`` with ``u`` the LeBrun conformal factor."""
    _require_isothermal(bundle)
    P = _points(bundle, P)
    du = exterior_derivative_batch(lambda Q: kahler.lebrun_uw(bundle, Q)[0], P, 0)
    ginv = check_metric(kahler.metric(bundle, P))
    rhs = np.einsum("...i,...ij,...j->...", kahler.dz(bundle, P), ginv, du)
    lhs = kahler.laplacian_z(bundle, P)
    w = kahler.lebrun_uw(bundle, P)[1]
    u_z = kahler.d_over_dz(bundle, P, du)
    alt = relative_residual(lhs - w * u_z, lhs, w * u_z)
    worst_alt = float(np.max(alt))
    return _pointwise(
        "laplacian_lebrun",
        bundle,
        P,
        lhs - rhs,
        lhs,
        rhs,
        0.0,
        tolerance,
        "Delta z = <grad z, grad u> = u_z / w",
        notes=(f"variant Delta z = w u_z: max residual {worst_alt:.3e}",),
    )


def check_kahler_structure(bundle, P, tolerance=TOLERANCES["pointwise"]) -> IdentityCheck:
    """Kahler, Killing and momentum equations, plus ``Rm^{++} = -(s/8) omega (x) omega``."""
    P = _points(bundle, P)
    parts = list(kahler.kahler_residuals(bundle, P).values()) + list(kahler.killing_residual(bundle, P).values())
    data = _curv(bundle, P)
    kc = kahler_curvature_checks(data, bundle.omega(P))
    scale = np.sqrt(np.abs(data.rm_norm2))
    pp = np.sqrt(np.abs(kc["rm_pp_norm2"]))
    parts.append(np.where(scale > 0, pp / np.maximum(scale, REL_FLOOR), pp))
    parts.append(np.abs(data.scalar) / np.maximum(scale, 1.0))
    res = np.max(np.stack(parts), axis=0)
    worst = int(np.argmax(res))
    return make_check(
        "kahler_structure", POINTWISE, bundle, _where_points(P, worst), 0.0, 0.0, res[worst], tolerance, "J^2 = -1, nabla omega = 0, L_V g = 0, dz = -i_V omega, s = 0, Rm^{++} = 0"
    )


# -------------------------------------------------------------- Toda / CGB forms


def toda_potential(bundle, P) -> np.ndarray:
    """``-J dlog|V|^2 ^ *dVol2 + (Delta z / |V|) dVol3``."""
    P = np.asarray(P, float)
    J = kahler.complex_structure(bundle, P)
    dlog = kahler.d_v_norm2(bundle, P) / kahler.v_norm2(bundle, P)[..., None]
    first = -wedge_arrays(kahler.j_form(J, dlog), kahler.star_dvol2(bundle, P), 1, 2)
    coef = kahler.laplacian_z(bundle, P) / np.sqrt(kahler.v_norm2(bundle, P))
    return first + coef[..., None, None, None] * kahler.dvol3(bundle, P)


def check_toda_global(bundle, P, tolerance=TOLERANCES["pointwise"]) -> IdentityCheck:
    """``2K dVol4 = d[-J dlog|V|^2 ^ *dVol2 + (Delta z / |V|) dVol3]``."""
    P = _points(bundle, P)
    K = red.gauss_curvature(bundle, P)
    lhs = 2.0 * K
    rhs = _top_ratio(bundle, P, exterior_derivative_batch(lambda Q: toda_potential(bundle, Q), P, 3))
    scale = np.sqrt(np.abs(_curv(bundle, P).rm_norm2))
    return _pointwise("toda_global", bundle, P, lhs - rhs, lhs, rhs, scale, tolerance, "2K dVol4 = d[-J dlog|V|^2 ^ *dVol2 + (Delta z/|V|) dVol3]")


def _ratio(bundle, P):
    return kahler.laplacian_z(bundle, P) / np.sqrt(kahler.v_norm2(bundle, P))


def _step1_parts(bundle, P):
    P = np.asarray(P, float)
    L = _ratio(bundle, P)
    v2 = kahler.v_norm2(bundle, P)
    vn = np.sqrt(v2)
    vf = kahler.v_flat(bundle, P)
    eta = vf / vn[..., None]
    deta = -0.5 * wedge_arrays(kahler.d_v_norm2(bundle, P), vf, 1, 1) / (v2 * vn)[..., None, None] + kahler.dv_flat(bundle, P) / vn[..., None, None]
    J = kahler.complex_structure(bundle, P)
    rho = np.einsum("...ai,...aj->...ij", J, _curv(bundle, P).ricci)
    return L, eta, deta, rho


def transgression_step1(bundle, P) -> np.ndarray:
    """``2 L eta ^ rho + (1/2) L^2 eta ^ d eta`` with ``L = Delta z / |V|``, ``eta = V_flat / |V|``."""
    L, eta, deta, rho = _step1_parts(bundle, P)
    out = (2.0 * L)[..., None, None, None] * wedge_arrays(eta, rho, 1, 2)
    return out + (0.5 * L * L)[..., None, None, None] * wedge_arrays(eta, deta, 1, 2)


def transgression_leibniz_scale(bundle, P) -> np.ndarray:
    """Summed sizes of the Leibniz terms of ``d TP_Ric`` (``d rho = 0``), as ``dVol4`` coefficients.

    ``2 dL ^ eta ^ rho``, ``2 L d eta ^ rho``, ``(1/2) d(L^2) ^ eta ^ d eta`` and
    ``(1/2) L^2 d eta ^ d eta``; they cancel on Ricci-flat families while
    ``|Ric|^2`` vanishes.
    """
    P = np.asarray(P, float)
    L, eta, deta, rho = _step1_parts(bundle, P)
    dL = exterior_derivative_batch(lambda Q: _ratio(bundle, Q), P, 0)
    c = lambda a: a[..., None, None, None, None]  # noqa: E731
    pieces = [
        2.0 * wedge_arrays(dL, wedge_arrays(eta, rho, 1, 2), 1, 3),
        c(2.0 * L) * wedge_arrays(deta, rho, 2, 2),
        wedge_arrays(L[..., None] * dL, wedge_arrays(eta, deta, 1, 2), 1, 3),
        c(0.5 * L * L) * wedge_arrays(deta, deta, 2, 2),
    ]
    return sum(np.abs(_top_ratio(bundle, P, p)) for p in pieces)


def transgression_step2(bundle, P) -> np.ndarray:
    """``(1/2) * d(L^2) + L (s + L^2 / 2) dVol3``."""
    P = np.asarray(P, float)
    L = _ratio(bundle, P)
    dL2 = exterior_derivative_batch(lambda Q: _ratio(bundle, Q) ** 2, P, 0)
    s = _curv(bundle, P).scalar
    return 0.5 * kahler.hodge(bundle, P, dL2, 1) + (L * (s + 0.5 * L * L))[..., None, None, None] * kahler.dvol3(bundle, P)


def _step3_vector(bundle):
    """``-|V|^{-2} JV``; equals ``d/dz`` when the field is Hamiltonian."""

    def X(Q):
        JV = np.einsum("...ab,...b->...a", kahler.complex_structure(bundle, Q), bundle.killing(Q))
        return -JV / kahler.v_norm2(bundle, Q)[..., None]

    return X


def transgression_step3(bundle, P) -> np.ndarray:
    """``(1/2) L_X((Delta z)^2 / |V| dVol3) - (1/2) *dVol2 ^ J d(L^2) + s L dVol3``."""
    P = np.asarray(P, float)

    def beta(Q):
        lap = kahler.laplacian_z(bundle, Q)
        return (lap * lap / np.sqrt(kahler.v_norm2(bundle, Q)))[..., None, None, None] * kahler.dvol3(bundle, Q)

    lie = kahler.lie_derivative_batch(_step3_vector(bundle), beta, P, 3)
    dL2 = exterior_derivative_batch(lambda Q: _ratio(bundle, Q) ** 2, P, 0)
    J = kahler.complex_structure(bundle, P)
    mid = wedge_arrays(kahler.star_dvol2(bundle, P), kahler.j_form(J, dL2), 2, 1)
    s = _curv(bundle, P).scalar
    return 0.5 * lie - 0.5 * mid + (s * _ratio(bundle, P))[..., None, None, None] * kahler.dvol3(bundle, P)


def check_transgression_steps(bundle, P, tolerance=TOLERANCES["pointwise"]) -> IdentityCheck:
    """The three assemblies of the Ricci transgression 3-form agree pairwise."""
    P = _points(bundle, P)
    tps = [transgression_step1(bundle, P), transgression_step2(bundle, P), transgression_step3(bundle, P)]
    n = lambda a: _form_norm(bundle, P, a, 3)  # noqa: E731
    norms = [n(t) for t in tps]
    L = _ratio(bundle, P)
    scale = np.abs(L) ** 3 + np.abs(L) * np.sqrt(np.abs(_curv(bundle, P).ric_norm2))
    res = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        res.append(relative_residual(n(tps[a] - tps[b]), norms[a], norms[b], scale))
    res = np.max(np.stack(res), axis=0)
    worst = int(np.argmax(res))
    return make_check(
        "transgression_steps",
        POINTWISE,
        bundle,
        _where_points(P, worst),
        norms[0][worst],
        norms[2][worst],
        res[worst],
        tolerance,
        "three expressions of TP_Ric agree",
        notes=(f"|TP_Ric| at worst point {norms[0][worst]:.6g}",),
    )


def check_p_ric(bundle, P, tolerance=TOLERANCES["p_ric"], assembly: str = "step1", step: float = NESTED_STEP) -> IdentityCheck:
    """``(|Ric|^2 - s^2/2) dVol4 = d TP_Ric``.

    ``step1`` is built from exact derivatives only, so ``d`` is a single
    finite-difference level; the other assemblies difference internally
    before the outer ``d``.  The scale is ``|Rm|^2`` plus the sizes of the
    Leibniz terms of ``d TP_Ric``.
    """
    funcs = {"step1": transgression_step1, "step2": transgression_step2, "step3": transgression_step3}
    if assembly not in funcs:
        raise ValueError(f"unknown assembly {assembly!r}")
    P = _points(bundle, P)
    data = _curv(bundle, P)
    lhs = data.ric_norm2 - 0.5 * data.scalar**2
    rhs = _top_ratio(bundle, P, exterior_derivative_batch(lambda Q: funcs[assembly](bundle, Q), P, 3, step))
    scale = np.abs(data.rm_norm2) + transgression_leibniz_scale(bundle, P)
    return _pointwise(
        "p_ric",
        bundle,
        P,
        lhs - rhs,
        lhs,
        rhs,
        scale,
        tolerance,
        "(|Ric|^2 - s^2/2) dVol4 = d TP_Ric",
        absolute=_is_flat(bundle),
        notes=(f"TP_Ric assembly {assembly}, step {step:g}",),
    )


# ------------------------------------------------------------------ LeBrun PDE


_FIRST = ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))
_SECOND = ((-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0), (1, 16.0 / 12.0), (2, -1.0 / 12.0))


def _partial(func, X, axis, order, step):
    h = step * np.maximum(1.0, np.abs(X[..., axis]))
    acc = 0.0
    for off, wgt in _FIRST if order == 1 else _SECOND:
        Y = X.copy()
        Y[..., axis] += off * h
        acc = acc + wgt * func(Y)
    return acc / h**order


def lebrun_residuals(bundle, XYZ) -> dict:
    """Both sides of ``u_xx + u_yy = -(e^u)_zz`` and ``w_xx + w_yy = -(w e^u)_zz``.

    Each residual is relative to the summed magnitudes of the terms that
    cancel, with ``(w e^u)_zz`` expanded by the product rule; on families
    where both sides vanish identically this keeps roundoff from posing as a
    relative error of order one.
    """
    XYZ = np.asarray(XYZ, float)

    def u(Y):
        return kahler.uw_at(bundle, Y[..., 0], Y[..., 1], Y[..., 2])[0]

    def w(Y):
        return kahler.uw_at(bundle, Y[..., 0], Y[..., 1], Y[..., 2])[1]

    def eu(Y):
        return np.exp(u(Y))

    def weu(Y):
        return w(Y) * eu(Y)

    d2 = lambda f, a: _partial(f, XYZ, a, 2, PDE_STEP)  # noqa: E731
    d1 = lambda f, a: _partial(f, XYZ, a, 1, PDE_STEP)  # noqa: E731
    out = {}
    uxx, uyy, euzz = d2(u, 0), d2(u, 1), d2(eu, 2)
    lhs, rhs = uxx + uyy, -euzz
    out["toda"] = (lhs, rhs, relative_residual(lhs - rhs, lhs, rhs, np.abs(uxx) + np.abs(uyy) + np.abs(euzz)))
    wxx, wyy = d2(w, 0), d2(w, 1)
    w0, e0 = w(XYZ), eu(XYZ)
    terms = np.abs(e0 * d2(w, 2)) + 2.0 * np.abs(d1(w, 2) * d1(eu, 2)) + np.abs(w0 * euzz)
    lhs, rhs = wxx + wyy, -d2(weu, 2)
    out["linear"] = (lhs, rhs, relative_residual(lhs - rhs, lhs, rhs, np.abs(wxx) + np.abs(wyy) + terms))
    return out


def lebrun_sample(bundle, n: int, seed: int = 0) -> np.ndarray:
    """LeBrun coordinates ``(x, y, z)`` of ``n`` regular sample points."""
    _require_isothermal(bundle)
    P = bundle.sample(n, seed)
    return np.concatenate([bundle.isothermal(P), bundle.momentum(P)[..., None]], axis=-1)


def check_lebrun_pde(bundle, XYZ, tolerance=TOLERANCES["lebrun_pde"]) -> IdentityCheck:
    XYZ = np.atleast_2d(np.asarray(XYZ, float))
    r = lebrun_residuals(bundle, XYZ)
    res = np.maximum(r["toda"][2], r["linear"][2])
    worst = int(np.argmax(res))
    which = "toda" if r["toda"][2][worst] >= r["linear"][2][worst] else "linear"
    x, y, z = XYZ[worst]
    return make_check(
        "lebrun_pde",
        POINTWISE,
        bundle,
        f"{len(XYZ)} points; worst (x={x:.6g}, y={y:.6g}, z={z:.6g})",
        r[which][0][worst],
        r[which][1][worst],
        res[worst],
        tolerance,
        "u_xx + u_yy + (e^u)_zz = 0, w_xx + w_yy + (w e^u)_zz = 0",
        notes=(f"worst equation: {which}",),
    )


# --------------------------------------------------------- z-derivative engine


@dataclass(frozen=True)
class ZDerivativeEstimator:
    """Central differences in ``z`` with Richardson extrapolation.

    ``levels`` step sizes ``h, h/2, ..`` are combined; each level removes the
    next even power of ``h`` from the error.
    """

    base_step: float = 1e-3
    levels: int = 2

    def __post_init__(self):
        if not self.base_step > 0:
            raise ValueError("base step must be positive")
        if self.levels < 2:
            raise ValueError("need at least two Richardson levels")

    @classmethod
    def for_range(cls, z_min: float, z_max: float, levels: int = 2) -> "ZDerivativeEstimator":
        span = abs(z_max - z_min)
        if span == 0:
            span = max(1.0, abs(z_min))
        return cls(1e-3 * span, levels)

    def _memo(self, f):
        cache = {}

        def g(z):
            key = float(z)
            if key not in cache:
                cache[key] = float(f(key))
            return cache[key]

        return g

    @staticmethod
    def _raw(f, z, h, order):
        if order == 1:
            return (f(z + h) - f(z - h)) / (2.0 * h)
        return (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h)

    def _extrapolate(self, values):
        table = list(values)
        for k in range(1, len(table)):
            fac = 4.0**k
            table = [(fac * table[j + 1] - table[j]) / (fac - 1.0) for j in range(len(table) - 1)]
        return table[0]

    def derivative(self, f: Callable[[float], float], z: float, order: int = 1) -> float:
        if order not in (1, 2):
            raise ValueError("only first and second derivatives are supported")
        g = self._memo(f)
        raws = [self._raw(g, z, self.base_step / 2**j, order) for j in range(self.levels)]
        return self._extrapolate(raws)

    def first(self, f, z) -> float:
        return self.derivative(f, z, 1)

    def second(self, f, z) -> float:
        return self.derivative(f, z, 2)

    def observed_order(self, f, z: float, order: int = 1) -> float:
        """Convergence order of the extrapolated estimate as the base step halves."""
        g = self._memo(f)
        d = []
        for j in range(3):
            h = self.base_step / 2**j
            d.append(self._extrapolate([self._raw(g, z, h / 2**i, order) for i in range(self.levels)]))
        a, b = abs(d[0] - d[1]), abs(d[1] - d[2])
        if a == 0 or b == 0:
            return math.inf
        return math.log2(a / b)

    def span(self) -> float:
        """Largest distance from ``z`` at which the function is sampled."""
        return self.base_step


DEFAULT_ESTIMATOR = ZDerivativeEstimator()


# -------------------------------------------------------------- reduced integrals

QUANTITIES = ("vol2", "v2", "lap", "lap2", "ric2")


def reduced_integral(bundle, z: float, quantity: str, method: str = "analytic", order: int = red.DEFAULT_ORDER) -> float:
    """``int_{M2_z} f dVol2`` for one of :data:`QUANTITIES`.

    ``method="fd"`` uses finite-difference curvature and a differenced
    ``dV_flat`` in place of the exact derivatives.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}")
    if method not in ("analytic", "fd"):
        raise ValueError(f"unknown method {method!r}")
    b = bundle.with_numeric_metric() if method == "fd" else bundle
    lap_method = "fd" if method == "fd" else "analytic"
    integrands = {
        "vol2": None,
        "v2": lambda P: kahler.v_norm2(b, P),
        "lap": lambda P: kahler.laplacian_z(b, P, lap_method),
        "lap2": lambda P: kahler.laplacian_z(b, P, lap_method) ** 2,
        "ric2": lambda P: _curv(b, P).ric_norm2,
    }
    return red.integrate_reduced(b, z, integrands[quantity], order)


def _require_regular(bundle, z, margin=0.0):
    lo, hi = bundle.z_interval
    if not (lo < z - margin and z + margin < hi):
        raise CheckDomainError(f"{bundle.label}: z={z} (margin {margin:g}) not inside the regular interval {bundle.z_interval}")
    if bundle.reduction_chart is None:
        raise CheckDomainError(f"{bundle.label}: level sets have no compact quotient")


def _evolution(name, bundle, z, lhs, rhs, tolerance, provenance, absolute=False, notes=()):
    res = abs(lhs - rhs) if absolute else float(relative_residual(lhs - rhs, lhs, rhs))
    extra = ("absolute residual (both sides vanish identically)",) if absolute else ()
    return make_check(name, EVOLUTION, bundle, f"z={z:.6g}", lhs, rhs, res, tolerance, provenance, extra + tuple(notes))


def check_area_growth(bundle, z, estimator: Optional[ZDerivativeEstimator] = None, tolerance=TOLERANCES["evolution"]) -> IdentityCheck:
    """``d/dz Vol2 = 2 pi e_g`` with ``e_g`` from the Chern-Simons integral."""
    est = estimator or DEFAULT_ESTIMATOR
    _require_regular(bundle, z, est.span())
    lhs = est.first(lambda t: red.vol2(bundle, t), z)
    eg = red.e_g(bundle, z)
    rhs = TWO_PI * eg
    absolute = abs(rhs) < 1e-9 and abs(lhs) < 1e-6
    return _evolution("area_growth", bundle, z, lhs, rhs, tolerance, "d/dz Vol2 = 2 pi e_g", absolute=absolute, notes=(f"e_g = {eg:.12g}",))


def check_chi_evolution(bundle, z, estimator: Optional[ZDerivativeEstimator] = None, tolerance=TOLERANCES["evolution"]) -> IdentityCheck:
    """``d/dz int Delta z dVol2 = 4 pi chi_g`` with ``chi_g`` from Gauss-Bonnet."""
    est = estimator or DEFAULT_ESTIMATOR
    _require_regular(bundle, z, est.span())
    lhs = est.first(lambda t: reduced_integral(bundle, t, "lap"), z)
    chi = red.chi_g(bundle, z)
    return _evolution("chi_evolution", bundle, z, lhs, FOUR_PI * chi, tolerance, "d/dz int Delta z dVol2 = 4 pi chi_g", notes=(f"chi_g = {chi:.12g}",))


def check_v2_evolution(bundle, z, estimator: Optional[ZDerivativeEstimator] = None, tolerance=TOLERANCES["evolution"]) -> IdentityCheck:
    """``d^2/dz^2 int |V|^2 dVol2 = 4 pi chi_g``."""
    est = estimator or DEFAULT_ESTIMATOR
    _require_regular(bundle, z, est.span())
    lhs = est.second(lambda t: reduced_integral(bundle, t, "v2"), z)
    chi = red.chi_g(bundle, z)
    return _evolution("v2_evolution", bundle, z, lhs, FOUR_PI * chi, tolerance, "d^2/dz^2 int |V|^2 dVol2 = 4 pi chi_g", notes=(f"chi_g = {chi:.12g}",))


def check_cgb_evolution(bundle, z, estimator: Optional[ZDerivativeEstimator] = None, tolerance=TOLERANCES["evolution"]) -> IdentityCheck:
    """``d^2/dz^2 int (Delta z)^2 dVol2 = 2 int |Ric|^2 dVol2``."""
    est = estimator or DEFAULT_ESTIMATOR
    _require_regular(bundle, z, est.span())
    lhs = est.second(lambda t: reduced_integral(bundle, t, "lap2"), z)
    rhs = 2.0 * reduced_integral(bundle, z, "ric2")
    return _evolution(
        "cgb_evolution", bundle, z, lhs, rhs, tolerance, "d^2/dz^2 int (Delta z)^2 dVol2 = 2 int |Ric|^2 dVol2", absolute=_is_ricci_flat(bundle)
    )


def check_volume_linear(bundle, z, estimator: Optional[ZDerivativeEstimator] = None, tolerance=TOLERANCES["volume_linear"]) -> IdentityCheck:
    """``d^2/dz^2 Vol2 = 0``; the right side is a structural zero, so the residual is absolute."""
    est = estimator or DEFAULT_ESTIMATOR
    _require_regular(bundle, z, est.span())
    lhs = est.second(lambda t: red.vol2(bundle, t), z)
    return _evolution("volume_linear", bundle, z, lhs, 0.0, tolerance, "d^2/dz^2 Vol2 = 0", absolute=True)


def check_integration_lemma(bundle, z, tolerance=TOLERANCES["closed_form"]) -> IdentityCheck:
    """``int_{M3_z} f dVol3 = 2 pi int_{M2_z} |V| f dVol2`` for ``f = (Delta z)^2 + |V|^2``."""
    _require_regular(bundle, z)
    if bundle.level_set_chart is None:
        raise CheckDomainError(f"{bundle.label}: no level-set chart")

    def f(P):
        return kahler.laplacian_z(bundle, P) ** 2 + kahler.v_norm2(bundle, P)

    lhs = red.integrate_level_set(bundle, z, f)
    rhs = TWO_PI * red.integrate_reduced(bundle, z, lambda P: np.sqrt(kahler.v_norm2(bundle, P)) * f(P))
    return make_check(
        "integration_lemma", CLOSED_FORM, bundle, f"z={z:.6g}", lhs, rhs, relative_residual(lhs - rhs, lhs, rhs), tolerance, "int_M3 f dVol3 = 2 pi int_M2 |V| f dVol2"
    )


# ----------------------------------------------------------------- closed forms

_DECLARED_KEYS = {"vol2": "vol2", "v2": "int_v2", "lap": "int_lap", "lap2": "int_lap2", "ric2": "int_ric2"}


def check_closed_form(bundle, z, quantity: str, method: str = "analytic", tolerance: Optional[float] = None) -> IdentityCheck:
    """Quadrature of a reduced integral against the family's closed form."""
    key = _DECLARED_KEYS[quantity]
    if key not in bundle.declared:
        raise CheckDomainError(f"{bundle.label}: no closed form for {quantity}")
    _require_regular(bundle, z)
    if tolerance is None:
        tolerance = TOLERANCES["closed_form_fd" if method == "fd" else "closed_form"]
    lhs = reduced_integral(bundle, z, quantity, method)
    rhs = float(bundle.declared[key](z))
    absolute = rhs == 0.0
    res = abs(lhs - rhs) if absolute else float(relative_residual(lhs - rhs, lhs, rhs))
    notes = ("absolute residual (closed form is zero)",) if absolute else ()
    return make_check(f"closed_form_{quantity}_{method}", CLOSED_FORM, bundle, f"z={z:.6g}", lhs, rhs, res, tolerance, f"int_M2 {quantity} dVol2 = closed form", notes)


def check_euler_numbers(bundle, z, tolerance=TOLERANCES["closed_form"]) -> list:
    """``e_g`` (Chern-Simons) and ``chi_g`` (Gauss-Bonnet) against declared values."""
    _require_regular(bundle, z)
    out = []
    for name, fn, key in (("e_g", red.e_g, "e_g"), ("chi_g", red.chi_g, "chi_g")):
        if key not in bundle.declared:
            continue
        val = fn(bundle, z)
        ref = float(bundle.declared[key])
        res = abs(val - ref) if ref == 0.0 else float(relative_residual(val - ref, val, ref))
        out.append(make_check(f"{name}_value", CLOSED_FORM, bundle, f"z={z:.6g}", val, ref, res, tolerance, f"{name} = declared value"))
    return out


def check_laplacian_value(bundle, P, tolerance=TOLERANCES["closed_form"]) -> IdentityCheck:
    """``Delta z`` from ``*(dV_flat ^ omega)`` against the declared closed form."""
    P = _points(bundle, P)
    lhs = kahler.laplacian_z(bundle, P)
    rhs = kahler.laplacian_z(bundle, P, "declared")
    return _pointwise("laplacian_value", bundle, P, lhs - rhs, lhs, rhs, 0.0, tolerance, "Delta z = declared closed form")


def check_topological_constancy(bundle, zs, tolerance=TOLERANCES["constancy"]) -> list:
    """``e_g`` and ``chi_g`` do not change along the grid."""
    zs = [float(z) for z in zs]
    for z in zs:
        _require_regular(bundle, z)
    out = []
    for name, fn in (("e_g", red.e_g), ("chi_g", red.chi_g)):
        vals = np.array([fn(bundle, z) for z in zs])
        spread = float(np.max(vals) - np.min(vals))
        out.append(
            make_check(
                f"{name}_constant", CLOSED_FORM, bundle, f"z in [{min(zs):.6g}, {max(zs):.6g}] ({len(zs)} values)", np.max(vals), np.min(vals), spread, tolerance, f"{name} constant in z"
            )
        )
    return out


# ----------------------------------------------------------------- Ricci-flat


def check_ricci_flat_relation(bundle, z, tolerance=TOLERANCES["ricci_flat"]) -> IdentityCheck:
    """``2 e_g Delta z = chi_g`` on a non-flat Ricci-flat family.

    On such a family ``Delta z`` is a constant; the check reports it faithfully
    and notes the value of the variant ``e_g Delta z = 2 chi_g`` that follows
    from the two growth laws.
    """
    if not _is_ricci_flat(bundle) or _is_flat(bundle):
        raise CheckDomainError(f"{bundle.label}: relation only applies to non-flat Ricci-flat families")
    _require_regular(bundle, z)
    chart = bundle.reduction(z)
    rule = red.quadrature_rule(chart.domain, 8, chart.polar)
    lap_vals = kahler.laplacian_z(bundle, chart.embed(rule.nodes))
    lap = float(np.mean(lap_vals))
    eg = red.e_g(bundle, z)
    chi = red.chi_g(bundle, z)
    lhs = 2.0 * eg * lap
    res = float(relative_residual(lhs - chi, lhs, chi))
    var = float(relative_residual(eg * lap - 2.0 * chi, eg * lap, 2.0 * chi))
    notes = (
        f"e_g = {eg:.12g}, Delta z = {lap:.12g}, chi_g = {chi:.12g}",
        f"variant e_g * Delta z = 2 chi_g balances with residual {var:.3e}",
    )
    return make_check("ricci_flat_relation", CLOSED_FORM, bundle, f"z={z:.6g}", lhs, chi, res, tolerance, "2 e_g Delta z = chi_g", notes)


# ------------------------------------------------------------------ inequalities


def laplacian_spread(bundle, z, order: int = 16) -> float:
    """Relative oscillation of ``Delta z`` over ``M2_z``."""
    chart = bundle.reduction(z)
    rule = red.quadrature_rule(chart.domain, order, chart.polar)
    vals = kahler.laplacian_z(bundle, chart.embed(rule.nodes))
    top = float(np.max(np.abs(vals)))
    return float(np.max(vals) - np.min(vals)) / max(top, REL_FLOOR)


def check_holder(bundle, z, tolerance=TOLERANCES["inequality"]) -> IdentityCheck:
    """``(int Delta z)^2 <= Vol2 * int (Delta z)^2``, with equality iff ``Delta z`` is constant.

    The residual is the violation of the inequality; if ``Delta z`` is constant
    it is the distance from equality, and if ``Delta z`` varies but the gap is
    below the equality threshold the record fails with residual 1.
    """
    _require_regular(bundle, z)
    a = reduced_integral(bundle, z, "lap")
    vol = red.vol2(bundle, z)
    b = reduced_integral(bundle, z, "lap2")
    lhs = a * a
    rhs = vol * b
    gap = (rhs - lhs) / max(abs(rhs), REL_FLOOR)
    spread = laplacian_spread(bundle, z)
    constant = spread < CONSTANT_SPREAD
    if constant:
        res = abs(gap)
        tag = "Delta z constant on M2_z: equality expected"
    elif gap < EQUALITY_TOL:
        res = max(-gap, 1.0)
        tag = "Delta z varies but the gap is below the equality threshold"
    else:
        res = 0.0
        tag = "Delta z varies: strict inequality"
    notes = (tag, f"relative gap {gap:.6e}", f"Delta z spread {spread:.3e}")
    return make_check("holder", INEQUALITY, bundle, f"z={z:.6g}", lhs, rhs, res, tolerance, "(int Delta z)^2 <= Vol2 int (Delta z)^2", notes)


def check_sign_constraints(bundle, z, tolerance=REL_FLOOR) -> list:
    """``chi_g >= 0``; ``e_g >= 0`` on an upper end and ``e_g <= 0`` on a lower end."""
    _require_regular(bundle, z)
    end = bundle.topology.get("end", "")
    chi = red.chi_g(bundle, z)
    eg = red.e_g(bundle, z)
    # rounding slack for values that are zero exactly
    slack = 1e-9
    out = [make_check("chi_g_sign", INEQUALITY, bundle, f"z={z:.6g}", chi, 0.0, max(0.0, -chi - slack), tolerance, "chi_g >= 0")]
    if end in ("plus", "both"):
        out.append(make_check("e_g_sign_plus", INEQUALITY, bundle, f"z={z:.6g}", eg, 0.0, max(0.0, -eg - slack), tolerance, "e_g >= 0 on the upper end"))
    if end in ("minus", "both"):
        out.append(make_check("e_g_sign_minus", INEQUALITY, bundle, f"z={z:.6g}", eg, 0.0, max(0.0, eg - slack), tolerance, "e_g <= 0 on the lower end"))
    return out


def scan_basic_inequalities(bundle, zs) -> list:
    out = []
    for z in zs:
        out.append(check_holder(bundle, float(z)))
        out.extend(check_sign_constraints(bundle, float(z)))
    return out


# --------------------------------------------------------------------- registry

POINT_CHECKS = {
    "kahler_structure": check_kahler_structure,
    "bochner": check_bochner,
    "hess_j_invariance": check_hess_invariance,
    "hess_j_dv": check_hess_dv,
    "dv_closed_form": check_dv_closed_form,
    "v_wedge_dv": check_v_wedge_dv,
    "volume_forms": check_volume_forms,
    "lie_ladder": check_lie_ladder,
    "laplacian_lebrun": check_laplacian_lebrun,
    "laplacian_value": check_laplacian_value,
    "toda_global": check_toda_global,
    "transgression_steps": check_transgression_steps,
    "p_ric": check_p_ric,
}

Z_CHECKS = {
    "area_growth": check_area_growth,
    "chi_evolution": check_chi_evolution,
    "v2_evolution": check_v2_evolution,
    "cgb_evolution": check_cgb_evolution,
    "volume_linear": check_volume_linear,
}


@dataclass
class Applicability:
    """Which checks make sense for a bundle, and why others are skipped."""

    point: list = field(default_factory=list)
    z: list = field(default_factory=list)
    skipped: dict = field(default_factory=dict)


def applicable_checks(bundle) -> Applicability:
    app = Applicability()
    iso = bundle.isothermal_grad is not None
    for name in POINT_CHECKS:
        if name in ("dv_closed_form", "lie_ladder", "laplacian_lebrun") and not iso:
            app.skipped[name] = "no isothermal coordinates"
        elif name == "volume_forms" and bundle.dt is None:
            app.skipped[name] = "no angular coordinate"
        elif name == "laplacian_value" and bundle.laplacian_declared is None:
            app.skipped[name] = "no closed form"
        else:
            app.point.append(name)
    if bundle.reduction_chart is None:
        for name in Z_CHECKS:
            app.skipped[name] = "level sets have no compact quotient"
    else:
        app.z.extend(Z_CHECKS)
    return app
