"""Concrete scalar-flat Kahler surfaces with a holomorphic Killing field.

Every constructor returns a :class:`GeometryBundle`: chart evaluators for the
metric (with exact first and second derivatives), the Kahler form, the Killing
field ``V`` and its momentum ``z`` (``dz = -i_V omega``), plus the charts
needed to integrate over level sets and their quotients, and the closed forms
that the numerical routines are compared against.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import sympy as sp

from ._symbolic import SymbolicGeometry, outer1, wedge1
from .curvature import MetricField
from .reduction import LevelSetChart, ReductionChart

__all__ = [
    "GeometryBundle",
    "UnsupportedFamily",
    "flat_c2",
    "lebrun_instanton",
    "s2_h2",
    "from_lebrun_data",
    "build_family",
]

TWO_PI = 2.0 * math.pi


class UnsupportedFamily(ValueError):
    pass


@dataclass
class GeometryBundle:
    name: str
    params: dict
    coord_names: tuple
    metric: MetricField
    omega: Callable
    killing: Callable
    killing_jacobian: Optional[Callable]
    momentum: Callable
    momentum_grad: Optional[Callable]
    momentum_hess: Optional[Callable]
    dv_flat: Optional[Callable]
    v_norm2_grad: Optional[Callable]
    sampler: Callable
    z_interval: tuple
    topology: dict
    declared: dict = field(default_factory=dict)
    laplacian_declared: Optional[Callable] = None
    dt: Optional[Callable] = None
    isothermal: Optional[Callable] = None
    isothermal_grad: Optional[Callable] = None
    lebrun_point: Optional[Callable] = None
    reduction_chart: Optional[Callable[[float], ReductionChart]] = None
    level_set_chart: Optional[Callable[[float], LevelSetChart]] = None
    notes: list = field(default_factory=list)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({inner})"

    def sample(self, n: int, seed: int = 0) -> np.ndarray:
        """``n`` regular sample points, reproducible from ``seed``."""
        return self.sampler(np.random.default_rng(seed), n)

    def reduction(self, z: float) -> ReductionChart:
        if self.reduction_chart is None:
            raise UnsupportedFamily(f"{self.label}: no compact reduction chart")
        lo, hi = self.z_interval
        if not lo < z < hi:
            raise UnsupportedFamily(f"{self.label}: z={z} outside regular interval {self.z_interval}")
        return self.reduction_chart(float(z))

    def level_set(self, z: float) -> LevelSetChart:
        if self.level_set_chart is None:
            raise UnsupportedFamily(f"{self.label}: no level-set chart")
        return self.level_set_chart(float(z))

    def with_numeric_metric(self) -> "GeometryBundle":
        """Copy whose curvature is computed from finite differences only."""
        return dataclasses.replace(self, metric=self.metric.numeric())


def _from_symbolic(sym: SymbolicGeometry, **kw) -> GeometryBundle:
    metric = MetricField(sym.metric, sym.dmetric, sym.d2metric)
    return GeometryBundle(
        metric=metric,
        omega=sym.omega,
        killing=sym.killing,
        killing_jacobian=sym.killing_jacobian,
        momentum=sym.momentum,
        momentum_grad=sym.momentum_grad,
        momentum_hess=sym.momentum_hess,
        dv_flat=sym.dv_flat,
        v_norm2_grad=sym.v_norm2_grad,
        **kw,
    )


def _stereo(rho_x, rho_y):
    # plane point -> polar angle on the unit sphere, azimuth
    return 2.0 * np.arctan(np.hypot(rho_x, rho_y)), np.arctan2(rho_y, rho_x)


# --------------------------------------------------------------------------- flat


def flat_c2(alpha: float = 1.0, beta: float = 1.0) -> GeometryBundle:
    """Flat C^2 with the rotation field of weights ``(alpha, beta)``.

    Chart ``(x1, y1, x2, y2)`` with ``J d/dx = d/dy``; ``z = -(alpha |z1|^2 +
    beta |z2|^2) / 2``.  Level sets and quotients are only built for the Hopf
    case ``alpha = beta = 1``; other weights give orbifold quotients.
    """
    if alpha <= 0 or beta <= 0:
        raise UnsupportedFamily("weights must be positive")
    x1, y1, x2, y2 = X = sp.symbols("x1 y1 x2 y2", real=True)
    a, b = sp.nsimplify(alpha), sp.nsimplify(beta)
    g = sp.eye(4)
    om = sp.Matrix(wedge1([1, 0, 0, 0], [0, 1, 0, 0])) + sp.Matrix(wedge1([0, 0, 1, 0], [0, 0, 0, 1]))
    V = [a * y1, -a * x1, b * y2, -b * x2]
    z = -(a * (x1**2 + y1**2) + b * (x2**2 + y2**2)) / 2
    sym = SymbolicGeometry(X, g, om, V, z)
    hopf = alpha == 1.0 and beta == 1.0

    def sampler(rng, n):
        pts = []
        while len(pts) < n:
            p = rng.uniform(-1.5, 1.5, size=4)
            if min(p[0] ** 2 + p[1] ** 2, p[2] ** 2 + p[3] ** 2) > 0.05:
                pts.append(p)
        return np.array(pts)

    def dt(P):
        P = np.asarray(P, float)
        r2 = P[..., 0] ** 2 + P[..., 1] ** 2
        out = np.zeros(P.shape)
        # t = -phi1 / alpha, phi1 the argument of z1
        out[..., 0] = P[..., 1] / r2 / alpha
        out[..., 1] = -P[..., 0] / r2 / alpha
        return out

    lap = -2.0 * (alpha + beta)
    kw = {}
    declared = {"laplacian": lambda z: lap + 0.0 * np.asarray(z, float)}
    if hopf:
        # holomorphic quotient coordinate z2 / z1
        iso_x = (x2 * x1 + y2 * y1) / (x1**2 + y1**2)
        iso_y = (y2 * x1 - x2 * y1) / (x1**2 + y1**2)
        fx, gx = sym.scalar(iso_x)
        fy, gy = sym.scalar(iso_y)

        def isothermal(P):
            return np.stack([fx(P), fy(P)], axis=-1)

        def isothermal_grad(P):
            return np.stack([gx(P), gy(P)], axis=-2)

        def lebrun_point(x, y, z):
            R = np.sqrt(-2.0 * np.asarray(z, float))
            a1 = R / np.sqrt(1.0 + x * x + y * y)
            return np.stack(np.broadcast_arrays(a1, 0.0 * a1, x * a1, y * a1), axis=-1)

        kw.update(
            isothermal=isothermal,
            isothermal_grad=isothermal_grad,
            lebrun_point=lebrun_point,
            reduction_chart=_hopf_reduction,
            level_set_chart=_hopf_level_set,
        )
        declared.update(
            vol2=lambda z: -TWO_PI * z,
            int_v2=lambda z: 4.0 * math.pi * z * z,
            int_lap=lambda z: 8.0 * math.pi * z,
            int_lap2=lambda z: -32.0 * math.pi * z,
            int_ric2=lambda z: 0.0 * z,
            e_g=-1.0,
            chi_g=2.0,
        )
    return _from_symbolic(
        sym,
        name="flat_c2",
        params={"alpha": alpha, "beta": beta},
        coord_names=("x1", "y1", "x2", "y2"),
        sampler=sampler,
        z_interval=(-math.inf, 0.0),
        topology={
            "level_set": "S3" if hopf else "S3 (Seifert)",
            "reduced": "S2" if hopf else "orbifold S2",
            "end": "minus",
            "compact_level_sets": True,
        },
        declared=declared,
        laplacian_declared=lambda P: np.full(np.shape(P)[:-1], lap),
        dt=dt,
        notes=["flat", "ricci_flat"],
        **kw,
    )


def _hopf_reduction(z: float) -> ReductionChart:
    R = math.sqrt(-2.0 * z)

    def embed(S):
        th, ph = S[..., 0], S[..., 1]
        c, s = np.cos(th / 2), np.sin(th / 2)
        return np.stack([R * c * np.cos(ph), R * c * np.sin(ph), R * s, 0.0 * th], axis=-1)

    def jac(S):
        th, ph = S[..., 0], S[..., 1]
        c, s = np.cos(th / 2), np.sin(th / 2)
        zero = 0.0 * th
        dth = np.stack([-R * s * np.cos(ph) / 2, -R * s * np.sin(ph) / 2, R * c / 2, zero], axis=-1)
        dph = np.stack([-R * c * np.sin(ph), R * c * np.cos(ph), zero, zero], axis=-1)
        return np.stack([dth, dph], axis=-2)

    def locate(P):
        P = np.asarray(P, float)
        a1 = np.hypot(P[..., 0], P[..., 1])
        a2 = np.hypot(P[..., 2], P[..., 3])
        th = 2.0 * np.arctan2(a2, a1)
        ph = np.mod(np.arctan2(P[..., 1], P[..., 0]) - np.arctan2(P[..., 3], P[..., 2]), TWO_PI)
        return np.stack([th, ph], axis=-1)

    return ReductionChart(z=z, embed=embed, jacobian=jac, locate=locate, domain=((0.0, math.pi), (0.0, TWO_PI)))


def _hopf_level_set(z: float) -> LevelSetChart:
    R = math.sqrt(-2.0 * z)

    def embed(T):
        th, a, b = T[..., 0], T[..., 1], T[..., 2]
        c, s = np.cos(th / 2), np.sin(th / 2)
        return np.stack([R * c * np.cos(a), R * c * np.sin(a), R * s * np.cos(b), R * s * np.sin(b)], axis=-1)

    return LevelSetChart(z=z, embed=embed, domain=((0.0, math.pi), (0.0, TWO_PI), (0.0, TWO_PI)))


# ---------------------------------------------------------------------- instanton


def lebrun_instanton(k: int = 1, m: float = 1.0) -> GeometryBundle:
    """LeBrun's scalar-flat metric on the total space of O(-k).

    Chart ``(w, psi, theta, phi)`` with ``r = exp(-w/2)``; the metric is
    ``C (dw^2 / (4F) + F eta1^2 + eta2^2 + eta3^2)`` with ``C = e^{-w}`` and
    ``F = 1 + m^2 (k-2) e^w - m^4 (k-1) e^{2w}``.  ``k = 1`` is the Burns
    metric and ``k = 2`` is Eguchi-Hanson.  ``V = (2/k) d/dpsi`` has period
    ``2 pi`` on the lens-space quotient ``psi ~ psi + 4 pi / k``.
    """
    k = int(k)
    if k < 1 or m <= 0:
        raise UnsupportedFamily("need k >= 1 and m > 0")
    w, psi, th, ph = X = sp.symbols("w psi theta phi", real=True)
    K = sp.Integer(k)
    M = sp.nsimplify(m)
    half = sp.Rational(1, 2)
    e1 = [0, half, 0, half * sp.cos(th)]
    e2 = [0, 0, half * sp.sin(psi), -half * sp.sin(th) * sp.cos(psi)]
    e3 = [0, 0, half * sp.cos(psi), half * sp.sin(th) * sp.sin(psi)]
    dw = [1, 0, 0, 0]
    C = sp.exp(-w)
    F = 1 + M**2 * (K - 2) * sp.exp(w) - M**4 * (K - 1) * sp.exp(2 * w)
    g = C / (4 * F) * sp.Matrix(outer1(dw, dw)) + C * F * sp.Matrix(outer1(e1, e1))
    g += C * sp.Matrix(outer1(e2, e2)) + C * sp.Matrix(outer1(e3, e3))
    om = C / 2 * sp.Matrix(wedge1(dw, e1)) + C * sp.Matrix(wedge1(e2, e3))
    V = [0, 2 / K, 0, 0]
    z = -(C - M**2) / (2 * K)
    sym = SymbolicGeometry(X, g, om, V, z)
    m2 = float(m) ** 2

    def w_of_z(z):
        return -np.log(m2 - 2.0 * k * np.asarray(z, float))

    zmax = -0.05 * m2

    def sampler(rng, n):
        zs = rng.uniform(-3.0, zmax, size=n)
        return np.stack(
            [w_of_z(zs), rng.uniform(0, 4 * math.pi / k, n), rng.uniform(0.2, math.pi - 0.2, n), rng.uniform(0, TWO_PI, n)],
            axis=-1,
        )

    def dt(P):
        out = np.zeros(np.shape(P))
        out[..., 1] = k / 2.0
        return out

    iso_x = sp.tan(th / 2) * sp.cos(ph)
    iso_y = sp.tan(th / 2) * sp.sin(ph)
    fx, gx = sym.scalar(iso_x)
    fy, gy = sym.scalar(iso_y)

    def lebrun_point(x, y, z):
        t, p = _stereo(np.asarray(x, float), np.asarray(y, float))
        wz = w_of_z(z) + 0.0 * t
        return np.stack(np.broadcast_arrays(wz, 0.0 * wz, t, p), axis=-1)

    def reduction(z):
        wz = float(w_of_z(z))

        def embed(S):
            zero = 0.0 * S[..., 0]
            return np.stack([wz + zero, zero, S[..., 0], S[..., 1]], axis=-1)

        def jac(S):
            out = np.zeros(S.shape[:-1] + (2, 4))
            out[..., 0, 2] = 1.0
            out[..., 1, 3] = 1.0
            return out

        def locate(P):
            P = np.asarray(P, float)
            return np.stack([P[..., 2], np.mod(P[..., 3], TWO_PI)], axis=-1)

        return ReductionChart(z=z, embed=embed, jacobian=jac, locate=locate, domain=((0.0, math.pi), (0.0, TWO_PI)))

    def level_set(z):
        wz = float(w_of_z(z))

        def embed(T):
            zero = 0.0 * T[..., 0]
            return np.stack([wz + zero, T[..., 2], T[..., 0], T[..., 1]], axis=-1)

        return LevelSetChart(z=z, embed=embed, domain=((0.0, math.pi), (0.0, TWO_PI), (0.0, 4 * math.pi / k)))

    def lap_closed(z):
        z = np.asarray(z, float)
        return -2.0 * (-4.0 * z + m2) / (-2.0 * k * z + m2)

    def vol2(z):
        return math.pi * (-2.0 * k * np.asarray(z, float) + m2)

    def int_lap(z):
        return TWO_PI * (4.0 * np.asarray(z, float) - m2)

    def int_lap2(z):
        z = np.asarray(z, float)
        return 4.0 * math.pi * (-4.0 * z + m2) ** 2 / (-2.0 * k * z + m2)

    def int_ric2(z):
        z = np.asarray(z, float)
        return 16.0 * math.pi * m2**2 * (k - 2) ** 2 / (-2.0 * k * z + m2) ** 3

    def d_int_lap2(z):
        z = np.asarray(z, float)
        return 8.0 * math.pi * (-4.0 * z + m2) * (4.0 * k * z - (k - 4) * m2) / (-2.0 * k * z + m2) ** 2

    mz = sym.momentum
    return _from_symbolic(
        sym,
        name="lebrun_instanton",
        params={"k": k, "m": float(m)},
        coord_names=("w", "psi", "theta", "phi"),
        sampler=sampler,
        z_interval=(-math.inf, 0.0),
        topology={
            "level_set": f"L({k},1)",
            "reduced": "S2",
            "end": "minus",
            "compact_level_sets": True,
        },
        declared={
            "laplacian": lap_closed,
            "vol2": vol2,
            "int_lap": int_lap,
            "int_lap2": int_lap2,
            "int_ric2": int_ric2,
            "d_int_lap2": d_int_lap2,
            "dvol2": -TWO_PI * k,
            "vol3_of_w": lambda wv: (2.0 / k) * math.pi**2 * math.exp(-wv),
            "e_g": -float(k),
            "chi_g": 2.0,
        },
        laplacian_declared=lambda P: lap_closed(mz(P)),
        dt=dt,
        isothermal=lambda P: np.stack([fx(P), fy(P)], axis=-1),
        isothermal_grad=lambda P: np.stack([gx(P), gy(P)], axis=-2),
        lebrun_point=lebrun_point,
        reduction_chart=reduction,
        level_set_chart=level_set,
        notes=["ricci_flat"] if k == 2 else [],
    )


# ------------------------------------------------------------------------ S2 x H2

_S2H2_CASES = {
    # warping f(r2), momentum z2(r2), inverse r2(z2), |d/dtheta2|^2 as function of z2, regular z2 range
    "elliptic": (sp.sinh, sp.cosh, np.arccosh, lambda z: z * z - 1.0, (1.0, math.inf)),
    "parabolic": (sp.exp, sp.exp, np.log, lambda z: z * z, (0.0, math.inf)),
    "hyperbolic": (sp.cosh, sp.sinh, np.arcsinh, lambda z: z * z + 1.0, (-math.inf, math.inf)),
}


def s2_h2(case: str = "hyperbolic", field: str = "theta2") -> GeometryBundle:
    """Product of the unit sphere with a hyperbolic surface.

    Chart ``(r1, theta1, r2, theta2)`` with metric
    ``dr1^2 + sin^2 r1 dtheta1^2 + dr2^2 + f(r2)^2 dtheta2^2`` and ``f`` one of
    ``sinh`` (elliptic), ``exp`` (parabolic), ``cosh`` (hyperbolic).  ``field``
    picks ``V = d/dtheta1``, ``d/dtheta2`` or their sum (``combined``).
    """
    if case not in _S2H2_CASES:
        raise UnsupportedFamily(f"unknown case {case!r}")
    if field not in ("theta1", "theta2", "combined"):
        raise UnsupportedFamily(f"unknown field {field!r}")
    warp, mom, inv, vnorm2, zrange = _S2H2_CASES[case]
    r1, t1, r2, t2 = X = sp.symbols("r1 theta1 r2 theta2", real=True)
    f = warp(r2)
    g = sp.diag(1, sp.sin(r1) ** 2, 1, f**2)
    om = sp.sin(r1) * sp.Matrix(wedge1([1, 0, 0, 0], [0, 1, 0, 0])) + f * sp.Matrix(wedge1([0, 0, 1, 0], [0, 0, 0, 1]))
    z1 = -sp.cos(r1)
    z2 = mom(r2)
    V, z = {
        "theta1": ([0, 1, 0, 0], z1),
        "theta2": ([0, 0, 0, 1], z2),
        "combined": ([0, 1, 0, 1], z1 + z2),
    }[field]
    sym = SymbolicGeometry(X, g, om, V, z)
    r2_lo = 0.1 if case == "elliptic" else -1.5

    def sampler(rng, n):
        return np.stack(
            [rng.uniform(0.2, math.pi - 0.2, n), rng.uniform(0, TWO_PI, n), rng.uniform(r2_lo, 1.5, n), rng.uniform(0, TWO_PI, n)],
            axis=-1,
        )

    def dt(P):
        out = np.zeros(np.shape(P))
        out[..., 3 if field == "theta2" else 1] = 1.0
        return out

    def z2_of(P):
        r = np.asarray(P, float)[..., 2]
        return {"elliptic": np.cosh, "parabolic": np.exp, "hyperbolic": np.sinh}[case](r)

    def lap_decl(P):
        P = np.asarray(P, float)
        return {
            "theta1": 2.0 * np.cos(P[..., 0]),
            "theta2": 2.0 * z2_of(P),
            "combined": 2.0 * np.cos(P[..., 0]) + 2.0 * z2_of(P),
        }[field]

    kw = {}
    declared = {}
    if field == "theta2":
        z_interval = zrange
        fx, gx = sym.scalar(sp.tan(r1 / 2) * sp.cos(t1))
        fy, gy = sym.scalar(sp.tan(r1 / 2) * sp.sin(t1))

        def lebrun_point(x, y, z):
            a, b = _stereo(np.asarray(x, float), np.asarray(y, float))
            rz = inv(np.asarray(z, float)) + 0.0 * a
            return np.stack(np.broadcast_arrays(a, b, rz, 0.0 * rz), axis=-1)

        def reduction(z):
            rz = float(inv(z))

            def embed(S):
                zero = 0.0 * S[..., 0]
                return np.stack([S[..., 0], S[..., 1], rz + zero, zero], axis=-1)

            def jac(S):
                out = np.zeros(S.shape[:-1] + (2, 4))
                out[..., 0, 0] = 1.0
                out[..., 1, 1] = 1.0
                return out

            def locate(P):
                P = np.asarray(P, float)
                return np.stack([P[..., 0], np.mod(P[..., 1], TWO_PI)], axis=-1)

            return ReductionChart(z=z, embed=embed, jacobian=jac, locate=locate, domain=((0.0, math.pi), (0.0, TWO_PI)))

        def level_set(z):
            rz = float(inv(z))

            def embed(T):
                zero = 0.0 * T[..., 0]
                return np.stack([T[..., 0], T[..., 1], rz + zero, T[..., 2]], axis=-1)

            return LevelSetChart(z=z, embed=embed, domain=((0.0, math.pi), (0.0, TWO_PI), (0.0, TWO_PI)))

        kw.update(
            isothermal=lambda P: np.stack([fx(P), fy(P)], axis=-1),
            isothermal_grad=lambda P: np.stack([gx(P), gy(P)], axis=-2),
            lebrun_point=lebrun_point,
            reduction_chart=reduction,
            level_set_chart=level_set,
        )
        declared.update(
            laplacian=lambda z: 2.0 * np.asarray(z, float),
            vol2=lambda z: 4.0 * math.pi + 0.0 * np.asarray(z, float),
            int_v2=lambda z: 4.0 * math.pi * vnorm2(np.asarray(z, float)),
            int_lap=lambda z: 8.0 * math.pi * np.asarray(z, float),
            int_lap2=lambda z: 16.0 * math.pi * np.asarray(z, float) ** 2,
            int_ric2=lambda z: 16.0 * math.pi + 0.0 * np.asarray(z, float),
            e_g=0.0,
            chi_g=2.0,
        )
        topo = {"level_set": "S2 x S1", "reduced": "S2", "compact_level_sets": True}
        topo["end"] = "both" if case == "hyperbolic" else "plus"
    elif field == "combined" and case == "hyperbolic":
        z_interval = (-math.inf, math.inf)

        def reduction(z):
            def embed(S):
                r = S[..., 0]
                return np.stack([r, S[..., 1], np.arcsinh(z + np.cos(r)), 0.0 * r], axis=-1)

            def jac(S):
                r = S[..., 0]
                out = np.zeros(S.shape[:-1] + (2, 4))
                out[..., 0, 0] = 1.0
                out[..., 0, 2] = -np.sin(r) / np.sqrt(1.0 + (z + np.cos(r)) ** 2)
                out[..., 1, 1] = 1.0
                return out

            def locate(P):
                # flow along V back to theta2 = 0
                P = np.asarray(P, float)
                return np.stack([P[..., 0], np.mod(P[..., 1] - P[..., 3], TWO_PI)], axis=-1)

            return ReductionChart(z=z, embed=embed, jacobian=jac, locate=locate, domain=((0.0, math.pi), (0.0, TWO_PI)))

        def level_set(z):
            def embed(T):
                r = T[..., 0]
                return np.stack([r, T[..., 1], np.arcsinh(z + np.cos(r)), T[..., 2]], axis=-1)

            return LevelSetChart(z=z, embed=embed, domain=((0.0, math.pi), (0.0, TWO_PI), (0.0, TWO_PI)))

        kw.update(reduction_chart=reduction, level_set_chart=level_set)
        topo = {"level_set": "S2 x S1", "reduced": "S2", "compact_level_sets": True, "end": "both"}
    else:
        z_interval = (-1.0, 1.0) if field == "theta1" else (-math.inf, math.inf)
        topo = {"level_set": "non-compact", "reduced": "non-compact", "compact_level_sets": False, "end": "both"}

    return _from_symbolic(
        sym,
        name="s2_h2",
        params={"case": case, "field": field},
        coord_names=("r1", "theta1", "r2", "theta2"),
        sampler=sampler,
        z_interval=z_interval,
        topology=topo,
        declared=declared,
        laplacian_declared=lap_decl,
        dt=dt,
        **kw,
    )


# ------------------------------------------------------------------- LeBrun data


def from_lebrun_data(u="0", w="1", alpha=("0", "0", "0")) -> GeometryBundle:
    """Metric ``w e^u (dx^2 + dy^2) + w dz^2 + w^{-1} (dt + alpha)^2``.

    ``u``, ``w`` and the three components of ``alpha`` (along dx, dy, dz) are
    sympy-parsable expressions in ``x, y, z``.  Nothing is assumed about them:
    whether the result is Kahler or scalar-flat is for the checks to decide.
    """
    x, y, zz, t = X = sp.symbols("x y z t", real=True)
    loc = {"x": x, "y": y, "z": zz}
    U = sp.sympify(u, locals=loc)
    W = sp.sympify(w, locals=loc)
    A = [sp.sympify(a, locals=loc) for a in alpha] + [0]
    theta = [A[0], A[1], A[2], 1]
    g = W * sp.exp(U) * sp.diag(1, 1, 0, 0) + W * sp.diag(0, 0, 1, 0) + sp.Matrix(outer1(theta, theta)) / W
    om = sp.Matrix(wedge1([0, 0, 1, 0], theta)) + W * sp.exp(U) * sp.Matrix(wedge1([1, 0, 0, 0], [0, 1, 0, 0]))
    sym = SymbolicGeometry(X, g, om, [0, 0, 0, 1], zz)
    ue, ugrad = sym.scalar(U)
    we, wgrad = sym.scalar(W)

    def sampler(rng, n):
        return np.stack([rng.uniform(-0.8, 0.8, n), rng.uniform(-0.8, 0.8, n), rng.uniform(-0.8, 0.8, n), rng.uniform(0, TWO_PI, n)], axis=-1)

    def dt(P):
        out = np.zeros(np.shape(P))
        out[..., 3] = 1.0
        return out

    def isothermal(P):
        P = np.asarray(P, float)
        return P[..., :2].copy()

    def isothermal_grad(P):
        out = np.zeros(np.shape(P)[:-1] + (2, 4))
        out[..., 0, 0] = 1.0
        out[..., 1, 1] = 1.0
        return out

    def lebrun_point(xv, yv, zv):
        xv, yv, zv = np.broadcast_arrays(*(np.asarray(v, float) for v in (xv, yv, zv)))
        return np.stack([xv, yv, zv, 0.0 * xv], axis=-1)

    bundle = _from_symbolic(
        sym,
        name="from_lebrun_data",
        params={"u": str(u), "w": str(w), "alpha": ",".join(str(a) for a in alpha)},
        coord_names=("x", "y", "z", "t"),
        sampler=sampler,
        z_interval=(-math.inf, math.inf),
        topology={"level_set": "local", "reduced": "local", "compact_level_sets": False, "end": "both"},
        dt=dt,
        isothermal=isothermal,
        isothermal_grad=isothermal_grad,
        lebrun_point=lebrun_point,
    )
    bundle.declared.update(u=ue, w=we, u_grad=ugrad, w_grad=wgrad)
    return bundle


def instanton_lebrun_data(k: int, m: float) -> tuple:
    """``(u, w, alpha)`` expressions for the instanton in isothermal coordinates.

    With ``rho^2 = x^2 + y^2`` and ``B = m^2 - 2kz``: ``e^u = B^2 F / (k^2 (1 +
    rho^2)^2)``, ``w = k^2 / (B F)`` where ``F = 1 + (k-2) m^2 / B - (k-1) m^4 /
    B^2``, and ``alpha`` solves ``d alpha = (w e^u)_z dx ^ dy``.
    """
    m2 = sp.nsimplify(m) ** 2
    x, y, z = sp.symbols("x y z", real=True)
    B = m2 - 2 * k * z
    F = 1 + (k - 2) * m2 / B - (k - 1) * m2**2 / B**2
    rho2 = x**2 + y**2
    u = sp.log(B**2 * F / k**2) - 2 * sp.log(1 + rho2)
    w = k**2 / (B * F)
    alpha = (k * y / (1 + rho2), -k * x / (1 + rho2), 0)
    return str(u), str(w), tuple(str(a) for a in alpha)


_BUILDERS = {
    "flat_c2": flat_c2,
    "lebrun_instanton": lebrun_instanton,
    "s2_h2": s2_h2,
    "from_lebrun_data": from_lebrun_data,
}


def build_family(name: str, **params) -> GeometryBundle:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnsupportedFamily(f"unknown family {name!r}") from None
    return builder(**params)
