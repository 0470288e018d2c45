"""Quotients of momentum level sets and integration over them.

A level set ``M3_z = {z = const}`` is a circle bundle over the surface
``M2_z = M3_z / V``.  A :class:`ReductionChart` is a section of that bundle
over a parameter rectangle, defined off a measure-zero set; the quotient
metric is the pull-back of ``g`` with the ``V`` direction projected out, so it
does not depend on which section is used.

Sphere-type parameter domains ``(theta, phi)`` are integrated with
Gauss-Legendre nodes in ``cos(theta)`` so that the polar ``sin(theta)`` factor
of the area density is absorbed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kahler
from .curvature import curvature_at, sectional
from .forms import check_metric, top_arrays, wedge_arrays

DEFAULT_ORDER = 32
TWO_PI = 2.0 * math.pi
# steps for differencing the quotient metric in the parameter plane
_H_STEP = 1e-3
_STENCIL = ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))
_STENCIL2 = ((-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0), (1, 16.0 / 12.0), (2, -1.0 / 12.0))


class QuadratureError(ArithmeticError):
    pass


@dataclass
class ReductionChart:
    z: float
    embed: Callable[[np.ndarray], np.ndarray]
    domain: tuple
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    locate: Optional[Callable[[np.ndarray], np.ndarray]] = None
    polar: bool = True

    def tangents(self, S) -> np.ndarray:
        """``[..., a, i] = d embed_i / d s_a``."""
        S = np.asarray(S, float)
        if self.jacobian is not None:
            return self.jacobian(S)
        rows = []
        for a in range(2):
            h = 1e-5 * max(1.0, abs(self.domain[a][1]))
            acc = 0.0
            for off, wgt in _STENCIL:
                T = S.copy()
                T[..., a] += off * h
                acc = acc + wgt * self.embed(T)
            rows.append(acc / h)
        return np.stack(rows, axis=-2)


@dataclass
class LevelSetChart:
    """Parametrisation of a whole level set by ``(theta, a, b)``."""

    z: float
    embed: Callable[[np.ndarray], np.ndarray]
    domain: tuple


@dataclass
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    order: int


def _legendre(order: int, lo: float, hi: float):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def quadrature_rule(domain, order: int = DEFAULT_ORDER, polar: bool = True) -> QuadratureRule:
    """Tensor Gauss-Legendre rule; the first axis is polar when ``polar``."""
    axes = []
    for i, (lo, hi) in enumerate(domain):
        if i == 0 and polar:
            u, wu = _legendre(order, math.cos(hi), math.cos(lo))
            th = np.arccos(u)
            axes.append((th, wu / np.sin(th)))
        else:
            axes.append(_legendre(order, lo, hi))
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([w.ravel() for w in wgrids], axis=-1), axis=-1)
    return QuadratureRule(nodes=nodes, weights=weights, order=order)


def _check_on_level(bundle, P, z):
    zz = bundle.momentum(P)
    err = np.max(np.abs(zz - z))
    if err > 1e-9 * max(1.0, abs(z)):
        raise QuadratureError(f"chart leaves the level set z={z} (max error {err:.2e})")


def reduced_metric(bundle, chart: ReductionChart, S) -> np.ndarray:
    """Quotient metric ``h_ab = g(e_a, e_b) - g(e_a, V) g(e_b, V) / |V|^2``."""
    S = np.asarray(S, float)
    P = chart.embed(S)
    E = chart.tangents(S)
    g = kahler.metric(bundle, P)
    V = bundle.killing(P)
    gee = np.einsum("...ai,...ij,...bj->...ab", E, g, E)
    gev = np.einsum("...ai,...ij,...j->...a", E, g, V)
    vv = np.einsum("...i,...ij,...j->...", V, g, V)
    return gee - np.einsum("...a,...b->...ab", gev, gev) / vv[..., None, None]


def area_density(bundle, chart: ReductionChart, S) -> np.ndarray:
    h = reduced_metric(bundle, chart, S)
    return np.sqrt(h[..., 0, 0] * h[..., 1, 1] - h[..., 0, 1] ** 2)


def _integrate(bundle, chart: ReductionChart, integrand, order: int) -> float:
    rule = quadrature_rule(chart.domain, order, chart.polar)
    P = chart.embed(rule.nodes)
    _check_on_level(bundle, P, chart.z)
    vals = np.asarray(integrand(P), float) * area_density(bundle, chart, rule.nodes) * rule.weights
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("non-finite integrand on the quotient")
    return math.fsum(vals.tolist())


def integrate_reduced(bundle, z: float, integrand=None, order: int = DEFAULT_ORDER, check: bool = False, rtol: float = 1e-8) -> float:
    """``int_{M2_z} f dVol2`` for a V-invariant ``f`` given on M^4.

    ``integrand`` maps points ``(N, 4)`` to values ``(N,)``; ``None`` gives the
    area.  With ``check`` the result is compared against half the order.
    """
    chart = bundle.reduction(z)
    f = integrand if integrand is not None else (lambda P: np.ones(P.shape[:-1]))
    val = _integrate(bundle, chart, f, order)
    if check:
        coarse = _integrate(bundle, chart, f, max(order // 2, 4))
        if abs(val - coarse) > rtol * max(abs(val), 1.0):
            raise QuadratureError(f"quadrature not converged at z={z}: {val!r} vs {coarse!r}")
    return val


def integrate_level_set(bundle, z: float, integrand=None, order: int = 24) -> float:
    """``int_{M3_z} f dVol3`` over a full parametrisation of the level set."""
    chart = bundle.level_set(z)
    rule = quadrature_rule(chart.domain, order, polar=True)
    P = chart.embed(rule.nodes)
    _check_on_level(bundle, P, z)
    rows = []
    for a in range(3):
        h = 1e-5
        acc = 0.0
        for off, wgt in _STENCIL:
            T = rule.nodes.copy()
            T[:, a] += off * h
            acc = acc + wgt * chart.embed(T)
        rows.append(acc / h)
    E = np.stack(rows, axis=-2)
    g = kahler.metric(bundle, P)
    gram = np.einsum("...ai,...ij,...bj->...ab", E, g, E)
    dens = np.sqrt(np.abs(np.linalg.det(gram)))
    f = integrand(P) if integrand is not None else np.ones(len(P))
    return math.fsum((np.asarray(f, float) * dens * rule.weights).tolist())


def gauss_curvature(bundle, P) -> np.ndarray:
    """Curvature of ``M2_z`` at the image of ``P``, computed on M^4.

    For the orthonormal horizontal pair ``X, JX`` this is the ambient sectional
    curvature, plus the Gauss term of ``M3_z`` (second fundamental form
    ``Hess z / |grad z|``), plus the submersion term ``3/4 dV_flat(X, JX)^2 / |V|^2``.
    """
    P = np.asarray(P, float)
    data = curvature_at(bundle.metric, P, kahler.orientation(bundle, P))
    X, Y = kahler.horizontal_pair(bundle, P)
    sec = sectional(data, X, Y)
    H = kahler.hessian_z(bundle, P)
    hxx = np.einsum("...i,...ij,...j->...", X, H, X)
    hyy = np.einsum("...i,...ij,...j->...", Y, H, Y)
    hxy = np.einsum("...i,...ij,...j->...", X, H, Y)
    gauss = (hxx * hyy - hxy * hxy) / kahler.grad_z_norm2(bundle, P)
    dv = np.einsum("...i,...ij,...j->...", X, kahler.dv_flat(bundle, P), Y)
    return sec + gauss + 0.75 * dv * dv / kahler.v_norm2(bundle, P)


def gauss_curvature_intrinsic(bundle, chart: ReductionChart, S, step: float = _H_STEP) -> np.ndarray:
    """Curvature of the quotient metric from its own derivatives (Brioschi)."""
    S = np.asarray(S, float)

    def h_at(T):
        return reduced_metric(bundle, chart, T)

    def shifted(a, off):
        T = S.copy()
        T[..., a] += off * step
        return T

    d1 = []
    for a in range(2):
        d1.append(sum(w * h_at(shifted(a, o)) for o, w in _STENCIL) / step)
    h0 = h_at(S)
    d2 = {}
    for a in range(2):
        d2[(a, a)] = sum(w * (h0 if o == 0 else h_at(shifted(a, o))) for o, w in _STENCIL2) / step**2
    acc = 0.0
    for o1, w1 in _STENCIL:
        for o2, w2 in _STENCIL:
            T = S.copy()
            T[..., 0] += o1 * step
            T[..., 1] += o2 * step
            acc = acc + w1 * w2 * h_at(T)
    d2[(0, 1)] = acc / step**2
    E, F, G = h0[..., 0, 0], h0[..., 0, 1], h0[..., 1, 1]
    Eu, Fu, Gu = d1[0][..., 0, 0], d1[0][..., 0, 1], d1[0][..., 1, 1]
    Ev, Fv, Gv = d1[1][..., 0, 0], d1[1][..., 0, 1], d1[1][..., 1, 1]
    Evv = d2[(1, 1)][..., 0, 0]
    Guu = d2[(0, 0)][..., 1, 1]
    Fuv = d2[(0, 1)][..., 0, 1]
    m1 = np.stack(
        [
            np.stack([-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev], axis=-1),
            np.stack([Fv - 0.5 * Gu, E, F], axis=-1),
            np.stack([0.5 * Gv, F, G], axis=-1),
        ],
        axis=-2,
    )
    zero = 0.0 * E
    m2 = np.stack(
        [
            np.stack([zero, 0.5 * Ev, 0.5 * Gu], axis=-1),
            np.stack([0.5 * Ev, E, F], axis=-1),
            np.stack([0.5 * Gu, F, G], axis=-1),
        ],
        axis=-2,
    )
    return (np.linalg.det(m1) - np.linalg.det(m2)) / (E * G - F * F) ** 2


def chi_g(bundle, z: float, order: int = DEFAULT_ORDER) -> float:
    """Gauss-Bonnet number ``(1/2pi) int K dVol2`` of the quotient."""
    return integrate_reduced(bundle, z, lambda P: gauss_curvature(bundle, P), order) / TWO_PI


def chern_simons_density(bundle, P) -> np.ndarray:
    """``c`` with ``V_flat ^ dV_flat = c dVol3`` on the level set through ``P``."""
    P = np.asarray(P, float)
    vf = kahler.v_flat(bundle, P)
    three = wedge_arrays(vf, kahler.dv_flat(bundle, P), 1, 2)
    nflat = np.einsum("...ij,...j->...i", kahler.metric(bundle, P), kahler.unit_normal(bundle, P))
    return top_arrays(wedge_arrays(nflat, three, 1, 3)) / top_arrays(kahler.dvol4(bundle, P))


def e_g(bundle, z: float, order: int = DEFAULT_ORDER) -> float:
    """Euler number of the circle bundle ``M3_z -> M2_z``.

    ``(1 / 4 pi^2) int_{M3} |V|^{-4} V_flat ^ dV_flat``, reduced to the quotient
    with one factor ``2 pi |V|`` from the circle fibres.
    """

    def integrand(P):
        return chern_simons_density(bundle, P) * kahler.v_norm2(bundle, P) ** -1.5

    return integrate_reduced(bundle, z, integrand, order) / TWO_PI


def vol2(bundle, z: float, order: int = DEFAULT_ORDER) -> float:
    return integrate_reduced(bundle, z, None, order)
