"""Riemannian curvature of a chart metric, vectorised over batches of points.

Sign convention: ``Rm(X, Y, Z, W) = g(R(X, Y) Z, W)`` with
``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``, so the sectional curvature of
the plane ``X ^ Y`` is ``Rm(X, Y, Y, X)`` and the round sphere is positive.
All norms are full tensor contractions, ``|T|^2 = T_{ijkl} T^{ijkl}``.

Self-dual blocks are 4-tensors obtained by projecting both index pairs with
``Pi(+-) = (Id +- *) / 2`` acting on 2-forms.  Two-forms act on 2-forms by
``T(zeta)_{ij} = 1/2 T_{ijst} zeta^{ts}``; under that rule the identity of
``Lambda^+`` is the tensor ``-2 Pi+``, which is what the Weyl parts subtract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .forms import DIM, check_metric, levi_civita

_EPS = levi_civita()

# fourth-order first-derivative stencil, reused for the nested second derivatives
_STENCIL = ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))
_STENCIL2 = ((-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0), (1, 16.0 / 12.0), (2, -1.0 / 12.0))

FIRST_STEP = 1e-5
SECOND_STEP = 1e-4


@dataclass
class MetricField:
    """Metric components on a chart, with optional analytic derivatives.

    ``metric(P)`` maps an array of points ``(..., 4)`` to ``(..., 4, 4)``.
    ``dmetric`` returns ``[..., k, i, j] = d_k g_ij`` and ``d2metric`` returns
    ``[..., k, l, i, j] = d_k d_l g_ij``.  Missing derivatives are filled in by
    central differences.
    """

    metric: Callable[[np.ndarray], np.ndarray]
    dmetric: Optional[Callable[[np.ndarray], np.ndarray]] = None
    d2metric: Optional[Callable[[np.ndarray], np.ndarray]] = None
    first_step: float = FIRST_STEP
    second_step: float = SECOND_STEP

    def g(self, P) -> np.ndarray:
        return np.asarray(self.metric(np.asarray(P, float)), float)

    def dg(self, P) -> np.ndarray:
        P = np.asarray(P, float)
        if self.dmetric is not None:
            return np.asarray(self.dmetric(P), float)
        return fd_first(self.metric, P, self.first_step)

    def d2g(self, P) -> np.ndarray:
        P = np.asarray(P, float)
        if self.d2metric is not None:
            return np.asarray(self.d2metric(P), float)
        return fd_second(self.metric, P, self.second_step)

    def numeric(self) -> "MetricField":
        """The same metric with every derivative taken by finite differences."""
        return MetricField(self.metric, None, None, self.first_step, self.second_step)

    @property
    def analytic(self) -> bool:
        return self.dmetric is not None and self.d2metric is not None


def _shift(P: np.ndarray, i: int, amount: np.ndarray) -> np.ndarray:
    Q = P.copy()
    Q[..., i] += amount
    return Q


def _scale(P: np.ndarray, step: float) -> np.ndarray:
    return step * np.maximum(1.0, np.abs(P))


def fd_first(func, P: np.ndarray, step: float = FIRST_STEP) -> np.ndarray:
    """``[..., k, *out] = d_k func`` by fourth-order central differences."""
    P = np.asarray(P, float)
    hs = _scale(P, step)
    rows = []
    for i in range(DIM):
        h = hs[..., i]
        acc = 0.0
        for off, wgt in _STENCIL:
            acc = acc + wgt * np.asarray(func(_shift(P, i, off * h)), float)
        out_nd = np.ndim(acc) - np.ndim(h)
        rows.append(acc / h.reshape(h.shape + (1,) * out_nd))
    return np.stack(rows, axis=P.ndim - 1)


def fd_second(func, P: np.ndarray, step: float = SECOND_STEP) -> np.ndarray:
    """``[..., k, l, *out] = d_k d_l func`` by nested central differences."""
    P = np.asarray(P, float)
    hs = _scale(P, step)
    base = np.asarray(func(P), float)
    out_nd = base.ndim - (P.ndim - 1)
    res = np.zeros(P.shape[:-1] + (DIM, DIM) + base.shape[P.ndim - 1 :])

    lead = (slice(None),) * (P.ndim - 1)

    def bc(h):
        return h.reshape(h.shape + (1,) * out_nd)

    for k in range(DIM):
        hk = hs[..., k]
        acc = 0.0
        for off, wgt in _STENCIL2:
            val = base if off == 0 else np.asarray(func(_shift(P, k, off * hk)), float)
            acc = acc + wgt * val
        res[lead + (k, k)] = acc / bc(hk * hk)
        for l in range(k + 1, DIM):
            hl = hs[..., l]
            acc = 0.0
            for ok, wk in _STENCIL:
                Pk = _shift(P, k, ok * hk)
                for ol, wl in _STENCIL:
                    acc = acc + wk * wl * np.asarray(func(_shift(Pk, l, ol * hl)), float)
            val = acc / bc(hk * hl)
            res[lead + (k, l)] = val
            res[lead + (l, k)] = val
    return res


def christoffel(g, dg, ginv=None) -> np.ndarray:
    """``[..., l, i, j] = Gamma^l_ij``."""
    if ginv is None:
        ginv = check_metric(g)
    lower = 0.5 * (np.einsum("...ijs->...ijs", dg) + np.einsum("...jis->...ijs", dg) - np.einsum("...sij->...ijs", dg))
    return np.einsum("...ls,...ijs->...lij", ginv, lower, optimize=True)


def christoffel_derivative(g, dg, d2g, ginv=None) -> np.ndarray:
    """``[..., k, l, i, j] = d_k Gamma^l_ij``."""
    if ginv is None:
        ginv = check_metric(g)
    lower = 0.5 * (np.einsum("...ijs->...ijs", dg) + np.einsum("...jis->...ijs", dg) - np.einsum("...sij->...ijs", dg))
    dlower = 0.5 * (
        np.einsum("...kijs->...kijs", d2g) + np.einsum("...kjis->...kijs", d2g) - np.einsum("...ksij->...kijs", d2g)
    )
    dginv = -np.einsum("...la,...kab,...bs->...kls", ginv, dg, ginv, optimize=True)
    return np.einsum("...kls,...ijs->...klij", dginv, lower, optimize=True) + np.einsum("...ls,...kijs->...klij", ginv, dlower, optimize=True)


def riemann(g, dg, d2g, ginv=None) -> np.ndarray:
    """Fully covariant ``Rm_ijkl = g(R(d_i, d_j) d_k, d_l)``."""
    if ginv is None:
        ginv = check_metric(g)
    gam = christoffel(g, dg, ginv)
    dgam = christoffel_derivative(g, dg, d2g, ginv)
    up = (
        np.einsum("...iljk->...lijk", dgam)
        - np.einsum("...jlik->...lijk", dgam)
        + np.einsum("...lim,...mjk->...lijk", gam, gam, optimize=True)
        - np.einsum("...ljm,...mik->...lijk", gam, gam, optimize=True)
    )
    return np.einsum("...lm,...mijk->...ijkl", g, up, optimize=True)


def _full_norm2(T, ginv) -> np.ndarray:
    return np.einsum("...ijkl,...ia,...jb,...kc,...ld,...abcd->...", T, ginv, ginv, ginv, ginv, T, optimize=True)


def pair_projectors(g, orientation, ginv=None):
    """Mixed tensors ``Pi(+-)_ij^ab`` acting on antisymmetric index pairs."""
    if ginv is None:
        ginv = check_metric(g)
    vol = np.asarray(orientation, float) * np.sqrt(np.abs(np.linalg.det(g)))
    eps_low = vol[(...,) + (None,) * 4] * _EPS
    eps_mixed = np.einsum("...ijcd,...ca,...db->...ijab", eps_low, ginv, ginv, optimize=True)
    eye = np.eye(DIM)
    ident = 0.5 * (np.einsum("ia,jb->ijab", eye, eye, optimize=True) - np.einsum("ib,ja->ijab", eye, eye, optimize=True))
    ident = np.broadcast_to(ident, eps_mixed.shape)
    return 0.5 * (ident + 0.5 * eps_mixed), 0.5 * (ident - 0.5 * eps_mixed)


@dataclass
class CurvatureData:
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray
    ric_norm2: np.ndarray
    rm_norm2: np.ndarray
    traceless_ric_norm2: np.ndarray
    weyl_plus_norm2: np.ndarray
    weyl_minus_norm2: np.ndarray
    blocks: dict = field(default_factory=dict)
    projectors: tuple = ()
    metric: np.ndarray | None = None


def curvature_at(metric: MetricField, P, orientation=1.0) -> CurvatureData:
    """Curvature quantities at a point or batch of points."""
    P = np.asarray(P, float)
    g = metric.g(P)
    ginv = check_metric(g)
    rm = riemann(g, metric.dg(P), metric.d2g(P), ginv)
    ric = np.einsum("...il,...ijkl->...jk", ginv, rm, optimize=True)
    s = np.einsum("...jk,...jk->...", ginv, ric, optimize=True)
    ric_up = np.einsum("...ja,...kb,...ab->...jk", ginv, ginv, ric, optimize=True)
    ric2 = np.einsum("...jk,...jk->...", ric, ric_up, optimize=True)
    rm2 = _full_norm2(rm, ginv)
    pplus, pminus = pair_projectors(g, orientation, ginv)
    blocks = {}
    for a, pa in (("+", pplus), ("-", pminus)):
        for b, pb in (("+", pplus), ("-", pminus)):
            blocks[a + b] = np.einsum("...ijab,...abcd,...klcd->...ijkl", pa, rm, pb, optimize=True)
    def lowered(p):
        return np.einsum("...ijab,...ka,...lb->...ijkl", p, g, g, optimize=True)

    wp = blocks["++"] + (s / 6.0)[(...,) + (None,) * 4] * lowered(pplus)
    wm = blocks["--"] + (s / 6.0)[(...,) + (None,) * 4] * lowered(pminus)
    return CurvatureData(
        riemann=rm,
        ricci=ric,
        scalar=s,
        ric_norm2=ric2,
        rm_norm2=rm2,
        traceless_ric_norm2=ric2 - s * s / DIM,
        weyl_plus_norm2=_full_norm2(wp, ginv),
        weyl_minus_norm2=_full_norm2(wm, ginv),
        blocks=blocks,
        projectors=(pplus, pminus),
        metric=g,
    )


def kahler_curvature_checks(data: CurvatureData, omega) -> dict:
    """Residuals of the Kahler constraints on the self-dual block.

    ``block``: ``|Rm^{++} + (s/8) omega (x) omega| / max(|Rm^{++}|, |s|, 1e-12)``
    ``norm``: ``| |Rm^{++}|^2 - s^2/4 | / max(s^2/4, 1e-12)``
    """
    g = data.metric
    ginv = check_metric(g)
    omega = np.asarray(omega, float)
    s = data.scalar
    target = -(s / 8.0)[(...,) + (None,) * 4] * np.einsum("...ij,...kl->...ijkl", omega, omega, optimize=True)
    diff = data.blocks["++"] - target
    dn = np.sqrt(np.abs(_full_norm2(diff, ginv)))
    bn = np.sqrt(np.abs(_full_norm2(data.blocks["++"], ginv)))
    pp2 = _full_norm2(data.blocks["++"], ginv)
    return {
        "block": dn / np.maximum(np.maximum(bn, np.abs(s)), 1e-12),
        "norm": np.abs(pp2 - s * s / 4.0) / np.maximum(s * s / 4.0, 1e-12),
        "rm_pp_norm2": pp2,
    }


def sectional(data: CurvatureData, X, Y) -> np.ndarray:
    """Sectional curvature of the plane spanned by ``X`` and ``Y``."""
    g = data.metric
    num = np.einsum("...ijkl,...i,...j,...k,...l->...", data.riemann, X, Y, Y, X, optimize=True)
    gxx = np.einsum("...ij,...i,...j->...", g, X, X, optimize=True)
    gyy = np.einsum("...ij,...i,...j->...", g, Y, Y, optimize=True)
    gxy = np.einsum("...ij,...i,...j->...", g, X, Y, optimize=True)
    return num / (gxx * gyy - gxy * gxy)
