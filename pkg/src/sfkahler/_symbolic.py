"""Turn symbolic chart data into batched numpy evaluators."""

from __future__ import annotations

import numpy as np
import sympy as sp


class Evaluator:
    """Lambdified array of expressions, broadcast over a batch of points."""

    def __init__(self, exprs, symbols, shape=()):
        flat = list(sp.Array(exprs).reshape(int(np.prod(shape, dtype=int)) or 1)) if shape else [sp.sympify(exprs)]
        self.shape = tuple(shape)
        self._fn = sp.lambdify(symbols, flat, modules="numpy")

    def __call__(self, P) -> np.ndarray:
        P = np.asarray(P, float)
        batch = P.shape[:-1]
        vals = self._fn(*np.moveaxis(P, -1, 0))
        out = np.stack([np.broadcast_to(np.asarray(v, float), batch) for v in vals], axis=-1)
        return out.reshape(batch + self.shape)


class SymbolicGeometry:
    """Derivatives of metric, Kahler form, Killing field and momentum.

    Everything is differentiated symbolically once and evaluated numerically
    afterwards, so the evaluators are exact up to rounding.
    """

    def __init__(self, coords, metric, omega, killing, momentum):
        self.coords = list(coords)
        n = len(self.coords)
        g = sp.Matrix(metric)
        om = sp.Matrix(omega)
        V = sp.Matrix(killing)
        z = sp.sympify(momentum)
        X = self.coords

        dg = [[[sp.diff(g[i, j], X[k]) for j in range(n)] for i in range(n)] for k in range(n)]
        d2g = [[[[sp.diff(dg[k][i][j], X[l]) for j in range(n)] for i in range(n)] for l in range(n)] for k in range(n)]
        vflat = g * V
        dvflat = [[sp.diff(vflat[j], X[i]) - sp.diff(vflat[i], X[j]) for j in range(n)] for i in range(n)]
        vnorm2 = (V.T * g * V)[0, 0]
        dz = [sp.diff(z, x) for x in X]
        ddz = [[sp.diff(dz[j], X[i]) for j in range(n)] for i in range(n)]
        dV = [[sp.diff(V[j], X[i]) for j in range(n)] for i in range(n)]

        self.metric = Evaluator(g.tolist(), X, (n, n))
        self.dmetric = Evaluator(dg, X, (n, n, n))
        self.d2metric = Evaluator(d2g, X, (n, n, n, n))
        self.omega = Evaluator(om.tolist(), X, (n, n))
        self.killing = Evaluator(list(V), X, (n,))
        self.killing_jacobian = Evaluator(dV, X, (n, n))
        self.momentum = Evaluator(z, X)
        self.momentum_grad = Evaluator(dz, X, (n,))
        self.momentum_hess = Evaluator(ddz, X, (n, n))
        self.dv_flat = Evaluator(dvflat, X, (n, n))
        self.v_norm2_grad = Evaluator([sp.diff(vnorm2, x) for x in X], X, (n,))

    def scalar(self, expr):
        """Evaluator plus gradient evaluator of an extra scalar function."""
        expr = sp.sympify(expr)
        return Evaluator(expr, self.coords), Evaluator([sp.diff(expr, x) for x in self.coords], self.coords, (len(self.coords),))


def wedge1(a, b):
    """Components of the wedge of two symbolic 1-forms."""
    n = len(a)
    return [[a[i] * b[j] - a[j] * b[i] for j in range(n)] for i in range(n)]


def outer1(a, b):
    n = len(a)
    return [[a[i] * b[j] for j in range(n)] for i in range(n)]
