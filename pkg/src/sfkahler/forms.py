"""Dense exterior algebra on a four-dimensional coordinate chart.

A k-form is stored as a fully antisymmetric array with k trailing axes of
length 4, so ``dx^0 ^ dx^1`` has components ``a[0, 1] = 1`` and
``a[1, 0] = -1``.  The ``*_arrays`` helpers accept arbitrary leading batch
axes; the :class:`FormValue` API wraps single points.

Conventions
-----------
* ``a = (1/k!) a_{i1..ik} dx^i1 ^ ... ^ dx^ik``
* ``(a ^ b) = ((k+l)! / (k! l!)) Alt(a (x) b)``
* ``|a|^2 = (1/k!) a_{I} a^{I}``
* ``(*a)_{J} = (1/k!) a^{I} eps_{I J}`` with ``eps_{0123} = orientation * sqrt(det g)``
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "DIM",
    "COND_LIMIT",
    "ShapeError",
    "DegreeError",
    "SingularMetricError",
    "NonFiniteError",
    "Point",
    "FormValue",
    "VectorValue",
    "FormField",
    "as_coords",
    "check_metric",
    "antisymmetrize",
    "wedge_arrays",
    "interior_arrays",
    "hodge_arrays",
    "norm2_arrays",
    "top_arrays",
    "levi_civita",
    "raise_indices",
    "wedge",
    "interior",
    "hodge",
    "sharp",
    "flat",
    "form_norm",
    "exterior_derivative",
    "gradient",
    "derivative_stencil",
    "exterior_derivative_batch",
]

DIM = 4
COND_LIMIT = 1e12
_STENCIL = ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))


class ShapeError(ValueError):
    pass


class DegreeError(ValueError):
    pass


class SingularMetricError(ArithmeticError):
    pass


class NonFiniteError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Point:
    """Four chart coordinates tagged with the chart they belong to."""

    coords: tuple
    chart: str = ""

    def __post_init__(self):
        c = tuple(float(x) for x in self.coords)
        if len(c) != DIM:
            raise ShapeError(f"a point needs {DIM} coordinates, got {len(c)}")
        if not all(math.isfinite(x) for x in c):
            raise NonFiniteError("non-finite coordinate")
        object.__setattr__(self, "coords", c)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)


def as_coords(p) -> np.ndarray:
    if isinstance(p, Point):
        return p.array
    arr = np.asarray(p, dtype=float)
    if arr.shape[-1:] != (DIM,):
        raise ShapeError(f"expected trailing axis of length {DIM}, got {arr.shape}")
    return arr


def _perm_sign(perm) -> int:
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


_PERMS = {n: [(p, _perm_sign(p)) for p in itertools.permutations(range(n))] for n in range(DIM + 1)}


def levi_civita(n: int = DIM) -> np.ndarray:
    eps = np.zeros((n,) * n)
    for perm, sign in _PERMS[n]:
        eps[perm] = sign
    return eps


_EPS = levi_civita()


def antisymmetrize(t: np.ndarray, k: int) -> np.ndarray:
    """Alt over the last ``k`` axes (averaged, so Alt of a form is itself)."""
    if k <= 1:
        return np.array(t, dtype=float)
    lead = t.ndim - k
    out = np.zeros_like(t, dtype=float)
    for perm, sign in _PERMS[k]:
        out += sign * np.transpose(t, tuple(range(lead)) + tuple(lead + q for q in perm))
    return out / math.factorial(k)


def check_metric(g: np.ndarray) -> np.ndarray:
    """Validate a (batch of) metric matrices and return the inverse."""
    g = np.asarray(g, dtype=float)
    if g.shape[-2:] != (DIM, DIM):
        raise ShapeError(f"metric must be {DIM}x{DIM}, got {g.shape}")
    if not np.all(np.isfinite(g)):
        raise NonFiniteError("non-finite metric component")
    cond = np.linalg.cond(g)
    if np.any(~np.isfinite(cond)) or np.any(cond > COND_LIMIT):
        raise SingularMetricError(f"metric condition number {np.max(cond):.3e} exceeds {COND_LIMIT:.0e}")
    return np.linalg.inv(g)


def _outer(a: np.ndarray, b: np.ndarray, ka: int, kb: int) -> np.ndarray:
    batch = np.broadcast_shapes(a.shape[: a.ndim - ka], b.shape[: b.ndim - kb])
    a = np.broadcast_to(a, batch + a.shape[a.ndim - ka :])
    b = np.broadcast_to(b, batch + b.shape[b.ndim - kb :])
    a_exp = a.reshape(batch + a.shape[len(batch) :] + (1,) * kb)
    b_exp = b.reshape(batch + (1,) * ka + b.shape[len(batch) :])
    return a_exp * b_exp


def wedge_arrays(a, b, ka: int, kb: int) -> np.ndarray:
    if ka + kb > DIM:
        raise DegreeError(f"wedge of total degree {ka + kb} exceeds {DIM}")
    coef = math.factorial(ka + kb) / (math.factorial(ka) * math.factorial(kb))
    return coef * antisymmetrize(_outer(np.asarray(a, float), np.asarray(b, float), ka, kb), ka + kb)


def interior_arrays(v, a, k: int) -> np.ndarray:
    if k == 0:
        raise DegreeError("interior product of a 0-form")
    v = np.asarray(v, float)
    a = np.asarray(a, float)
    return np.einsum("...i,...i" + "abc"[: k - 1] + "->..." + "abc"[: k - 1], v, a)


def raise_indices(a: np.ndarray, ginv: np.ndarray, k: int) -> np.ndarray:
    """Raise all ``k`` trailing indices of ``a`` with the inverse metric."""
    out = np.asarray(a, float)
    lead = out.ndim - k
    for slot in range(k):
        moved = np.moveaxis(out, lead + slot, -1)
        gi = ginv.reshape(ginv.shape[:-2] + (1,) * (k - 1) + ginv.shape[-2:])
        moved = np.einsum("...ij,...j->...i", gi, moved)
        out = np.moveaxis(moved, -1, lead + slot)
    return out


def hodge_arrays(a, g, k: int, orientation=1.0) -> np.ndarray:
    a = np.asarray(a, float)
    g = np.asarray(g, float)
    ginv = check_metric(g)
    vol = np.asarray(orientation, float) * np.sqrt(np.abs(np.linalg.det(g)))
    up = raise_indices(a, ginv, k)
    letters = "abcd"
    src = letters[:k]
    dst = letters[k:]
    res = np.einsum("..." + src + "," + letters + "->..." + dst, up, _EPS)
    return res * (vol[(...,) + (None,) * (DIM - k)] / math.factorial(k))


def norm2_arrays(a, g, k: int) -> np.ndarray:
    a = np.asarray(a, float)
    ginv = check_metric(g)
    up = raise_indices(a, ginv, k)
    axes = tuple(range(a.ndim - k, a.ndim))
    return np.sum(a * up, axis=axes) / math.factorial(k)


def top_arrays(a) -> np.ndarray:
    """The ``0123`` component of a 4-form."""
    return np.asarray(a)[..., 0, 1, 2, 3]


@dataclass(frozen=True, eq=False)
class FormValue:
    """A k-form at a single point."""

    degree: int
    components: np.ndarray

    def __post_init__(self):
        k = int(self.degree)
        if not 0 <= k <= DIM:
            raise DegreeError(f"degree {k} outside [0, {DIM}]")
        c = np.asarray(self.components, dtype=float)
        if c.shape != (DIM,) * k:
            raise ShapeError(f"{k}-form needs shape {(DIM,) * k}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise NonFiniteError("non-finite form component")
        if k >= 2:
            scale = max(1.0, float(np.max(np.abs(c))))
            if np.max(np.abs(c - antisymmetrize(c, k))) > 1e-10 * scale:
                raise ShapeError("components are not antisymmetric")
        object.__setattr__(self, "degree", k)
        object.__setattr__(self, "components", c)

    def __add__(self, other: "FormValue") -> "FormValue":
        _same_degree(self, other)
        return FormValue(self.degree, self.components + other.components)

    def __sub__(self, other: "FormValue") -> "FormValue":
        _same_degree(self, other)
        return FormValue(self.degree, self.components - other.components)

    def __mul__(self, c: float) -> "FormValue":
        return FormValue(self.degree, float(c) * self.components)

    __rmul__ = __mul__

    def __neg__(self) -> "FormValue":
        return FormValue(self.degree, -self.components)

    def top(self) -> float:
        if self.degree != DIM:
            raise DegreeError("top component needs a 4-form")
        return float(self.components[0, 1, 2, 3])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components))) if self.degree else abs(float(self.components))


def _same_degree(a: FormValue, b: FormValue) -> None:
    if a.degree != b.degree:
        raise DegreeError(f"degree mismatch {a.degree} vs {b.degree}")


@dataclass(frozen=True, eq=False)
class VectorValue:
    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if c.shape != (DIM,):
            raise ShapeError(f"vector needs shape ({DIM},), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise NonFiniteError("non-finite vector component")
        object.__setattr__(self, "components", c)


@dataclass(frozen=True)
class FormField:
    """A k-form valued function of chart coordinates."""

    degree: int
    func: Callable[[np.ndarray], np.ndarray]

    def __call__(self, p) -> FormValue:
        return FormValue(self.degree, self.func(as_coords(p)))


def _vec(v) -> np.ndarray:
    return v.components if isinstance(v, VectorValue) else np.asarray(v, float)


def wedge(a: FormValue, b: FormValue) -> FormValue:
    k = a.degree + b.degree
    return FormValue(k, wedge_arrays(a.components, b.components, a.degree, b.degree))


def interior(v, a: FormValue) -> FormValue:
    return FormValue(a.degree - 1, interior_arrays(_vec(v), a.components, a.degree))


def hodge(a: FormValue, g, orientation: float = 1.0) -> FormValue:
    return FormValue(DIM - a.degree, hodge_arrays(a.components, g, a.degree, orientation))


def sharp(a: FormValue, g) -> VectorValue:
    if a.degree != 1:
        raise DegreeError("sharp needs a 1-form")
    return VectorValue(check_metric(g) @ a.components)


def flat(v, g) -> FormValue:
    return FormValue(1, np.asarray(g, float) @ _vec(v))


def form_norm(a: FormValue, g) -> float:
    if a.degree == 0:
        return abs(float(a.components))
    return math.sqrt(max(0.0, float(norm2_arrays(a.components, g, a.degree))))


def _steps(x: np.ndarray, step: float) -> np.ndarray:
    return step * np.maximum(1.0, np.abs(x))


def derivative_stencil(func: Callable[[np.ndarray], np.ndarray], p, step: float = 1e-5) -> np.ndarray:
    """Fourth-order central differences of ``func`` along every coordinate.

    Returns an array whose leading axis is the differentiation index.
    """
    x = as_coords(p)
    hs = _steps(x, step)
    rows = []
    for i in range(DIM):
        acc = None
        for offset, weight in _STENCIL:
            q = x.copy()
            q[i] += offset * hs[i]
            val = weight * np.asarray(func(q), dtype=float)
            acc = val if acc is None else acc + val
        rows.append(acc / hs[i])
    out = np.stack(rows)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError("non-finite value while differencing")
    return out


def exterior_derivative(field, p, step: float = 1e-5) -> FormValue:
    """Numerical ``d`` of a form field at ``p``.

    ``field`` is a :class:`FormField` or any callable returning a
    :class:`FormValue`; plain callables returning arrays must be wrapped in a
    :class:`FormField` so the degree is known.
    """
    if isinstance(field, FormField):
        k = field.degree
        func = field.func
    else:
        k = field(p).degree
        func = lambda q: field(q).components  # noqa: E731
    if k >= DIM:
        raise DegreeError("d of a top-degree form")
    deriv = derivative_stencil(func, p, step)
    return FormValue(k + 1, (k + 1) * antisymmetrize(deriv, k + 1))


def gradient(func: Callable[[np.ndarray], float], p, step: float = 1e-5) -> FormValue:
    return FormValue(1, derivative_stencil(lambda q: np.asarray(func(q), float), p, step))


def exterior_derivative_batch(func: Callable[[np.ndarray], np.ndarray], P, k: int, step: float = 1e-5) -> np.ndarray:
    """Numerical ``d`` of a k-form field at a batch of points ``(..., 4)``.

    ``func`` must accept batches and return component arrays ``(..., 4, .., 4)``.
    Uses the same fourth-order stencil and step scaling as :func:`derivative_stencil`.
    """
    if k >= DIM:
        raise DegreeError("d of a top-degree form")
    P = np.asarray(P, float)
    hs = _steps(P, step)
    rows = []
    for i in range(DIM):
        acc = 0.0
        for offset, weight in _STENCIL:
            Q = P.copy()
            Q[..., i] += offset * hs[..., i]
            acc = acc + weight * np.asarray(func(Q), float)
        rows.append(acc / hs[(...,) + (i,) + (None,) * k])
    deriv = np.stack(rows, axis=P.ndim - 1)
    if not np.all(np.isfinite(deriv)):
        raise NonFiniteError("non-finite value while differencing")
    return (k + 1) * antisymmetrize(deriv, k + 1)
