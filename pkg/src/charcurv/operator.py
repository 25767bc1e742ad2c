"""Characteristic curvature operator acting on graphs over R^{2n+1}.

Gradient vectors are split as ``p = (u_x, u_y, u_t)`` with ``u_x, u_y`` in
R^n. With ``sigma(p) = (-u_y, u_x, 1)`` the principal matrix is the rank-one
``A(p) = sigma sigma^T`` and

    T u = tr(A(Du) D^2u) / (1 + |Du|^2)^{3/2}.

All functions accept a single vector or stacks with the vector index last, so
the solver can evaluate them on every grid node at once.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError

SYMMETRY_WARN = 1e-9


def _split(p: np.ndarray):
    d = p.shape[-1]
    if d < 3 or d % 2 == 0:
        raise DimensionError(f"gradient length must be odd and >= 3, got {d}")
    n = (d - 1) // 2
    return p[..., :n], p[..., n : 2 * n], p[..., 2 * n]


@dataclass(frozen=True)
class GraphJet:
    """Gradient ``p`` and symmetric Hessian ``hess`` of a graph function."""

    p: np.ndarray
    hess: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float).reshape(-1)
        L = np.asarray(self.hess, dtype=float)
        _split(p)
        if L.shape != (p.size, p.size):
            raise DimensionError(f"Hessian shape {L.shape} does not match gradient length {p.size}")
        asym = float(np.max(np.abs(L - L.T))) if L.size else 0.0
        if asym > SYMMETRY_WARN:
            warnings.warn(f"Hessian asymmetry {asym:.2e}; symmetrising", stacklevel=3)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "hess", 0.5 * (L + L.T))

    @property
    def d(self) -> int:
        return self.p.size

    @property
    def n(self) -> int:
        return (self.p.size - 1) // 2


def sigma(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    ux, uy, _ = _split(p)
    return np.concatenate([-uy, ux, np.ones(p.shape[:-1] + (1,))], axis=-1)


def assemble_A(p) -> np.ndarray:
    s = sigma(p)
    return s[..., :, None] * s[..., None, :]


def regularized_A(p, eps: float) -> np.ndarray:
    if eps < 0:
        raise ValueError(f"eps must be non-negative, got {eps}")
    A = assemble_A(p)
    return A + eps * np.eye(A.shape[-1])


def normalisation(p) -> np.ndarray:
    """``(1 + |p|^2)^{3/2}``; ``|p|`` includes the t-derivative."""
    p = np.asarray(p, dtype=float)
    return (1.0 + np.sum(p * p, axis=-1)) ** 1.5


def scaled_A(p, eps: float = 0.0) -> np.ndarray:
    """``A^eps(p) / (1 + |p|^2)^{3/2}``."""
    return regularized_A(p, eps) / normalisation(p)[..., None, None]


def _as_pair(jet, hess=None):
    if isinstance(jet, GraphJet):
        return jet.p, jet.hess
    return np.asarray(jet, dtype=float), np.asarray(hess, dtype=float)


def char_operator_value(jet, hess=None, eps: float = 0.0):
    """``tr(A^eps(p) Lambda) / (1+|p|^2)^{3/2}`` (``eps = 0`` gives ``T u``).

    Accepts a :class:`GraphJet` or a pair of arrays ``(p, hess)``; with
    stacked arrays a stack of values is returned.
    """
    p, L = _as_pair(jet, hess)
    s = sigma(p)
    val = np.einsum("...i,...ij,...j->...", s, L, s)
    if eps:
        val = val + eps * np.trace(L, axis1=-2, axis2=-1)
    out = val / normalisation(p)
    return float(out) if np.ndim(out) == 0 else out


def char_operator_n1(jet, hess=None):
    """Expanded three-dimensional formula

    ``(u_y^2 u_xx + u_x^2 u_yy + u_tt - 2 u_x u_y u_xy + 2 u_x u_yt - 2 u_y u_xt)
    / (1 + |Du|^2)^{3/2}``.
    """
    p, L = _as_pair(jet, hess)
    if p.shape[-1] != 3:
        raise DimensionError("the expanded formula is only defined for d = 3")
    ux, uy = p[..., 0], p[..., 1]
    uxx, uyy, utt = L[..., 0, 0], L[..., 1, 1], L[..., 2, 2]
    uxy, uxt, uyt = L[..., 0, 1], L[..., 0, 2], L[..., 1, 2]
    num = (uy**2 * uxx + ux**2 * uyy + utt
           - 2 * ux * uy * uxy + 2 * ux * uyt - 2 * uy * uxt)
    out = num / normalisation(p)
    return float(out) if np.ndim(out) == 0 else out


def null_eigenvectors(p) -> np.ndarray:
    """Rows ``d_{x_k} + u_{y_k} d_t`` then ``d_{y_k} - u_{x_k} d_t``, k = 1..n."""
    p = np.asarray(p, dtype=float).reshape(-1)
    ux, uy, _ = _split(p)
    n = ux.size
    V = np.zeros((2 * n, 2 * n + 1))
    for k in range(n):
        V[k, k] = 1.0
        V[k, 2 * n] = uy[k]
        V[n + k, n + k] = 1.0
        V[n + k, 2 * n] = -ux[k]
    return V


def principal_eigenpair(p):
    """``(sigma(p), 1 + |u_x|^2 + |u_y|^2)``."""
    s = sigma(np.asarray(p, dtype=float).reshape(-1))
    return s, float(s @ s)


@dataclass
class CurvatureSpec:
    """Prescribed curvature ``k(x, r)``.

    ``k`` must accept stacked points ``x`` of shape ``(..., d)`` and values
    ``r`` of shape ``(...)``. ``monotonicity`` is one of ``"strict"``
    (strictly increasing in r), ``"x-free"`` (non-decreasing in r and
    independent of x) or ``"general"``.
    """

    k: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dk_dr: Optional[Callable] = None
    dk_dx: Optional[Callable] = None
    monotonicity: str = "general"
    label: str = ""
    params: dict = field(default_factory=dict)

    MONOTONICITY = ("strict", "x-free", "general")

    def __post_init__(self):
        if self.monotonicity not in self.MONOTONICITY:
            raise ValueError(f"unknown monotonicity flag {self.monotonicity!r}")

    def __call__(self, x, r):
        r = np.asarray(r, dtype=float)
        out = np.broadcast_to(np.asarray(self.k(np.asarray(x, dtype=float), r), dtype=float), r.shape)
        return float(out) if out.ndim == 0 else np.array(out)

    @classmethod
    def constant(cls, c: float) -> "CurvatureSpec":
        c = float(c)
        return cls(
            lambda x, r: np.full(np.shape(r), c),
            dk_dr=lambda x, r: np.zeros(np.shape(r)),
            dk_dx=lambda x, r: np.zeros(np.shape(x)),
            monotonicity="x-free",
            label=f"constant({c:g})",
            params={"kind": "constant", "value": c},
        )

    @classmethod
    def affine(cls, a: float, b: float) -> "CurvatureSpec":
        """``k(x, r) = a + b r``."""
        a, b = float(a), float(b)
        if b > 0:
            mono = "strict"
        elif b == 0:
            mono = "x-free"
        else:
            mono = "general"
        return cls(
            lambda x, r: a + b * np.asarray(r, dtype=float),
            dk_dr=lambda x, r: np.full(np.shape(r), b),
            dk_dx=lambda x, r: np.zeros(np.shape(x)),
            monotonicity=mono,
            label=f"affine({a:g},{b:g})",
            params={"kind": "affine", "a": a, "b": b},
        )

    def sup(self, points, rmin: float = -1e3, rmax: float = 1e3, samples: int = 41) -> float:
        """Supremum of ``k`` over ``points`` and sampled ``r`` values."""
        pts = np.asarray(points, dtype=float)
        rs = np.linspace(rmin, rmax, samples)
        X = np.repeat(pts, rs.size, axis=0)
        R = np.tile(rs, pts.shape[0])
        return float(np.max(self(X, R)))

    def spot_check(self, points, values, h: float = 1e-6) -> bool:
        """Sample the declared monotonicity and the gradient-bound hypotheses.

        Returns True when ``dk/dr >= 0`` at the samples (for the monotone
        flags) and ``k^2 - sum |dk/dx_i| >= 0``.
        """
        x = np.asarray(points, dtype=float)
        r = np.asarray(values, dtype=float)
        if self.dk_dr is not None:
            dr = np.asarray(self.dk_dr(x, r), dtype=float)
        else:
            dr = (self(x, r + h) - self(x, r - h)) / (2 * h)
        if self.dk_dx is not None:
            dx = np.asarray(self.dk_dx(x, r), dtype=float)
        else:
            dx = np.stack([
                (self(x + h * e, r) - self(x - h * e, r)) / (2 * h)
                for e in np.eye(x.shape[-1])
            ], axis=-1)
        ok = True
        if self.monotonicity == "strict":
            ok &= bool(np.all(dr > 0))
        elif self.monotonicity == "x-free":
            ok &= bool(np.all(dr >= 0)) and bool(np.all(np.abs(dx) == 0))
        k2 = np.asarray(self(x, r)) ** 2
        ok &= bool(np.all(k2 - np.sum(np.abs(dx), axis=-1) >= 0))
        return ok


def F_value(x, r, jet, k: CurvatureSpec, eps: float = 0.0, hess=None):
    """Proper operator ``-tr(A^eps(p) Lambda)/(1+|p|^2)^{3/2} + k(x, r)``.

    Subsolutions satisfy ``F <= 0`` and supersolutions ``F >= 0``.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return -char_operator_value(jet, hess, eps) + k(x, r)


def graph_to_phase_index(n: int) -> np.ndarray:
    """Positions in ``z = (x, t, y, s)`` of the graph coordinates ``(x, y, t)``."""
    return np.concatenate([np.arange(n), np.arange(n + 1, 2 * n + 1), [n]])


def lift(n: int, value, grad, hess, s_coeff: float = -1.0):
    """Function ``z -> value(xi) + s_coeff * s`` on R^{2n+2}.

    ``xi = (x_1..x_n, y_1..y_n, t)`` are the graph coordinates and ``s`` the
    last phase coordinate, so that ``x_{n+1} = t`` and ``y_{n+1} = s``. With
    ``s_coeff = -1`` the zero set is the graph of ``value``; with ``0`` it is
    the cylinder over the zero set of ``value``.
    """
    from .fields import HamiltonianSpec

    idx = graph_to_phase_index(n)
    d = 2 * n + 2

    def xi(z):
        return np.asarray(z)[idx]

    def F(z):
        return value(xi(z)) + s_coeff * z[-1]

    def G(z):
        g = np.zeros(d)
        g[idx] = grad(xi(z))
        g[-1] = s_coeff
        return g

    def Hs(z):
        H = np.zeros((d, d))
        H[np.ix_(idx, idx)] = hess(xi(z))
        return H

    return HamiltonianSpec(d, F, G, Hs, name="lift")
