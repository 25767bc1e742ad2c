"""Second fundamental form, Levi form and mean curvatures of level sets.

For ``M = {f = 0}`` in R^{2n+2} = C^{n+1} with inner normal
``N = -grad f / |grad f|`` the second fundamental form on tangent vectors is

    h(V, W) = <D^2f V, W> / |grad f|.

The tangent space splits into the J-invariant part spanned by
``X_k, Y_k = J X_k`` and the characteristic direction ``T = -J N``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CriticalPointError, FrameError, OffSurfaceError, TangencyError
from .fields import ScalarField
from .symplectic import CRITICAL_TOL, apply_J, characteristic_curvature_levelset

LEVEL_TOL = 1e-8
TANGENCY_TOL = 1e-9


@dataclass
class DefiningFunctionSurface:
    f: ScalarField
    level_tol: float = LEVEL_TOL
    critical_tol: float = CRITICAL_TOL

    def __post_init__(self):
        if self.f.dim % 2 or self.f.dim < 4:
            raise ValueError(f"ambient dimension must be even and >= 4, got {self.f.dim}")

    @property
    def n(self) -> int:
        return self.f.dim // 2 - 1

    def check_point(self, z) -> np.ndarray:
        """Validate ``z`` (on M, non-critical) and return ``grad f(z)``."""
        z = np.asarray(z, dtype=float)
        val = self.f.value(z)
        if abs(val) > self.level_tol:
            raise OffSurfaceError(f"|f(z)| = {abs(val):.3e} exceeds level_tol {self.level_tol:g}")
        g = self.f.grad(z)
        if np.linalg.norm(g) <= self.critical_tol:
            raise CriticalPointError(f"critical point of f (|grad f| = {np.linalg.norm(g):.3e})")
        return g


@dataclass(frozen=True)
class AdaptedFrame:
    z: np.ndarray
    N: np.ndarray
    T: np.ndarray
    X: np.ndarray  # (n, 2n+2)
    Y: np.ndarray  # (n, 2n+2)

    def tangent(self) -> np.ndarray:
        """Rows ``X_1..X_n, Y_1..Y_n, T``."""
        return np.vstack([self.X, self.Y, self.T[None, :]])

    def matrix(self) -> np.ndarray:
        """All 2n+2 frame vectors as rows, normal last."""
        return np.vstack([self.tangent(), self.N[None, :]])


def unit_normal(S: DefiningFunctionSurface, z) -> np.ndarray:
    g = S.check_point(z)
    return -g / np.linalg.norm(g)


def characteristic_direction(S: DefiningFunctionSurface, z) -> np.ndarray:
    return -apply_J(unit_normal(S, z))


def _seed_vectors(d: int, seed) -> np.ndarray:
    if seed is None:
        return np.eye(d)
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return Q.T


def adapted_frame(S: DefiningFunctionSurface, z, seed=None) -> AdaptedFrame:
    """Orthonormal frame ``{X_k, Y_k = J X_k, T, N}`` at ``z``.

    Seeds are the canonical basis vectors in index order (or the rows of a
    random orthogonal matrix when ``seed`` is given). Each accepted seed is
    projected off the vectors found so far and paired with its ``J`` image.
    """
    z = np.asarray(z, dtype=float)
    N = unit_normal(S, z)
    T = -apply_J(N)
    d = z.size
    n = d // 2 - 1
    basis = [N, T]
    X, Y = [], []
    for e in _seed_vectors(d, seed):
        if len(X) == n:
            break
        v = e.copy()
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for b in basis:
                v -= (b @ v) * b
        # at least one seed keeps a residual of this size: the squared residuals
        # over an orthonormal seed set sum to the remaining dimension
        remaining = d - len(basis)
        if np.linalg.norm(v) < 0.5 * np.sqrt(remaining / d):
            continue
        x = v / np.linalg.norm(v)
        y = apply_J(x)
        X.append(x)
        Y.append(y)
        basis.extend([x, y])
    if len(X) != n:
        raise FrameError("Gram-Schmidt exhausted all seeds")
    return AdaptedFrame(z, N, T, np.array(X).reshape(n, d), np.array(Y).reshape(n, d))


def second_fundamental_form(S: DefiningFunctionSurface, z, V, W, tangency_tol: float = TANGENCY_TOL) -> float:
    z = np.asarray(z, dtype=float)
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    g = S.check_point(z)
    ng = np.linalg.norm(g)
    for name, vec in (("V", V), ("W", W)):
        res = abs(vec @ g)
        if res > tangency_tol * max(np.linalg.norm(vec), 1.0) * ng:
            raise TangencyError(f"{name} is not tangent: |<{name}, grad f>| = {res:.3e}")
    return float(V @ S.f.hess(z) @ W) / ng


def shape_matrix(S: DefiningFunctionSurface, z, frame: AdaptedFrame | None = None) -> np.ndarray:
    """Matrix of ``h`` in the tangent frame ``(X, Y, T)``."""
    z = np.asarray(z, dtype=float)
    if frame is None:
        frame = adapted_frame(S, z)
    B = frame.tangent()
    g = S.check_point(z)
    return B @ S.f.hess(z) @ B.T / np.linalg.norm(g)


def mean_curvature(S: DefiningFunctionSurface, z, seed=None) -> float:
    h = shape_matrix(S, z, adapted_frame(S, z, seed))
    return float(np.trace(h)) / (2 * S.n + 1)


def levi_mean_curvature(S: DefiningFunctionSurface, z, seed=None) -> float:
    """``(1/2n) sum_k [h(X_k, X_k) + h(J X_k, J X_k)]``."""
    n = S.n
    h = shape_matrix(S, z, adapted_frame(S, z, seed))
    return float(np.trace(h[: 2 * n, : 2 * n])) / (2 * n)


def characteristic_curvature(S: DefiningFunctionSurface, z) -> float:
    """``h(T, T)`` computed through the frame (not the symplectic formula)."""
    frame = adapted_frame(S, z)
    return second_fundamental_form(S, z, frame.T, frame.T)


def curvature_relation_residual(S: DefiningFunctionSurface, z) -> float:
    """``(2n+1) H - 2n L - C`` with ``C`` from the Hamiltonian-flow formula."""
    n = S.n
    z = np.asarray(z, dtype=float)
    S.check_point(z)
    C = characteristic_curvature_levelset(S.f, z, S.critical_tol)
    return (2 * n + 1) * mean_curvature(S, z) - 2 * n * levi_mean_curvature(S, z) - C


def principal_curvatures(S: DefiningFunctionSurface, z) -> np.ndarray:
    """Eigenvalues of the shape operator on an arbitrary tangent basis.

    Independent of the adapted frame: the tangent basis comes from a QR
    factorisation of the normal.
    """
    z = np.asarray(z, dtype=float)
    g = S.check_point(z)
    d = z.size
    Q, _ = np.linalg.qr(np.column_stack([g, np.eye(d)]))
    B = Q[:, 1:d]
    return np.sort(np.linalg.eigvalsh(B.T @ S.f.hess(z) @ B / np.linalg.norm(g)))
