"""Scalar fields with value / gradient / Hessian evaluators.

A :class:`ScalarField` wraps analytic callables when they are available and
falls back to central finite differences otherwise. The same container is used
for Hamiltonians, defining functions and boundary data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError

DEFAULT_FD_STEP = 1e-5


@dataclass(frozen=True)
class Jet2:
    """Second-order jet ``(value, gradient, Hessian)`` at a point."""

    value: float
    grad: np.ndarray
    hess: np.ndarray


class ScalarField:
    """Twice differentiable function on R^dim.

    Parameters
    ----------
    dim : int
        Dimension of the domain.
    value : callable
        ``value(z) -> float`` for a 1-D array ``z`` of length ``dim``.
    grad, hess : callable, optional
        Analytic gradient and Hessian. Missing ones are replaced by central
        differences with step ``fd_step``; a missing Hessian is obtained by
        differencing the gradient when the gradient is analytic.
    fd_step : float
        Finite-difference step.
    """

    def __init__(
        self,
        dim: int,
        value: Callable[[np.ndarray], float],
        grad: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        hess: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        fd_step: float = DEFAULT_FD_STEP,
        name: str = "",
    ):
        if dim < 1:
            raise DimensionError(f"dimension must be positive, got {dim}")
        if not fd_step > 0:
            raise ValueError("fd_step must be positive")
        self.dim = int(dim)
        self._value = value
        self._grad = grad
        self._hess = hess
        self.fd_step = float(fd_step)
        self.name = name

    @property
    def analytic(self) -> bool:
        return self._grad is not None and self._hess is not None

    def _check(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.dim,):
            raise DimensionError(f"expected point of shape ({self.dim},), got {z.shape}")
        return z

    def value(self, z) -> float:
        return float(self._value(self._check(z)))

    def grad(self, z) -> np.ndarray:
        z = self._check(z)
        if self._grad is not None:
            return np.asarray(self._grad(z), dtype=float)
        h = self.fd_step
        g = np.empty(self.dim)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = h
            g[i] = (self._value(z + e) - self._value(z - e)) / (2 * h)
        return g

    def hess(self, z) -> np.ndarray:
        z = self._check(z)
        if self._hess is not None:
            return np.asarray(self._hess(z), dtype=float)
        h = self.fd_step
        d = self.dim
        if self._grad is not None:
            H = np.empty((d, d))
            for i in range(d):
                e = np.zeros(d)
                e[i] = h
                H[:, i] = (np.asarray(self._grad(z + e)) - np.asarray(self._grad(z - e))) / (2 * h)
            return 0.5 * (H + H.T)
        f = self._value
        f0 = f(z)
        H = np.empty((d, d))
        eye = np.eye(d) * h
        for i in range(d):
            H[i, i] = (f(z + eye[i]) - 2 * f0 + f(z - eye[i])) / h**2
            for j in range(i + 1, d):
                H[i, j] = H[j, i] = (
                    f(z + eye[i] + eye[j])
                    - f(z + eye[i] - eye[j])
                    - f(z - eye[i] + eye[j])
                    + f(z - eye[i] - eye[j])
                ) / (4 * h**2)
        return H

    def jet(self, z) -> Jet2:
        return Jet2(self.value(z), self.grad(z), self.hess(z))

    def values_only(self, fd_step: Optional[float] = None) -> "ScalarField":
        """Copy that forgets the analytic derivatives (finite-difference jets)."""
        return type(self)(
            self.dim, self._value, fd_step=self.fd_step if fd_step is None else fd_step,
            name=self.name,
        )

    def compose(self, outer, outer_prime, outer_second) -> "ScalarField":
        """Return ``outer(self)`` with chain-rule derivatives."""

        def value(z):
            return outer(self._value(z))

        def grad(z):
            return outer_prime(self.value(z)) * self.grad(z)

        def hess(z):
            v = self.value(z)
            g = self.grad(z)
            return outer_second(v) * np.outer(g, g) + outer_prime(v) * self.hess(z)

        return type(self)(self.dim, value, grad, hess, self.fd_step, name=f"phi({self.name})")

    def transformed(self, M, b) -> "ScalarField":
        """Field ``z -> self(M^{-1}(z - b))`` for an orthogonal ``M``."""
        M = np.asarray(M, dtype=float)
        b = np.asarray(b, dtype=float)
        Mt = M.T

        def pull(z):
            return Mt @ (np.asarray(z) - b)

        return type(self)(
            self.dim,
            lambda z: self._value(pull(z)),
            lambda z: M @ self.grad(pull(z)),
            lambda z: M @ self.hess(pull(z)) @ Mt,
            self.fd_step,
            name=f"rigid({self.name})",
        )

    def check_consistency(self, points, tol: float = 1e-5) -> float:
        """Max deviation between analytic and finite-difference derivatives.

        The gradient is compared with differences of the value and the
        Hessian with differences of the gradient, which avoids the
        ``eps / h^2`` rounding of second differences of values.
        """
        fd_grad = self.values_only()
        fd_hess = type(self)(self.dim, self._value, self._grad, fd_step=self.fd_step)
        worst = 0.0
        for z in points:
            worst = max(worst, float(np.max(np.abs(self.grad(z) - fd_grad.grad(z)))))
            worst = max(worst, float(np.max(np.abs(self.hess(z) - fd_hess.hess(z)))))
        if worst > tol:
            raise ValueError(f"derivative evaluators inconsistent with value: {worst:.3e}")
        return worst

    def __repr__(self):
        kind = "analytic" if self.analytic else f"fd(h={self.fd_step:g})"
        return f"{type(self).__name__}(dim={self.dim}, {kind}, name={self.name!r})"


class HamiltonianSpec(ScalarField):
    """Scalar field on R^{n+1} x R^{n+1}; ``n`` is recorded."""

    def __init__(self, dim, value, grad=None, hess=None, fd_step=DEFAULT_FD_STEP, name=""):
        if dim % 2 or dim < 4:
            raise DimensionError(f"phase space dimension must be even and >= 4, got {dim}")
        super().__init__(dim, value, grad, hess, fd_step, name)

    @property
    def n(self) -> int:
        return self.dim // 2 - 1


def quadratic(Q, b=None, c=0.0, cls=ScalarField, name="quadratic"):
    """Field ``z -> 0.5 z^T Q z + b.z + c`` with exact derivatives."""
    Q = np.asarray(Q, dtype=float)
    Q = 0.5 * (Q + Q.T)
    d = Q.shape[0]
    b = np.zeros(d) if b is None else np.asarray(b, dtype=float)
    return cls(
        d,
        lambda z: 0.5 * z @ Q @ z + b @ z + c,
        lambda z: Q @ z + b,
        lambda z: Q.copy(),
        name=name,
    )
