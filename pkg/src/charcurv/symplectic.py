"""Symplectic linear algebra on R^{n+1} x R^{n+1} and characteristic curvature.

Coordinates are ordered ``z = (x_1, ..., x_{n+1}, y_1, ..., y_{n+1})`` and the
canonical matrix acts as ``J(x, y) = (y, -x)``. The characteristic curvature of
a level set ``{H = E}`` is the normal curvature of the orbits of ``J grad H``:

    C = <D^2H J gradH, J gradH> / |grad H|^3

with the normal ``N = -grad H / |grad H|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CriticalPointError, DimensionError, EnergyDriftError
from .fields import HamiltonianSpec, ScalarField

CRITICAL_TOL = 1e-10


@dataclass(frozen=True)
class PhasePoint:
    """Point ``z = (x, y)`` of R^{2n+2}."""

    coords: np.ndarray
    n: int = field(default=-1)

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if c.size % 2 or c.size < 4:
            raise DimensionError(f"phase point needs even length >= 4, got {c.size}")
        n = c.size // 2 - 1
        if self.n not in (-1, n):
            raise DimensionError(f"coords length {c.size} does not match n={self.n}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "n", n)

    @property
    def x(self) -> np.ndarray:
        return self.coords[: self.n + 1]

    @property
    def y(self) -> np.ndarray:
        return self.coords[self.n + 1 :]


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), 2n+2)
    energy: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.states, dtype=float)
        if s.ndim != 2 or s.shape[0] != t.shape[0]:
            raise DimensionError("states must be a (len(times), 2n+2) array")
        if np.any(np.diff(t) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)

    @property
    def n(self) -> int:
        return self.states.shape[1] // 2 - 1

    def point(self, i: int) -> PhasePoint:
        return PhasePoint(self.states[i])


def _vec(v) -> np.ndarray:
    if isinstance(v, PhasePoint):
        return np.asarray(v.coords)
    return np.asarray(v, dtype=float)


def _even(v: np.ndarray) -> np.ndarray:
    if v.ndim < 1 or v.shape[-1] % 2 or v.shape[-1] < 4:
        raise DimensionError(f"expected even length >= 4, got shape {v.shape}")
    return v


def J_matrix(n: int) -> np.ndarray:
    """Canonical symplectic matrix of size 2n+2."""
    m = n + 1
    J = np.zeros((2 * m, 2 * m))
    J[:m, m:] = np.eye(m)
    J[m:, :m] = -np.eye(m)
    return J


def apply_J(v) -> np.ndarray:
    """``J v`` for one vector or a stack of vectors along the last axis."""
    v = _even(_vec(v))
    m = v.shape[-1] // 2
    return np.concatenate([v[..., m:], -v[..., :m]], axis=-1)


def liouville_form(z, v) -> float:
    """Liouville 1-form ``lambda_z(v) = <J z, v> / 2``."""
    z, v = _vec(z), _vec(v)
    if z.shape != v.shape:
        raise DimensionError(f"dimension mismatch {z.shape} vs {v.shape}")
    return 0.5 * float(apply_J(z) @ v)


def symplectic_form(v, u) -> float:
    """``omega(v, u) = <J v, u>``, so that ``omega(v, J u) = <v, u>``."""
    v, u = _vec(v), _vec(u)
    if v.shape != u.shape:
        raise DimensionError(f"dimension mismatch {v.shape} vs {u.shape}")
    return float(apply_J(v) @ u)


def hamiltonian_vector_field(H: ScalarField, z) -> np.ndarray:
    return apply_J(H.grad(_vec(z)))


def _curvature_from_jet(g: np.ndarray, D2: np.ndarray, critical_tol: float) -> float:
    ng = np.linalg.norm(g)
    if ng <= critical_tol:
        raise CriticalPointError(f"critical point of H (|grad H| = {ng:.3e})")
    X = apply_J(g)
    return float(X @ D2 @ X) / ng**3


def characteristic_curvature_levelset(H: ScalarField, z, critical_tol: float = CRITICAL_TOL) -> float:
    """Characteristic curvature of the level set of ``H`` through ``z``."""
    z = _even(_vec(z))
    return _curvature_from_jet(H.grad(z), H.hess(z), critical_tol)


def _rk4_step(H: ScalarField, z: np.ndarray, dt: float) -> np.ndarray:
    k1 = apply_J(H.grad(z))
    k2 = apply_J(H.grad(z + 0.5 * dt * k1))
    k3 = apply_J(H.grad(z + 0.5 * dt * k2))
    k4 = apply_J(H.grad(z + dt * k3))
    return z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_characteristic_curve(
    H: ScalarField,
    z0,
    t_end: float,
    dt: float,
    drift_tol: float | None = None,
    critical_tol: float = CRITICAL_TOL,
) -> Trajectory:
    """Integrate ``z' = J grad H(z)`` with classical RK4 from ``z0``.

    The last step is shortened so that the final time is exactly ``t_end``.
    Raises :class:`EnergyDriftError` as soon as ``|H(z) - H(z0)|`` exceeds
    ``drift_tol`` (default ``1e-6 * max(1, |E|)``).
    """
    if not (dt > 0 and t_end > 0):
        raise ValueError("dt and t_end must be positive")
    z = _even(_vec(z0)).astype(float).copy()
    if np.linalg.norm(H.grad(z)) <= critical_tol:
        raise CriticalPointError("critical point of H at the initial state")
    E = H.value(z)
    if drift_tol is None:
        drift_tol = 1e-6 * max(1.0, abs(E))

    nsteps = int(np.ceil(t_end / dt - 1e-12))
    times = np.empty(nsteps + 1)
    states = np.empty((nsteps + 1, z.size))
    times[0], states[0] = 0.0, z
    t = 0.0
    for i in range(1, nsteps + 1):
        step = min(dt, t_end - t)
        z = _rk4_step(H, z, step)
        t = t_end if i == nsteps else t + step
        drift = abs(H.value(z) - E)
        if drift > drift_tol:
            raise EnergyDriftError(i, drift, drift_tol)
        times[i], states[i] = t, z
    return Trajectory(times, states, E)


def curvature_along_curve(H: ScalarField, traj: Trajectory, critical_tol: float = CRITICAL_TOL) -> np.ndarray:
    """Curvature ``<gamma'', J gamma'> / |gamma'|^3`` at every trajectory state.

    Velocity and acceleration are taken from the vector field itself,
    ``gamma' = J grad H`` and ``gamma'' = J D^2H gamma'``.
    """
    out = np.empty(len(traj.times))
    for i, z in enumerate(traj.states):
        vel = apply_J(H.grad(z))
        speed = np.linalg.norm(vel)
        if speed <= critical_tol:
            raise CriticalPointError(f"critical point of H at state {i}")
        acc = apply_J(H.hess(z) @ vel)
        out[i] = float(acc @ apply_J(vel)) / speed**3
    return out


def tangent_basis(normal: np.ndarray) -> np.ndarray:
    """Orthonormal basis (rows) of the orthogonal complement of ``normal``."""
    normal = np.asarray(normal, dtype=float)
    d = normal.size
    Q, _ = np.linalg.qr(np.column_stack([normal, np.eye(d)]))
    return Q[:, 1:d].T


def unitary_to_real(U: np.ndarray) -> np.ndarray:
    """Real orthogonal matrix of R^{2m} commuting with J for a unitary ``U``."""
    P, Q = U.real, U.imag
    return np.block([[P, Q], [-Q, P]])


def random_symplectic_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    m = n + 1
    Z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    U, R = np.linalg.qr(Z)
    U = U * (np.diag(R) / np.abs(np.diag(R)))
    return unitary_to_real(U)


__all__: Sequence[str] = [
    "PhasePoint",
    "Trajectory",
    "HamiltonianSpec",
    "J_matrix",
    "apply_J",
    "liouville_form",
    "symplectic_form",
    "hamiltonian_vector_field",
    "characteristic_curvature_levelset",
    "integrate_characteristic_curve",
    "curvature_along_curve",
    "tangent_basis",
    "random_symplectic_rotation",
]
