"""Built-in Hamiltonians / defining functions and samplers for their level sets.

Every entry is a quadratic ``H(z) = z^T Q z / 2`` so jets are exact. ``level``
is the energy whose level set has the advertised radius.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import HamiltonianSpec, quadratic


@dataclass(frozen=True)
class CatalogSurface:
    kind: str
    n: int
    H: HamiltonianSpec
    level: float
    # closed-form characteristic curvature at every surface point, if constant
    curvature: float | None
    Q: np.ndarray

    def defining_function(self):
        """``f = H - level`` so that the surface is ``{f = 0}``."""
        return quadratic(self.Q, c=-self.level, cls=HamiltonianSpec, name=f"{self.kind}-f")

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Random points on the level set ``{H = level}`` (rows)."""
        d = 2 * self.n + 2
        pts = np.empty((count, d))
        for i in range(count):
            while True:
                v = rng.standard_normal(d)
                q = 0.5 * v @ self.Q @ v
                if q > 1e-3:
                    break
            pts[i] = v * np.sqrt(self.level / q)
        return pts


def _diag(weights) -> np.ndarray:
    return np.diag(np.asarray(weights, dtype=float))


def sphere(R: float = 1.0, n: int = 1) -> CatalogSurface:
    """``H = (|x|^2 + |y|^2) / 2``, level set of radius ``R``."""
    d = 2 * n + 2
    Q = np.eye(d)
    return CatalogSurface("sphere", n, quadratic(Q, cls=HamiltonianSpec, name="sphere"),
                          0.5 * R**2, 1.0 / R, Q)


def cylinder1(R: float = 1.0, n: int = 1) -> CatalogSurface:
    """``H = |x|^2 / 2``: the ``y`` block is flat, characteristic curvature 0."""
    m = n + 1
    Q = _diag([1.0] * m + [0.0] * m)
    return CatalogSurface("cylinder1", n, quadratic(Q, cls=HamiltonianSpec, name="cylinder1"),
                          0.5 * R**2, 0.0, Q)


def cylinder2(R: float = 1.0, n: int = 1) -> CatalogSurface:
    """``H = (x_1^2 + y_1^2) / 2``: circle in a complex line, curvature 1/R."""
    m = n + 1
    w = np.zeros(2 * m)
    w[0] = w[m] = 1.0
    Q = _diag(w)
    return CatalogSurface("cylinder2", n, quadratic(Q, cls=HamiltonianSpec, name="cylinder2"),
                          0.5 * R**2, 1.0 / R, Q)


def ellipsoid(axes, level: float = 0.5) -> CatalogSurface:
    """``H = sum z_i^2 / (2 a_i^2)``; ``{H = 1/2}`` has semi-axes ``a_i``."""
    axes = np.asarray(axes, dtype=float)
    if axes.size % 2 or axes.size < 4 or np.any(axes <= 0):
        raise ValueError("ellipsoid needs an even number (>= 4) of positive semi-axes")
    n = axes.size // 2 - 1
    Q = _diag(1.0 / axes**2)
    return CatalogSurface("ellipsoid", n, quadratic(Q, cls=HamiltonianSpec, name="ellipsoid"),
                          level, None, Q)


def random_ellipsoid(n: int, rng: np.random.Generator, lo: float = 0.5, hi: float = 2.0) -> CatalogSurface:
    return ellipsoid(rng.uniform(lo, hi, size=2 * n + 2))


SURFACES = {
    "sphere": sphere,
    "cylinder1": cylinder1,
    "cylinder2": cylinder2,
}


def make_surface(kind: str, R: float = 1.0, n: int = 1, axes=None) -> CatalogSurface:
    if kind == "ellipsoid":
        if axes is None:
            raise ValueError("ellipsoid requires semi-axes")
        return ellipsoid(axes)
    try:
        return SURFACES[kind](R, n)
    except KeyError:
        raise ValueError(f"unknown surface kind {kind!r}") from None
