"""Numerical checks built on top of the solver: comparison of ordered data,
gradient and sup estimates, barriers, the cylinder condition and the two
closed-form solutions that touch along an axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import GridError
from ..fields import ScalarField
from ..operator import CurvatureSpec, char_operator_value, lift
from ..symplectic import characteristic_curvature_levelset
from .grid import EXTERIOR, DomainSpec, GridField, boundary_adjacent, grid_gradients, laplace_extension
from .picard import SolverConfig, continuation_solve


def with_boundary_data(grid: GridField, phi: Callable[[np.ndarray], np.ndarray]) -> GridField:
    """Copy of ``grid`` with new boundary values and a harmonic initial guess."""
    g = grid.copy()
    active = g.cls != EXTERIOR
    g.u[active] = np.asarray(phi(g.coords()[active]), dtype=float)
    g.u = laplace_extension(g)
    return g


# -- comparison --------------------------------------------------------------


@dataclass
class ComparisonReport:
    max_violation: float  # max(u1 - u2) over all active nodes
    max_shift_error: float  # max |u2 - u1 - c| when the data differ by a constant c
    reports: tuple
    converged: bool

    def passed(self, tol: float = 1e-8) -> bool:
        return self.converged and self.max_violation <= tol


def comparison_experiment(grid: GridField, k: CurvatureSpec, phi1, phi2,
                          config: SolverConfig | None = None,
                          shift: Optional[float] = None) -> ComparisonReport:
    """Solve with ordered boundary data ``phi1 <= phi2`` and compare.

    ``k`` must be strictly increasing in r, or nondecreasing in r and
    independent of x. When ``shift`` is given, ``phi2 = phi1 + shift`` is
    assumed and the deviation of ``u2 - u1`` from ``shift`` is reported.
    """
    if k.monotonicity not in ("strict", "x-free"):
        raise ValueError("comparison needs a strictly increasing or an x-free nondecreasing k")
    g1 = with_boundary_data(grid, phi1)
    g2 = with_boundary_data(grid, phi2)
    bnd = grid.boundary
    if np.any(g1.u[bnd] > g2.u[bnd]):
        raise ValueError("boundary data are not ordered")
    u1, r1 = continuation_solve(g1, k, config)
    u2, r2 = continuation_solve(g2, k, config)
    active = grid.cls != EXTERIOR
    diff = u1.u[active] - u2.u[active]
    shift_err = float("nan") if shift is None else float(np.max(np.abs(-diff - shift)))
    return ComparisonReport(float(np.max(diff)), shift_err, (r1, r2), r1.converged and r2.converged)


# -- gradient and sup estimates ------------------------------------------------


@dataclass
class GradientBoundReport:
    interior_max: float
    boundary_max: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.interior_max <= self.boundary_max + self.slack


def gradient_bound_check(grid: GridField, C: float = 10.0) -> GradientBoundReport:
    """Compare ``max |Du|`` over interior nodes with the max over the nodes
    whose stencil reaches the boundary, allowing ``C h`` slack."""
    g = np.linalg.norm(grid_gradients(grid.u, grid.h), axis=-1)
    adj = boundary_adjacent(grid)
    return GradientBoundReport(float(np.max(g[grid.interior])), float(np.max(g[adj])), C * grid.h)


def smallest_enclosing_ball(points, seed: int = 0):
    """Exact minimal enclosing ball of a point cloud in R^3 (Welzl).

    The convex hull is taken first so the recursion only sees its vertices.
    Returns ``(center, radius)``.
    """
    from scipy.spatial import ConvexHull, QhullError

    P = np.asarray(points, dtype=float)
    try:
        P = P[ConvexHull(P).vertices]
    except (QhullError, ValueError):
        P = np.unique(P, axis=0)
    P = P[np.random.default_rng(seed).permutation(len(P))]

    def ball_from(support):
        if not support:
            return np.zeros(3), -1.0
        S = np.array(support)
        if len(S) == 1:
            return S[0], 0.0
        # circumcentre in the affine hull of the support
        A = S[1:] - S[0]
        G = A @ A.T
        rhs = 0.5 * np.sum(A * A, axis=1)
        try:
            lam = np.linalg.solve(G, rhs)
        except np.linalg.LinAlgError:
            lam = np.linalg.lstsq(G, rhs, rcond=None)[0]
        c = S[0] + lam @ A
        return c, float(np.max(np.linalg.norm(S - c, axis=1)))

    def inside(c, r, p):
        return r >= 0 and np.linalg.norm(p - c) <= r * (1 + 1e-12) + 1e-14

    def welzl(n, support):
        # iterative over points, recursive over support (depth <= 4)
        c, r = ball_from(support)
        if len(support) == 4:
            return c, r
        for i in range(n):
            if not inside(c, r, P[i]):
                c, r = welzl(i, support + [P[i]])
        return c, r

    c, r = welzl(len(P), [])
    return c, float(np.max(np.linalg.norm(np.asarray(points) - c, axis=1)))


@dataclass
class SupBoundReport:
    sup_u: float
    sup_boundary: float
    radius: float
    center: np.ndarray
    hypothesis: bool  # sup k <= 1/R

    @property
    def margin(self) -> float:
        return self.sup_boundary + self.radius - self.sup_u

    @property
    def passed(self) -> bool:
        return self.margin >= 0


def supbound_check(grid: GridField, k: Optional[CurvatureSpec] = None) -> SupBoundReport:
    """``sup |u| <= sup_boundary |u| + R`` with R the radius of the smallest
    ball enclosing the lattice domain."""
    pts = grid.coords()
    active = grid.cls != EXTERIOR
    c, R = smallest_enclosing_ball(pts[active])
    hyp = True
    if k is not None:
        u = grid.u[active]
        span = float(np.max(np.abs(u))) + R
        hyp = k.sup(pts[active], -span, span) <= 1.0 / R
    return SupBoundReport(float(np.max(np.abs(grid.u[active]))),
                          float(np.max(np.abs(grid.u[grid.boundary]))), R, c, bool(hyp))


# -- barriers ---------------------------------------------------------------


def barrier_pair(domain: DomainSpec, phi: ScalarField, lam: float):
    """Return ``(phi + lam rho, phi - lam rho)``, lower and upper barrier.

    Both coincide with ``phi`` where ``rho = 0`` and are ordered where
    ``rho < 0``. Derivatives are analytic when ``phi`` and ``rho`` provide them.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if phi.dim != 3:
        raise ValueError("boundary data must live on R^3")

    def rho_grad(z):
        try:
            return domain.rho_grad(z)
        except GridError:
            return None

    def rho_hess(z):
        try:
            return domain.rho_hess(z)
        except GridError:
            return None

    def make(sign):
        def value(z):
            return phi.value(z) + sign * lam * float(domain.rho(z))

        def grad(z):
            g = rho_grad(z)
            return None if g is None else phi.grad(z) + sign * lam * g

        def hess(z):
            H = rho_hess(z)
            return None if H is None else phi.hess(z) + sign * lam * H

        probe = np.asarray(domain.bounds()[0], dtype=float)
        analytic = rho_grad(probe) is not None and rho_hess(probe) is not None
        label = "lower" if sign > 0 else "upper"
        if analytic:
            return ScalarField(3, value, grad, hess, phi.fd_step, name=f"{label}-barrier")
        return ScalarField(3, value, fd_step=phi.fd_step, name=f"{label}-barrier")

    return make(1.0), make(-1.0)


def evaluate(f: ScalarField, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    flat = pts.reshape(-1, pts.shape[-1])
    return np.array([f.value(p) for p in flat]).reshape(pts.shape[:-1])


@dataclass
class SandwichReport:
    nodes: int
    lower_violation: float  # max(lower - u), <= 0 when the sandwich holds
    upper_violation: float  # max(u - upper)

    def passed(self, tol: float = 0.0) -> bool:
        return max(self.lower_violation, self.upper_violation) <= tol


def sandwich_check(grid: GridField, domain: DomainSpec, phi: ScalarField, lam: float) -> SandwichReport:
    """Check ``phi + lam rho <= u <= phi - lam rho`` on the nodes of the
    closed domain (``rho <= 0``). Lattice boundary nodes sit outside the
    domain, where the barriers swap order, so they are excluded."""
    lo, hi = barrier_pair(domain, phi, lam)
    pts = grid.coords()
    mask = (grid.cls != EXTERIOR) & (domain.rho(pts) <= 0)
    P = pts[mask]
    u = grid.u[mask]
    return SandwichReport(int(mask.sum()), float(np.max(evaluate(lo, P) - u)),
                          float(np.max(u - evaluate(hi, P))))


# -- cylinder condition ----------------------------------------------------------


@dataclass
class CylinderReport:
    status: str  # holds | fails | unchecked
    min_margin: float = float("nan")  # min over samples of C(x) - sup_s k(x, s)
    worst_point: Optional[np.ndarray] = None
    samples: int = 0


def _surface_samples(domain: DomainSpec, count: int, rng) -> np.ndarray:
    v = rng.standard_normal((count, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    # the t-axis poles are where the margin is smallest for round domains
    v = np.vstack([v, [[0, 0, 1], [0, 0, -1]]])
    scale = domain.radius if domain.kind == "ball" else domain.axes
    return domain.center + v * scale


def cylinder_condition(domain: DomainSpec, k: CurvatureSpec, samples: int = 200,
                       r_range=(-10.0, 10.0), seed: int = 0) -> CylinderReport:
    """Sample ``sup_s k(x, s) < C(x)`` on the boundary, where ``C`` is the
    characteristic curvature of the cylinder over the boundary.

    Only ball and ellipsoid domains are checked; other kinds return
    ``"unchecked"``.
    """
    if domain.kind not in ("ball", "ellipsoid"):
        return CylinderReport("unchecked")
    F = lift(1, lambda xi: float(domain.rho(xi)), domain.rho_grad,
             lambda xi: domain.rho_hess(xi), s_coeff=0.0)
    pts = _surface_samples(domain, samples, np.random.default_rng(seed))
    curv = np.empty(len(pts))
    for i, xi in enumerate(pts):
        z = np.array([xi[0], xi[2], xi[1], 0.0])  # phase order (x, t, y, s)
        curv[i] = characteristic_curvature_levelset(F, z)
    rs = np.linspace(*r_range, 41)
    ksup = np.array([np.max(k(np.repeat(p[None], rs.size, 0), rs)) for p in pts])
    margin = curv - ksup
    i = int(np.argmin(margin))
    return CylinderReport("holds" if margin[i] > 0 else "fails", float(margin[i]), pts[i], len(pts))


# -- touching solutions -----------------------------------------------------------


def _axis_solution(R: float, xi: np.ndarray):
    """Jet of ``-sqrt(R^2 - t^2)``."""
    t = xi[..., 2]
    w = np.sqrt(R * R - t * t)
    p = np.zeros(xi.shape)
    p[..., 2] = t / w
    H = np.zeros(xi.shape + (3,))
    H[..., 2, 2] = R * R / w**3
    return -w, p, H


def _ball_solution(R: float, xi: np.ndarray):
    """Jet of ``-sqrt(R^2 - |xi|^2)``."""
    w = np.sqrt(R * R - np.sum(xi * xi, axis=-1))
    p = xi / w[..., None]
    H = np.eye(3) / w[..., None, None] + xi[..., :, None] * xi[..., None, :] / w[..., None, None] ** 3
    return -w, p, H


@dataclass
class CounterexampleReport:
    R: float
    samples: int
    max_dev_u: float  # max |T u - 1/R|
    max_dev_v: float
    ordered: bool  # u <= v at every sample
    equality_on_axis_only: bool
    axis_samples: int
    normal_derivatives: tuple  # (du/dnu, dv/dnu) at the origin
    hopf_samples: int
    verdict: str
    extra: dict = field(default_factory=dict)


def counterexample_report(R: float = 1.0, h: float = 1 / 8, margin: float = 0.5) -> CounterexampleReport:
    """Two solutions of ``T w = 1/R`` on B(0, R) that touch along the t-axis.

    ``u = -sqrt(R^2 - t^2)`` and ``v = -sqrt(R^2 - |xi|^2)`` are evaluated on
    lattice nodes with ``|xi| <= R - margin h``. On the subdomain
    ``{y^2 < x}`` both have zero gradient at the boundary point 0, so their
    normal derivatives agree there although ``u <= v`` inside.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    m = int(np.ceil(R / h))
    ax = h * np.arange(-m, m + 1)
    xi = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)
    xi = xi[np.linalg.norm(xi, axis=1) <= R - margin * h]
    u, pu, Hu = _axis_solution(R, xi)
    v, pv, Hv = _ball_solution(R, xi)
    Tu = char_operator_value(pu, Hu)
    Tv = char_operator_value(pv, Hv)
    on_axis = (xi[:, 0] == 0) & (xi[:, 1] == 0)
    equal = u == v
    # Hopf subdomain {g < 0}, g = y^2 - x, with outer normal -e_x at 0
    g = xi[:, 1] ** 2 - xi[:, 0]
    origin = np.zeros((1, 3))
    nu = np.array([-1.0, 0.0, 0.0])
    du = float(_axis_solution(R, origin)[1][0] @ nu)
    dv = float(_ball_solution(R, origin)[1][0] @ nu)
    inside = g < 0
    strict_inside = bool(np.all(u[inside] < v[inside]))
    fails = du == dv and bool(np.all(u <= v)) and strict_inside
    return CounterexampleReport(
        R, len(xi),
        float(np.max(np.abs(Tu - 1 / R))), float(np.max(np.abs(Tv - 1 / R))),
        bool(np.all(u <= v)), bool(np.array_equal(equal, on_axis)), int(on_axis.sum()),
        (du, dv), int(inside.sum()),
        "Hopf conclusion fails" if fails else "Hopf conclusion holds",
        {"strictly_ordered_in_subdomain": strict_inside},
    )


__all__ = [
    "ComparisonReport", "comparison_experiment", "GradientBoundReport", "gradient_bound_check",
    "smallest_enclosing_ball", "SupBoundReport", "supbound_check", "barrier_pair", "evaluate",
    "SandwichReport", "sandwich_check", "CylinderReport", "cylinder_condition",
    "CounterexampleReport", "counterexample_report", "with_boundary_data",
]
