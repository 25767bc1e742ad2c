"""Frozen-coefficient (Picard) iteration for the regularised Dirichlet problem

    -tr(A^eps(Du) D^2u) / (1+|Du|^2)^{3/2} + k(x, u) = 0   in the domain,
    u = phi                                               on the boundary,

and the warm-started sweep over a decreasing eps schedule.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import DivergenceError, LinearSolveError
from ..operator import CurvatureSpec, char_operator_value, scaled_A
from .grid import AXIS_OFFSETS, EDGE_OFFSETS, GridField, boundary_adjacent, grid_gradients, interior_jets

logger = logging.getLogger(__name__)

DEFAULT_SCHEDULE = (1.0, 1e-1, 1e-2, 1e-3, 1e-4)


@dataclass
class SolverConfig:
    eps_schedule: Sequence[float] = DEFAULT_SCHEDULE
    damping: float = 0.7
    max_iter: int = 200
    tol: float = 1e-8
    lin_tol: float = 1e-10
    blowup_factor: float = 50.0
    # absolute gradient threshold; overrides blowup_factor when set
    blowup_threshold: Optional[float] = None
    divergence_window: int = 5

    def __post_init__(self):
        sched = [float(e) for e in self.eps_schedule]
        if not sched:
            raise ValueError("eps schedule is empty")
        if any(b >= a for a, b in zip(sched, sched[1:])) or sched[-1] <= 0:
            raise ValueError("eps schedule must be strictly decreasing and positive")
        self.eps_schedule = tuple(sched)
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.max_iter < 1 or self.tol <= 0 or self.lin_tol <= 0:
            raise ValueError("max_iter, tol and lin_tol must be positive")


@dataclass
class StageRecord:
    eps: float
    iterations: int
    max_residual: float
    max_grad: float
    converged: bool
    status: str  # converged | gradient-blow-up | max-iterations | diverged | linear-failure
    history: List[float] = field(default_factory=list)
    grad_history: List[float] = field(default_factory=list)


@dataclass
class SolverReport:
    stages: List[StageRecord] = field(default_factory=list)
    diagnosis: str = "converged"
    blowup_threshold: float = float("nan")

    @property
    def converged(self) -> bool:
        return self.diagnosis == "converged"

    def max_grads(self) -> np.ndarray:
        return np.array([s.max_grad for s in self.stages])


class _Stencil:
    """Interior-node indexing and neighbour lookups, built once per grid."""

    OFFSETS = AXIS_OFFSETS + EDGE_OFFSETS

    def __init__(self, grid: GridField):
        self.grid = grid
        mask = grid.interior
        self.nodes = np.argwhere(mask)
        self.m = self.nodes.shape[0]
        self.unknown = -np.ones(grid.shape, dtype=np.int64)
        self.unknown[mask] = np.arange(self.m)
        self.points = grid.coords()[mask]
        self.nb = []
        for off in self.OFFSETS:
            q = self.nodes + off
            idx = self.unknown[q[:, 0], q[:, 1], q[:, 2]]
            self.nb.append((idx, q))

    def weights(self, coef: np.ndarray) -> List[np.ndarray]:
        """Stencil weights for ``tr(coef D^2 w)``, matching ``self.OFFSETS``."""
        h2 = self.grid.h ** 2
        w = []
        for off in self.OFFSETS:
            nz = [a for a in range(3) if off[a] != 0]
            if len(nz) == 1:
                a = nz[0]
                w.append(coef[:, a, a] / h2)
            else:
                a, b = nz
                sign = off[a] * off[b]
                w.append(sign * coef[:, a, b] / (2 * h2))
        return w

    def assemble(self, coef: np.ndarray, u: np.ndarray):
        m = self.m
        h2 = self.grid.h ** 2
        diag = -2.0 * np.trace(coef, axis1=1, axis2=2) / h2
        rows = [np.arange(m)]
        cols = [np.arange(m)]
        vals = [diag]
        bnd = np.zeros(m)
        for (idx, q), wt in zip(self.nb, self.weights(coef)):
            is_u = idx >= 0
            rows.append(np.nonzero(is_u)[0])
            cols.append(idx[is_u])
            vals.append(wt[is_u])
            ext = ~is_u
            bnd[ext] += wt[ext] * u[q[ext, 0], q[ext, 1], q[ext, 2]]
        A = sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(m, m))
        return A, bnd


def residual_field(grid: GridField, u: np.ndarray, k: CurvatureSpec, eps: float) -> np.ndarray:
    """``F^eps`` at interior nodes from discrete jets of ``u``."""
    p, H = interior_jets(grid, u)
    pts = grid.coords()[grid.interior]
    return -char_operator_value(p, H, eps) + k(pts, u[grid.interior])


def max_interior_gradient(grid: GridField, u: Optional[np.ndarray] = None) -> float:
    u = grid.u if u is None else u
    g = grid_gradients(u, grid.h)[grid.interior]
    return float(np.max(np.linalg.norm(g, axis=-1)))


def boundary_gradient_scale(grid: GridField) -> float:
    """Largest discrete gradient next to the boundary; sets the blow-up scale."""
    g = grid_gradients(grid.u, grid.h)[boundary_adjacent(grid)]
    return float(np.max(np.linalg.norm(g, axis=-1))) if g.size else 0.0


class _LinearSolver:
    """GMRES preconditioned by an incomplete LU that is reused across Picard
    iterations and refreshed when it stops being effective. Falls back to a
    sparse direct solve."""

    def __init__(self, lin_tol: float, drop_tol: float = 1e-3, fill_factor: float = 10.0,
                 max_inner: int = 80, max_restarts: int = 4):
        self.lin_tol = lin_tol
        self.drop_tol = drop_tol
        self.fill_factor = fill_factor
        self.max_inner = max_inner
        self.max_restarts = max_restarts
        self._ilu = None

    def reset(self):
        self._ilu = None

    def _gmres(self, A, b, x0):
        M = spla.LinearOperator(A.shape, self._ilu.solve)
        count = [0]

        def cb(_):
            count[0] += 1

        x, info = spla.gmres(A, b, x0=x0, M=M, rtol=self.lin_tol, atol=0.0,
                             restart=self.max_inner, maxiter=self.max_restarts, callback=cb,
                             callback_type="pr_norm")
        return x, info, count[0]

    def _ok(self, A, b, x):
        if not np.all(np.isfinite(x)):
            return False
        return np.linalg.norm(A @ x - b) <= self.lin_tol * max(np.linalg.norm(b), 1e-300)

    def _factor(self, A):
        try:
            self._ilu = spla.spilu(A, drop_tol=self.drop_tol, fill_factor=self.fill_factor)
        except RuntimeError:  # singular incomplete factor
            self._ilu = None

    def _direct(self, A, b):
        try:
            x = spla.spsolve(A, b)
        except RuntimeError as exc:
            raise LinearSolveError(f"direct solve failed: {exc}") from exc
        if not self._ok(A, b, x):
            raise LinearSolveError(f"linear solve did not reach relative residual {self.lin_tol:.1e}")
        return x

    def solve(self, A, b, x0=None):
        if not np.any(b) and x0 is None:
            return np.zeros_like(b)
        fresh = False
        if self._ilu is None:
            self._factor(A)
            fresh = True
            if self._ilu is None:
                return self._direct(A, b)
        x, info, inner = self._gmres(A, b, x0)
        if (info != 0 or inner > self.max_inner or not self._ok(A, b, x)) and not fresh:
            self._factor(A)
            if self._ilu is None:
                return self._direct(A, b)
            x, info, inner = self._gmres(A, b, x0)
        if info == 0 and self._ok(A, b, x):
            return x
        return self._direct(A, b)


def picard_solve(
    grid: GridField,
    k: CurvatureSpec,
    eps: float,
    config: SolverConfig | None = None,
    grad_limit: float = np.inf,
    _stencil: _Stencil | None = None,
):
    """Damped Picard iteration for one value of ``eps``.

    Each step freezes the coefficients at the current iterate ``u`` and solves
    ``tr(A^eps(Du) D^2w)/(1+|Du|^2)^{3/2} = k(x, u)`` with the boundary values
    of ``grid``; the update is ``u <- theta w + (1 - theta) u``.

    Returns the final field and a :class:`StageRecord`. Raises
    :class:`DivergenceError` when the residual grows over
    ``config.divergence_window`` consecutive iterations.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    config = config or SolverConfig()
    st = _stencil or _Stencil(grid)
    solver = _LinearSolver(config.lin_tol)
    mask = grid.interior
    u = grid.u.copy()
    theta = config.damping

    r = residual_field(grid, u, k, eps)
    res = float(np.max(np.abs(r)))
    grad = max_interior_gradient(grid, u)
    history = [res]
    grads = [grad]
    it = 0
    status = "max-iterations"
    growth = 0
    while True:
        if not np.isfinite(res):
            status = "diverged"
            break
        if res <= config.tol:
            status = "converged"
            break
        if grad > grad_limit:
            status = "gradient-blow-up"
            break
        if it >= config.max_iter:
            break
        # frozen operator L at u: L w = k(x, u) with w = u + delta gives
        # L delta = k - L u, which is exactly the current residual
        p, _ = interior_jets(grid, u)
        A, _ = st.assemble(scaled_A(p, eps), u)
        delta = solver.solve(A, r)
        u = u.copy()
        u[mask] += theta * delta
        it += 1
        prev = res
        r = residual_field(grid, u, k, eps)
        res = float(np.max(np.abs(r)))
        grad = max_interior_gradient(grid, u)
        history.append(res)
        grads.append(grad)
        logger.debug("eps=%g it=%d residual=%.3e grad=%.3e", eps, it, res, grad)
        growth = growth + 1 if res > prev else 0
        if growth >= config.divergence_window and grad <= grad_limit:
            record = StageRecord(eps, it, res, grad, False, "diverged", history, grads)
            raise DivergenceError(
                f"residual grew over {growth} consecutive iterations (eps={eps:g})",
                grid.copy(u), record,
            )
    record = StageRecord(eps, it, res, grad, status == "converged", status, history, grads)
    return grid.copy(u), record


def continuation_solve(grid: GridField, k: CurvatureSpec, config: SolverConfig | None = None):
    """Warm-started sweep of :func:`picard_solve` over ``config.eps_schedule``.

    Each stage starts from the last converged field (the initial grid for the
    first stage); a blown-up or diverged iterate is never used as a warm start.
    Stage failures are recorded, not raised. The diagnosis is
    ``gradient-blow-up`` when any stage exceeds the gradient threshold,
    otherwise the first non-converged stage status.

    Returns ``(field, report)`` where ``field`` is the final iterate of the
    last stage.
    """
    config = config or SolverConfig()
    st = _Stencil(grid)
    if config.blowup_threshold is not None:
        threshold = float(config.blowup_threshold)
    else:
        threshold = config.blowup_factor * (1.0 + boundary_gradient_scale(grid))
    report = SolverReport(blowup_threshold=threshold)
    start = current = grid
    for eps in config.eps_schedule:
        try:
            current, rec = picard_solve(start, k, eps, config, grad_limit=threshold, _stencil=st)
        except DivergenceError as exc:
            rec, current = exc.record, exc.field
        except LinearSolveError as exc:
            logger.warning("eps=%g: %s", eps, exc)
            rec = StageRecord(eps, 0, float("nan"), float("nan"), False, "linear-failure")
            current = start
        report.stages.append(rec)
        if rec.converged:
            start = current
    statuses = [s.status for s in report.stages]
    if "gradient-blow-up" in statuses or any(s.max_grad > threshold for s in report.stages):
        report.diagnosis = "gradient-blow-up"
    else:
        bad = [s for s in statuses if s != "converged"]
        report.diagnosis = bad[0] if bad else "converged"
    return current, report
