"""Lattice discretisation of three-dimensional domains.

Nodes are classified as interior (``rho < 0``), boundary (outside but within
the 18-point stencil of an interior node: faces and edges of the unit cell)
or exterior. Boundary nodes carry Dirichlet data evaluated at the node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import GridError
from ..operator import GraphJet

EXTERIOR, BOUNDARY, INTERIOR = 0, 1, 2
CLASS_NAMES = {EXTERIOR: "exterior", BOUNDARY: "boundary", INTERIOR: "interior"}

# axis offsets followed by edge-diagonal offsets (the cross-derivative stencil)
AXIS_OFFSETS = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
EDGE_OFFSETS = [
    off
    for a in range(3)
    for b in range(a + 1, 3)
    for sa in (1, -1)
    for sb in (1, -1)
    for off in [tuple(sa if i == a else sb if i == b else 0 for i in range(3))]
]


@dataclass
class DomainSpec:
    """Bounded domain ``{rho < 0}`` in R^3.

    ``kind`` is ``"box"`` (``lower``/``upper``), ``"ball"`` (``center``/``radius``),
    ``"ellipsoid"`` (``center``/``axes``) or ``"levelset"`` (vectorised ``rho``
    plus a bounding box).
    """

    kind: str
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    radius: Optional[float] = None
    rho_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    rho_grad_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    axes: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == "box":
            self.lower = np.asarray(self.lower, dtype=float)
            self.upper = np.asarray(self.upper, dtype=float)
            if self.lower.shape != (3,) or np.any(self.upper <= self.lower):
                raise GridError("box needs 3-vectors with lower < upper")
        elif self.kind == "ball":
            self.center = np.zeros(3) if self.center is None else np.asarray(self.center, dtype=float)
            if self.radius is None or not self.radius > 0:
                raise GridError("ball needs a positive radius")
            self.radius = float(self.radius)
        elif self.kind == "ellipsoid":
            self.center = np.zeros(3) if self.center is None else np.asarray(self.center, dtype=float)
            self.axes = np.asarray(self.axes, dtype=float)
            if self.axes.shape != (3,) or np.any(self.axes <= 0):
                raise GridError("ellipsoid needs three positive semi-axes")
        elif self.kind == "levelset":
            if self.rho_fn is None or self.lower is None or self.upper is None:
                raise GridError("levelset domain needs rho and a bounding box")
            self.lower = np.asarray(self.lower, dtype=float)
            self.upper = np.asarray(self.upper, dtype=float)
        else:
            raise GridError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def box(cls, lower=(0, 0, 0), upper=(1, 1, 1)):
        return cls("box", lower=lower, upper=upper)

    @classmethod
    def ball(cls, radius=1.0, center=(0, 0, 0)):
        return cls("ball", center=center, radius=radius)

    @classmethod
    def ellipsoid(cls, axes, center=(0, 0, 0)):
        return cls("ellipsoid", center=center, axes=axes)

    def rho(self, pts) -> np.ndarray:
        """Defining function, negative inside. For balls ``(|x-c|^2 - R^2)/2``."""
        pts = np.asarray(pts, dtype=float)
        if self.kind == "ball":
            d = pts - self.center
            return 0.5 * (np.sum(d * d, axis=-1) - self.radius**2)
        if self.kind == "ellipsoid":
            d = (pts - self.center) / self.axes
            return 0.5 * (np.sum(d * d, axis=-1) - 1.0)
        if self.kind == "box":
            mid = 0.5 * (self.lower + self.upper)
            half = 0.5 * (self.upper - self.lower)
            return np.max(np.abs(pts - mid) - half, axis=-1)
        return np.asarray(self.rho_fn(pts), dtype=float)

    def rho_grad(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.kind == "ball":
            return pts - self.center
        if self.kind == "ellipsoid":
            return (pts - self.center) / self.axes**2
        if self.rho_grad_fn is not None:
            return np.asarray(self.rho_grad_fn(pts), dtype=float)
        raise GridError(f"no gradient of rho available for a {self.kind} domain")

    def rho_hess(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.kind == "ball":
            H = np.eye(3)
        elif self.kind == "ellipsoid":
            H = np.diag(1.0 / self.axes**2)
        else:
            raise GridError(f"no Hessian of rho available for a {self.kind} domain")
        return np.broadcast_to(H, pts.shape[:-1] + (3, 3)).copy()

    def bounds(self):
        if self.kind == "ball":
            return self.center - self.radius, self.center + self.radius
        if self.kind == "ellipsoid":
            return self.center - self.axes, self.center + self.axes
        return self.lower, self.upper


@dataclass
class GridField:
    """Values on an axis-aligned lattice ``origin + h * (i, j, l)``."""

    origin: np.ndarray
    h: float
    cls: np.ndarray  # int8, shape (nx, ny, nt)
    u: np.ndarray  # float, same shape; NaN on exterior nodes
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.cls.shape

    @property
    def interior(self) -> np.ndarray:
        return self.cls == INTERIOR

    @property
    def boundary(self) -> np.ndarray:
        return self.cls == BOUNDARY

    def coords(self) -> np.ndarray:
        """Node coordinates, shape ``shape + (3,)``."""
        idx = np.indices(self.shape, dtype=float)
        return self.origin + self.h * np.moveaxis(idx, 0, -1)

    def node_coords(self, node) -> np.ndarray:
        return self.origin + self.h * np.asarray(node, dtype=float)

    def copy(self, u=None) -> "GridField":
        return GridField(self.origin.copy(), self.h, self.cls.copy(),
                         self.u.copy() if u is None else u, dict(self.meta))

    def count(self, kind: int = INTERIOR) -> int:
        return int(np.count_nonzero(self.cls == kind))


def _lattice(domain: DomainSpec, h: float):
    lo, hi = domain.bounds()
    if domain.kind in ("ball", "ellipsoid"):
        half = domain.radius if domain.kind == "ball" else domain.axes
        m = np.ceil(np.broadcast_to(half, (3,)) / h - 1e-9).astype(int) + 2
        origin = domain.center - m * h
        shape = tuple(int(2 * k + 1) for k in m)
    elif domain.kind == "box":
        # round up so the last node is never inside the box
        n = np.ceil((hi - lo) / h - 1e-9).astype(int)
        origin = lo.copy()
        shape = tuple(int(k) + 1 for k in n)
    else:
        origin = lo - 2 * h
        shape = tuple(int(np.ceil((b - a) / h - 1e-9)) + 5 for a, b in zip(lo, hi))
    return np.asarray(origin, dtype=float), shape


def _dilate(mask: np.ndarray, offsets) -> np.ndarray:
    out = np.zeros_like(mask)
    nx, ny, nt = mask.shape
    for di, dj, dl in offsets:
        src = mask[max(-di, 0): nx - max(di, 0), max(-dj, 0): ny - max(dj, 0), max(-dl, 0): nt - max(dl, 0)]
        out[max(di, 0): nx - max(-di, 0), max(dj, 0): ny - max(-dj, 0), max(dl, 0): nt - max(-dl, 0)] |= src
    return out


def classify(domain: DomainSpec, h: float):
    origin, shape = _lattice(domain, h)
    idx = np.moveaxis(np.indices(shape, dtype=float), 0, -1)
    pts = origin + h * idx
    rho = domain.rho(pts)
    inside = rho < -1e-12 * max(h, 1.0)
    # interior nodes on the lattice edge would lack stencil neighbours
    edge = np.zeros(shape, dtype=bool)
    edge[[0, -1], :, :] = edge[:, [0, -1], :] = edge[:, :, [0, -1]] = True
    if np.any(inside & edge):
        raise GridError("domain touches the lattice edge; enlarge the bounding box")
    near = _dilate(inside, AXIS_OFFSETS + EDGE_OFFSETS)
    cls = np.full(shape, EXTERIOR, dtype=np.int8)
    cls[near & ~inside] = BOUNDARY
    cls[inside] = INTERIOR
    return origin, cls


def laplace_extension(field_: GridField) -> np.ndarray:
    """Solve the 7-point discrete Laplace equation with the boundary values."""
    cls = field_.cls
    interior = cls == INTERIOR
    unknown = -np.ones(cls.shape, dtype=np.int64)
    unknown[interior] = np.arange(np.count_nonzero(interior))
    nodes = np.argwhere(interior)
    rows, cols, vals = [], [], []
    m = nodes.shape[0]
    rhs = np.zeros(m)
    rows.append(np.arange(m))
    cols.append(np.arange(m))
    vals.append(np.full(m, -6.0))
    for off in AXIS_OFFSETS:
        nb = nodes + off
        nb_idx = unknown[nb[:, 0], nb[:, 1], nb[:, 2]]
        is_u = nb_idx >= 0
        rows.append(np.nonzero(is_u)[0])
        cols.append(nb_idx[is_u])
        vals.append(np.ones(np.count_nonzero(is_u)))
        bvals = field_.u[nb[~is_u, 0], nb[~is_u, 1], nb[~is_u, 2]]
        rhs[~is_u] -= bvals
    A = sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(m, m))
    sol = spla.spsolve(A, rhs)
    out = field_.u.copy()
    out[interior] = sol
    return out


def build_grid(domain: DomainSpec, h: float, phi, init: str = "laplace") -> GridField:
    """Classify lattice nodes and initialise values.

    ``phi`` is a vectorised callable on point arrays of shape ``(..., 3)``.
    Boundary nodes get ``phi``; interior nodes get the discrete harmonic
    extension (``init="laplace"``) or ``phi`` itself (``init="phi"``).
    """
    if not h > 0:
        raise GridError("grid spacing must be positive")
    origin, cls = classify(domain, h)
    if not np.any(cls == INTERIOR):
        raise GridError(f"h = {h:g} is too coarse: no interior nodes")
    g = GridField(origin, float(h), cls, np.full(cls.shape, np.nan), {"domain": domain})
    pts = g.coords()
    active = cls != EXTERIOR
    g.u[active] = np.asarray(phi(pts[active]), dtype=float)
    if init == "laplace":
        g.u = laplace_extension(g)
    elif init != "phi":
        raise GridError(f"unknown initialisation {init!r}")
    return g


def grid_gradients(u: np.ndarray, h: float) -> np.ndarray:
    """Central-difference gradient at every node not on the lattice edge.

    Returns an array of shape ``u.shape + (3,)`` with NaN on the lattice edge.
    """
    g = np.full(u.shape + (3,), np.nan)
    c = (slice(1, -1),) * 3
    g[c + (0,)] = (u[2:, 1:-1, 1:-1] - u[:-2, 1:-1, 1:-1]) / (2 * h)
    g[c + (1,)] = (u[1:-1, 2:, 1:-1] - u[1:-1, :-2, 1:-1]) / (2 * h)
    g[c + (2,)] = (u[1:-1, 1:-1, 2:] - u[1:-1, 1:-1, :-2]) / (2 * h)
    return g


def grid_hessians(u: np.ndarray, h: float) -> np.ndarray:
    """Second differences (3-point diagonal, 4-point centred cross terms)."""
    H = np.full(u.shape + (3, 3), np.nan)
    c = (slice(1, -1),) * 3
    uc = u[c]

    def shifted(di, dj, dl):
        nx, ny, nt = u.shape
        return u[1 + di: nx - 1 + di, 1 + dj: ny - 1 + dj, 1 + dl: nt - 1 + dl]

    unit = np.eye(3, dtype=int)
    for a in range(3):
        e = unit[a]
        H[c + (a, a)] = (shifted(*e) - 2 * uc + shifted(*-e)) / h**2
        for b in range(a + 1, 3):
            f = unit[b]
            val = (shifted(*(e + f)) - shifted(*(e - f)) - shifted(*(f - e)) + shifted(*(-e - f))) / (4 * h**2)
            H[c + (a, b)] = H[c + (b, a)] = val
    return H


def discrete_jet(grid: GridField, node) -> GraphJet:
    i, j, l = (int(v) for v in node)
    if not (0 <= i < grid.shape[0] and 0 <= j < grid.shape[1] and 0 <= l < grid.shape[2]):
        raise GridError(f"node {node} outside the lattice")
    if grid.cls[i, j, l] != INTERIOR:
        raise GridError(f"node {node} is {CLASS_NAMES[int(grid.cls[i, j, l])]}, not interior")
    sub = grid.u[i - 1: i + 2, j - 1: j + 2, l - 1: l + 2]
    p = grid_gradients(sub, grid.h)[1, 1, 1]
    H = grid_hessians(sub, grid.h)[1, 1, 1]
    return GraphJet(p, H)


def interior_jets(grid: GridField, u: Optional[np.ndarray] = None):
    """Gradients and Hessians at all interior nodes (in ``argwhere`` order)."""
    u = grid.u if u is None else u
    mask = grid.interior
    return grid_gradients(u, grid.h)[mask], grid_hessians(u, grid.h)[mask]


def boundary_adjacent(grid: GridField) -> np.ndarray:
    """Interior nodes having at least one boundary node in their stencil."""
    near_bnd = _dilate(grid.boundary, AXIS_OFFSETS + EDGE_OFFSETS)
    return grid.interior & near_bnd
