"""Identity suite behind ``charcurv verify``.

Each check returns a :class:`CheckRow` with the worst error seen over its
samples and the tolerance it is held to.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .catalog import cylinder1, cylinder2, random_ellipsoid, sphere
from .operator import (assemble_A, char_operator_n1, char_operator_value, null_eigenvectors,
                       principal_eigenpair, sigma)
from .surfaces import DefiningFunctionSurface, curvature_relation_residual
from .symplectic import characteristic_curvature_levelset


@dataclass(frozen=True)
class CheckRow:
    check_name: str
    samples: int
    max_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tol)


def check_outer_product(rng, d: int, samples: int) -> CheckRow:
    n = (d - 1) // 2
    p = rng.standard_normal((samples, d))
    A = assemble_A(p)
    ux, uy, ut = p[:, :n], p[:, n:2 * n], p[:, 2 * n]
    # blocks written out entry by entry
    B = np.empty_like(A)
    B[:, :n, :n] = uy[:, :, None] * uy[:, None, :]
    B[:, :n, n:2 * n] = -uy[:, :, None] * ux[:, None, :]
    B[:, n:2 * n, :n] = -ux[:, :, None] * uy[:, None, :]
    B[:, n:2 * n, n:2 * n] = ux[:, :, None] * ux[:, None, :]
    B[:, :n, 2 * n] = B[:, 2 * n, :n] = -uy
    B[:, n:2 * n, 2 * n] = B[:, 2 * n, n:2 * n] = ux
    B[:, 2 * n, 2 * n] = 1.0
    del ut
    return CheckRow(f"A_outer_product_d{d}", samples, float(np.max(np.abs(A - B))), 1e-15)


def check_spectrum(rng, d: int, samples: int) -> CheckRow:
    p = rng.standard_normal((samples, d))
    A = assemble_A(p)
    ev = np.linalg.eigvalsh(A)
    worst = 0.0
    for i in range(samples):
        _, lam = principal_eigenpair(p[i])
        expect = np.zeros(d)
        expect[-1] = lam
        worst = max(worst, float(np.max(np.abs(ev[i] - expect))))
    return CheckRow(f"A_spectrum_d{d}", samples, worst, 1e-10)


def check_null_vectors(rng, d: int, samples: int) -> CheckRow:
    p = rng.standard_normal((samples, d))
    worst = 0.0
    for i in range(samples):
        V = null_eigenvectors(p[i])
        worst = max(worst, float(np.max(np.abs(assemble_A(p[i]) @ V.T))))
        if np.linalg.matrix_rank(V) != d - 1:
            worst = np.inf
    return CheckRow(f"A_null_vectors_d{d}", samples, worst, 1e-12)


def check_n1_expansion(rng, samples: int) -> CheckRow:
    p = rng.standard_normal((samples, 3))
    L = rng.standard_normal((samples, 3, 3))
    L = 0.5 * (L + np.swapaxes(L, 1, 2))
    err = np.abs(char_operator_n1(p, L) - char_operator_value(p, L))
    return CheckRow("T_n1_expansion", samples, float(np.max(err)), 1e-12)


def check_catalog(rng, kind: str, R: float, n: int, samples: int) -> CheckRow:
    surf = {"sphere": sphere, "cylinder1": cylinder1, "cylinder2": cylinder2}[kind](R, n)
    pts = surf.sample(rng, samples)
    err = max(abs(characteristic_curvature_levelset(surf.H, z) - surf.curvature) for z in pts)
    return CheckRow(f"curvature_{kind}_R{R:g}_n{n}", samples, float(err), 1e-10)


def check_relation(rng, kind: str, n: int, samples: int, fd: bool = False) -> CheckRow:
    worst = 0.0
    for _ in range(samples if kind == "ellipsoid" else 1):
        if kind == "ellipsoid":
            surf = random_ellipsoid(n, rng)
        else:
            surf = {"sphere": sphere, "cylinder1": cylinder1, "cylinder2": cylinder2}[kind](1.0, n)
        f = surf.defining_function()
        if fd:
            f = f.values_only(1e-5)
        S = DefiningFunctionSurface(f)
        count = 1 if kind == "ellipsoid" else samples
        for z in surf.sample(rng, count):
            worst = max(worst, abs(curvature_relation_residual(S, z)))
    tag = "fd" if fd else "analytic"
    return CheckRow(f"relation_{kind}_n{n}_{tag}", samples, float(worst), 1e-6 if fd else 1e-10)


def check_sigma_trace(rng, d: int, samples: int) -> CheckRow:
    p = rng.standard_normal((samples, d))
    s = sigma(p)
    n = (d - 1) // 2
    err = np.abs(np.trace(assemble_A(p), axis1=1, axis2=2) - (1 + np.sum(p[:, :2 * n] ** 2, axis=1)))
    err = np.maximum(err, np.abs(np.sum(s * s, axis=1) - (1 + np.sum(p[:, :2 * n] ** 2, axis=1))))
    return CheckRow(f"A_trace_d{d}", samples, float(np.max(err)), 1e-12)


def verify_suite(samples: int = 100, seed: int = 0) -> List[CheckRow]:
    """Run every identity check with ``samples`` points each (at least 1)."""
    rng = np.random.default_rng(seed)
    rows = []
    for d in (3, 5, 7):
        rows.append(check_outer_product(rng, d, samples))
        rows.append(check_spectrum(rng, d, samples))
        rows.append(check_null_vectors(rng, d, samples))
        rows.append(check_sigma_trace(rng, d, samples))
    rows.append(check_n1_expansion(rng, samples))
    for n in (1, 2, 3):
        for R in (0.5, 1.0, 2.0):
            rows.append(check_catalog(rng, "sphere", R, n, samples))
    for kind in ("cylinder1", "cylinder2"):
        rows.append(check_catalog(rng, kind, 1.0, 1, samples))
    for n in (1, 2):
        for kind in ("sphere", "cylinder1", "cylinder2", "ellipsoid"):
            rows.append(check_relation(rng, kind, n, samples))
        rows.append(check_relation(rng, "ellipsoid", n, samples, fd=True))
    return rows
