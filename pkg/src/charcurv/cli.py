"""Command-line entry point: ``charcurv <subcommand> --config <path> [--out <dir>]``.

Exit codes: 0 success, 1 failure, 2 gradient blow-up diagnosed by the solver.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from .catalog import make_surface
from .checks import verify_suite
from .config import SUBCOMMANDS, RunConfig, load_config
from .errors import ConfigError, EnergyDriftError, GridError, SolverError
from .operator import CurvatureSpec
from .surfaces import (DefiningFunctionSurface, levi_mean_curvature, mean_curvature,
                       curvature_relation_residual)
from .symplectic import characteristic_curvature_levelset, curvature_along_curve, integrate_characteristic_curve

logger = logging.getLogger("charcurv")

EXIT_OK, EXIT_FAIL, EXIT_BLOWUP = 0, 1, 2


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


# -- builders from the configuration -------------------------------------------


def curvature_from(cfg: RunConfig) -> CurvatureSpec:
    if cfg.k.kind == "constant":
        return CurvatureSpec.constant(cfg.k.value)
    return CurvatureSpec.affine(cfg.k.a, cfg.k.b)


def domain_from(cfg: RunConfig):
    from .solver.grid import DomainSpec

    d = cfg.domain
    if d.kind == "ball":
        return DomainSpec.ball(d.radius, d.center)
    if d.kind == "ellipsoid":
        return DomainSpec.ellipsoid(d.axes, d.center)
    return DomainSpec.box(d.lower, d.upper)


def data_from(cfg: RunConfig):
    """Vectorised boundary data on point arrays of shape ``(..., 3)``."""
    d = cfg.data
    if d.kind == "zero":
        return lambda P: np.zeros(np.shape(P)[:-1])
    if d.kind == "affine":
        c = np.asarray(d.coeffs, dtype=float)
        return lambda P: c[0] + np.asarray(P) @ c[1:]
    R = d.R
    return lambda P: -np.sqrt(np.maximum(R * R - np.sum(np.asarray(P) ** 2, axis=-1), 0.0))


def closed_form(cfg: RunConfig):
    """Exact solution for the data/curvature pairs that have one, else None."""
    k = cfg.k
    zero_k = (k.kind == "constant" and k.value == 0) or (k.kind == "affine" and k.a == 0 and k.b == 0)
    if cfg.data.kind in ("zero", "affine") and zero_k:
        return data_from(cfg)
    if cfg.data.kind == "hemisphere" and k.kind == "constant" and k.value == 1.0 / cfg.data.R:
        return data_from(cfg)
    return None


def solver_config(cfg: RunConfig):
    from .solver.picard import SolverConfig

    s = cfg.solve
    thr = None if not np.isfinite(s.blowup_threshold) else s.blowup_threshold
    return SolverConfig(s.eps_schedule, s.damping, s.max_iter, s.tol, s.lin_tol, s.blowup_factor, thr)


# -- subcommands ---------------------------------------------------------------------


def run_verify(cfg: RunConfig, out: Path) -> int:
    rows = verify_suite(cfg.verify.samples, cfg.verify.seed)
    write_csv(out / "verify.csv", ["check_name", "samples", "max_error", "pass"],
              [(r.check_name, r.samples, r.max_error, r.passed) for r in rows])
    failed = [r for r in rows if not r.passed]
    for r in failed:
        print(f"FAIL {r.check_name}: max_error {r.max_error:.3e} > {r.tol:.1e}", file=sys.stderr)
    print(f"{len(rows) - len(failed)}/{len(rows)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


def _surface(cfg: RunConfig):
    s = cfg.surface
    return make_surface(s.kind, s.R, s.n, s.axes or None)


def run_curvature(cfg: RunConfig, out: Path) -> int:
    surf = _surface(cfg)
    S = DefiningFunctionSurface(surf.defining_function())
    pts = surf.sample(np.random.default_rng(cfg.verify.seed), cfg.verify.samples)
    d = pts.shape[1]
    rows = []
    for z in pts:
        C = characteristic_curvature_levelset(surf.H, z)
        rows.append((*z, C, mean_curvature(S, z), levi_mean_curvature(S, z), curvature_relation_residual(S, z)))
    header = [f"z{i + 1}" for i in range(d)] + ["C", "H", "L", "residual"]
    write_csv(out / "curvature.csv", header, rows)
    worst = max(abs(r[-1]) for r in rows)
    print(f"{len(rows)} points, max relation residual {worst:.3e}")
    return EXIT_OK if worst <= 1e-10 else EXIT_FAIL


def run_trajectory(cfg: RunConfig, out: Path) -> int:
    surf = _surface(cfg)
    t = cfg.trajectory
    z0 = np.asarray(t.start, dtype=float) if t.start else surf.sample(np.random.default_rng(t.seed), 1)[0]
    try:
        traj = integrate_characteristic_curve(surf.H, z0, t.t_end, t.dt)
    except (EnergyDriftError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    curv = curvature_along_curve(surf.H, traj)
    keep = list(range(0, len(traj.times), t.every))
    if keep[-1] != len(traj.times) - 1:
        keep.append(len(traj.times) - 1)
    d = traj.states.shape[1]
    rows = [(traj.times[i], *traj.states[i], surf.H.value(traj.states[i]), curv[i]) for i in keep]
    header = ["t"] + [f"z{i + 1}" for i in range(d)] + ["H", "curvature"]
    write_csv(out / "trajectory.csv", header, rows)
    print(f"{len(traj.times)} steps, curvature range [{curv.min():.12g}, {curv.max():.12g}]")
    return EXIT_OK


def _solve(cfg: RunConfig):
    from .solver.grid import build_grid
    from .solver.picard import continuation_solve

    grid = build_grid(domain_from(cfg), cfg.solve.h, data_from(cfg))
    field, report = continuation_solve(grid, curvature_from(cfg), solver_config(cfg))
    return grid, field, report


def _report_rows(report):
    return [(s.eps, s.iterations, s.max_residual, s.max_grad, s.converged) for s in report.stages]


def _exit_for(report) -> int:
    if report.diagnosis == "gradient-blow-up":
        return EXIT_BLOWUP
    return EXIT_OK if report.converged else EXIT_FAIL


def run_solve(cfg: RunConfig, out: Path) -> int:
    from .solver.grid import CLASS_NAMES, EXTERIOR

    try:
        grid, field, report = _solve(cfg)
    except (GridError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    pts = field.coords()
    rows = []
    for i, j, l in np.argwhere(field.cls != EXTERIOR):
        x, y, t = pts[i, j, l]
        rows.append((i, j, l, x, y, t, CLASS_NAMES[int(field.cls[i, j, l])], field.u[i, j, l]))
    write_csv(out / "field.csv", ["i", "j", "l", "x", "y", "t", "class", "u"], rows)
    write_csv(out / "report.csv", ["eps", "iters", "max_residual", "max_grad", "converged"], _report_rows(report))
    summary = [("diagnosis", report.diagnosis), ("blowup_threshold", report.blowup_threshold),
               ("interior_nodes", field.count())]
    exact = closed_form(cfg)
    if exact is not None:
        err = np.abs(field.u - exact(pts))[field.interior]
        summary.append(("max_error", float(np.max(err))))
    write_csv(out / "summary.csv", ["key", "value"], summary)
    print(f"diagnosis: {report.diagnosis}")
    return _exit_for(report)


def run_probe(cfg: RunConfig, out: Path) -> int:
    """Solve and relate the outcome to the enclosing radius and the cylinder condition."""
    from .solver.experiments import cylinder_condition, smallest_enclosing_ball

    try:
        grid, field, report = _solve(cfg)
    except (GridError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    k = curvature_from(cfg)
    domain = domain_from(cfg)
    pts = grid.coords()[grid.interior]
    _, R = smallest_enclosing_ball(pts)
    if domain.kind == "ball":
        R = domain.radius
    ksup = k.sup(pts)
    cyl = cylinder_condition(domain, k)
    write_csv(out / "report.csv", ["eps", "iters", "max_residual", "max_grad", "converged"], _report_rows(report))
    write_csv(out / "probe.csv", ["key", "value"], [
        ("diagnosis", report.diagnosis), ("enclosing_radius", R), ("sup_k", ksup), ("kR", ksup * R),
        ("blowup_threshold", report.blowup_threshold), ("cylinder_condition", cyl.status),
        ("cylinder_margin", cyl.min_margin),
    ])
    print(f"diagnosis: {report.diagnosis} (sup k * R = {ksup * R:.6g})")
    return _exit_for(report)


def run_counterexample(cfg: RunConfig, out: Path) -> int:
    from .solver.experiments import counterexample_report

    rep = counterexample_report(cfg.counterexample.R, cfg.counterexample.h)
    rows = [
        ("R", rep.R), ("samples", rep.samples), ("max_dev_Tu", rep.max_dev_u), ("max_dev_Tv", rep.max_dev_v),
        ("u_le_v", rep.ordered), ("equality_on_axis_only", rep.equality_on_axis_only),
        ("axis_samples", rep.axis_samples), ("du_dnu_origin", rep.normal_derivatives[0]),
        ("dv_dnu_origin", rep.normal_derivatives[1]), ("subdomain_samples", rep.hopf_samples),
        ("verdict", rep.verdict),
    ]
    write_csv(out / "counterexample.csv", ["key", "value"], rows)
    print(rep.verdict)
    ok = max(rep.max_dev_u, rep.max_dev_v) <= 1e-10 and rep.ordered and rep.equality_on_axis_only
    return EXIT_OK if ok else EXIT_FAIL


RUNNERS = {
    "verify": run_verify,
    "curvature": run_curvature,
    "trajectory": run_trajectory,
    "solve": run_solve,
    "probe": run_probe,
    "counterexample": run_counterexample,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="charcurv", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="key = value configuration file")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if cfg.subcommand != args.subcommand:
        # the command line wins; the file may be shared between subcommands
        from dataclasses import replace

        cfg = replace(cfg, subcommand=args.subcommand)
    return RUNNERS[args.subcommand](cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
