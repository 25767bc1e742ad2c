"""Run configuration: ``section.key = value`` lines with ``#`` comments.

Every key has a documented default; unknown keys are rejected. Lists are
comma separated. :func:`emit_config` writes a document that parses back to
an equal :class:`RunConfig`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Tuple

from .errors import ConfigError

SUBCOMMANDS = ("verify", "curvature", "trajectory", "solve", "probe", "counterexample")


@dataclass(frozen=True)
class SurfaceConfig:
    kind: str = "sphere"  # sphere | cylinder1 | cylinder2 | ellipsoid
    R: float = 1.0
    n: int = 1
    axes: Tuple[float, ...] = ()


@dataclass(frozen=True)
class DomainConfig:
    kind: str = "ball"  # ball | box | ellipsoid
    radius: float = 1.0
    center: Tuple[float, ...] = (0.0, 0.0, 0.0)
    lower: Tuple[float, ...] = (0.0, 0.0, 0.0)
    upper: Tuple[float, ...] = (1.0, 1.0, 1.0)
    axes: Tuple[float, ...] = (1.0, 1.0, 1.0)


@dataclass(frozen=True)
class DataConfig:
    # zero | affine: c0 + c . xi | hemisphere: -sqrt(R^2 - |xi|^2)
    kind: str = "zero"
    coeffs: Tuple[float, ...] = (0.0, 0.0, 0.0, 0.0)
    R: float = 2.0


@dataclass(frozen=True)
class KConfig:
    kind: str = "constant"  # constant: value | affine: a + b r
    value: float = 0.0
    a: float = 0.0
    b: float = 0.0


@dataclass(frozen=True)
class SolveConfig:
    h: float = 0.125
    eps_schedule: Tuple[float, ...] = (1.0, 1e-1, 1e-2, 1e-3, 1e-4)
    damping: float = 0.7
    max_iter: int = 200
    tol: float = 1e-8
    lin_tol: float = 1e-10
    blowup_factor: float = 50.0
    blowup_threshold: float = math.inf  # inf means "use blowup_factor"


@dataclass(frozen=True)
class TrajectoryConfig:
    t_end: float = 2 * math.pi
    dt: float = 1e-3
    start: Tuple[float, ...] = ()  # empty: a point on the surface picked from seed
    seed: int = 0
    every: int = 10


@dataclass(frozen=True)
class VerifyConfig:
    samples: int = 100
    seed: int = 0


@dataclass(frozen=True)
class CounterexampleConfig:
    R: float = 1.0
    h: float = 0.125


@dataclass(frozen=True)
class RunConfig:
    subcommand: str = "verify"
    surface: SurfaceConfig = field(default_factory=SurfaceConfig)
    domain: DomainConfig = field(default_factory=DomainConfig)
    data: DataConfig = field(default_factory=DataConfig)
    k: KConfig = field(default_factory=KConfig)
    solve: SolveConfig = field(default_factory=SolveConfig)
    trajectory: TrajectoryConfig = field(default_factory=TrajectoryConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    counterexample: CounterexampleConfig = field(default_factory=CounterexampleConfig)


SECTIONS = [f.name for f in fields(RunConfig) if f.name != "subcommand"]


def _kind(section: str, name: str):
    default = getattr(getattr(RunConfig(), section), name)
    return type(default)


def _convert(raw: str, typ, key: str, line):
    try:
        if typ is tuple:
            raw = raw.strip()
            return tuple(float(v) for v in raw.split(",")) if raw else ()
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"cannot parse {raw!r} as {typ.__name__}", key, line) from None


def _validate(cfg: RunConfig):
    def bad(key, msg):
        raise ConfigError(msg, key)

    if cfg.subcommand not in SUBCOMMANDS:
        bad("subcommand", f"must be one of {', '.join(SUBCOMMANDS)}")
    for section in SECTIONS:
        sub = getattr(cfg, section)
        for f in fields(sub):
            v = getattr(sub, f.name)
            vals = v if isinstance(v, tuple) else (v,)
            for x in vals:
                if isinstance(x, float) and not math.isfinite(x) and f.name != "blowup_threshold":
                    bad(f"{section}.{f.name}", "must be finite")
    s = cfg.surface
    if s.kind not in ("sphere", "cylinder1", "cylinder2", "ellipsoid"):
        bad("surface.kind", f"unknown surface {s.kind!r}")
    if not s.R > 0:
        bad("surface.R", "must be positive")
    if s.n < 1:
        bad("surface.n", "must be at least 1")
    if s.kind == "ellipsoid" and (len(s.axes) != 2 * s.n + 2 or min(s.axes) <= 0):
        bad("surface.axes", f"ellipsoid needs {2 * s.n + 2} positive semi-axes")
    d = cfg.domain
    if d.kind not in ("ball", "box", "ellipsoid"):
        bad("domain.kind", f"unknown domain {d.kind!r}")
    if not d.radius > 0:
        bad("domain.radius", "must be positive")
    for name in ("center", "lower", "upper", "axes"):
        if len(getattr(d, name)) != 3:
            bad(f"domain.{name}", "needs three components")
    if d.kind == "box" and any(b <= a for a, b in zip(d.lower, d.upper)):
        bad("domain.upper", "must exceed domain.lower componentwise")
    if min(d.axes) <= 0:
        bad("domain.axes", "must be positive")
    if cfg.data.kind not in ("zero", "affine", "hemisphere"):
        bad("data.kind", f"unknown boundary data {cfg.data.kind!r}")
    if len(cfg.data.coeffs) != 4:
        bad("data.coeffs", "needs four coefficients c0, c1, c2, c3")
    if not cfg.data.R > 0:
        bad("data.R", "must be positive")
    if cfg.k.kind not in ("constant", "affine"):
        bad("k.kind", f"unknown curvature form {cfg.k.kind!r}")
    v = cfg.solve
    if not v.h > 0:
        bad("solve.h", "must be positive")
    sched = v.eps_schedule
    if not sched or any(b >= a for a, b in zip(sched, sched[1:])) or sched[-1] <= 0:
        bad("solve.eps_schedule", "must be non-empty, strictly decreasing and positive")
    if not 0 < v.damping <= 1:
        bad("solve.damping", "must lie in (0, 1]")
    for name in ("max_iter", "tol", "lin_tol", "blowup_factor", "blowup_threshold"):
        if not getattr(v, name) > 0:
            bad(f"solve.{name}", "must be positive")
    t = cfg.trajectory
    if not t.t_end > 0:
        bad("trajectory.t_end", "must be positive")
    if not t.dt > 0:
        bad("trajectory.dt", "must be positive")
    if t.every < 1:
        bad("trajectory.every", "must be at least 1")
    if t.start and len(t.start) != 2 * s.n + 2:
        bad("trajectory.start", f"needs {2 * s.n + 2} coordinates")
    if cfg.verify.samples < 1:
        bad("verify.samples", "must be at least 1")
    if not cfg.counterexample.R > 0:
        bad("counterexample.R", "must be positive")
    if not cfg.counterexample.h > 0:
        bad("counterexample.h", "must be positive")


def parse_config(text: str) -> RunConfig:
    """Parse a configuration document and apply defaults."""
    top = {}
    sections = {name: {} for name in SECTIONS}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ConfigError("duplicate key", key, lineno)
        seen.add(key)
        if key == "subcommand":
            top[key] = value
            continue
        section, _, name = key.partition(".")
        if section not in sections or name not in {f.name for f in fields(getattr(RunConfig(), section))}:
            raise ConfigError("unknown key", key, lineno)
        sections[section][name] = _convert(value, _kind(section, name), key, lineno)
    base = RunConfig()
    cfg = replace(base, **top, **{s: replace(getattr(base, s), **kv) for s, kv in sections.items()})
    _validate(cfg)
    return cfg


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_config(cfg: RunConfig) -> str:
    lines = [f"subcommand = {cfg.subcommand}"]
    for section in SECTIONS:
        sub = getattr(cfg, section)
        for f in fields(sub):
            lines.append(f"{section}.{f.name} = {_fmt(getattr(sub, f.name))}")
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
