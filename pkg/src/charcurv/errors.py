"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Vector or matrix has the wrong shape for the requested operation."""


class CriticalPointError(ValueError):
    """Gradient of a defining function or Hamiltonian vanishes (numerically)."""


class TangencyError(ValueError):
    """A vector passed as tangent has a non-negligible normal component."""


class OffSurfaceError(ValueError):
    """Query point is not on the level set within the configured tolerance."""


class EnergyDriftError(RuntimeError):
    """Energy along an integrated trajectory left the allowed band.

    Attributes
    ----------
    step : int
        Index of the first step at which the drift exceeded the tolerance.
    drift : float
        Absolute energy deviation at that step.
    """

    def __init__(self, step, drift, tol):
        super().__init__(
            f"energy drift {drift:.3e} exceeds tolerance {tol:.3e} at step {step}"
        )
        self.step = step
        self.drift = drift
        self.tol = tol


class FrameError(RuntimeError):
    """Gram-Schmidt could not complete an adapted frame."""


class GridError(ValueError):
    """Grid construction or node lookup failed."""


class SolverError(RuntimeError):
    """Base class for failures inside the Dirichlet solver."""


class LinearSolveError(SolverError):
    pass


class DivergenceError(SolverError):
    """Picard residual grew over consecutive iterations.

    The last iterate and the partial stage record are attached so callers
    running a continuation can keep them.
    """

    def __init__(self, message, field=None, record=None):
        super().__init__(message)
        self.field = field
        self.record = record


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""

    def __init__(self, message, key=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line
