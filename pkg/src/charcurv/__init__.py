"""Characteristic curvature of real hypersurfaces in C^{n+1} and a finite
difference solver for the associated degenerate Dirichlet problem."""

from .catalog import CatalogSurface, cylinder1, cylinder2, ellipsoid, make_surface, random_ellipsoid, sphere
from .config import RunConfig, emit_config, load_config, parse_config
from .errors import (ConfigError, CriticalPointError, DimensionError, DivergenceError, EnergyDriftError,
                     FrameError, GridError, LinearSolveError, OffSurfaceError, SolverError, TangencyError)
from .fields import HamiltonianSpec, Jet2, ScalarField, quadratic
from .operator import (CurvatureSpec, F_value, GraphJet, assemble_A, char_operator_n1, char_operator_value,
                       lift, null_eigenvectors, principal_eigenpair, regularized_A, sigma)
from .surfaces import (AdaptedFrame, DefiningFunctionSurface, adapted_frame, characteristic_curvature,
                       characteristic_direction, curvature_relation_residual, levi_mean_curvature,
                       mean_curvature, principal_curvatures, second_fundamental_form, unit_normal)
from .symplectic import (J_matrix, PhasePoint, Trajectory, apply_J, characteristic_curvature_levelset,
                         curvature_along_curve, hamiltonian_vector_field, integrate_characteristic_curve,
                         liouville_form, symplectic_form)

__version__ = "0.1.0"
