"""Finite-difference solver for the regularised Dirichlet problem on domains in R^3."""

from .experiments import (barrier_pair, comparison_experiment, counterexample_report, cylinder_condition,
                          gradient_bound_check, sandwich_check, smallest_enclosing_ball, supbound_check)
from .grid import DomainSpec, GridField, build_grid, discrete_jet, grid_gradients, grid_hessians
from .picard import SolverConfig, SolverReport, StageRecord, continuation_solve, picard_solve
