"""
Regularised doubly degenerate thin-film equation on the sphere,

    u_t + ( (|u|^n + eps) w ((w u_x)_xx) )_x = 0,   w = 1 - x^2 + delta,

with a conservative implicit solver, energy and entropy diagnostics,
weighted-inequality checks, eps/delta continuation and the rotating
coating-flow model.
"""

from .errors import (AUpperBoundViolated, ConfigError, DegenerateDenominator, MissingKey,
                     NewtonDiverged, SolverError, StepUnderflow, TypeMismatch, UnknownKey)
from .grid import Field, Grid, RegularizationParams, build_grid, quad, weight
from .stepper import SolverConfig, Trajectory, default_initial, integrate, step_implicit
from .continuation import ContinuationSchedule, run_continuation, uniform_bound_audit
from .physical import PhysicalParams, integrate_physical

__version__ = "0.1.0"

__all__ = [
    "AUpperBoundViolated", "ConfigError", "ContinuationSchedule", "DegenerateDenominator",
    "Field", "Grid", "MissingKey", "NewtonDiverged", "PhysicalParams", "RegularizationParams",
    "SolverConfig", "SolverError", "StepUnderflow", "Trajectory", "TypeMismatch", "UnknownKey",
    "build_grid", "default_initial", "integrate", "integrate_physical", "quad",
    "run_continuation", "step_implicit", "uniform_bound_audit", "weight",
]
