"""Iterative ground states of the N-dimensional quartic double well V = (g^2/2)(r^2 - 1)^2."""

from .errors import (
    BoundaryBreakdown,
    ConfigError,
    DomainError,
    InvalidWindow,
    NoBracket,
    NonpositiveIterate,
    NotConverged,
    SombreroError,
    StructuralError,
)
from .grid import GridConfig, RadialGrid
from .iterate import SolverConfig, SolveResult, check_hierarchy, solve
from .model import DerivedConstants, ModelParams, TrialFunction, check_w_properties, eval_w, validate_params
from .oracle import FDConfig, check_rate_bound, fd_ground_energy, prototype1d_solve
from .angular import build_Z, eigenvalue, ode_residual

__version__ = "0.1.0"
