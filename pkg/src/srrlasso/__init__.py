"""Lasso solvers: cyclic coordinate descent and its successive ray refinement variants."""

from .cd import IterationTrace, SolveResult, SolverConfig, TraceRow, cd_sweep, ray_alpha_estimate, solve_cd
from .errors import (
    DegenerateRefinement,
    NumericFailure,
    ParseError,
    SrrLassoError,
    UnsupportedScale,
    ZeroColumnError,
)
from .linalg import DesignMatrix, Problem, SolverState, drift_check_and_refresh, objective, residual, shrinkage
from .refine import RefinementInput, minimize_g
from .srr import search_point, solve, solve_srrc, solve_srrt

__version__ = "0.1.0"

__all__ = [
    "IterationTrace",
    "SolveResult",
    "SolverConfig",
    "TraceRow",
    "cd_sweep",
    "ray_alpha_estimate",
    "solve_cd",
    "DegenerateRefinement",
    "NumericFailure",
    "ParseError",
    "SrrLassoError",
    "UnsupportedScale",
    "ZeroColumnError",
    "DesignMatrix",
    "Problem",
    "SolverState",
    "drift_check_and_refresh",
    "objective",
    "residual",
    "shrinkage",
    "RefinementInput",
    "minimize_g",
    "search_point",
    "solve",
    "solve_srrc",
    "solve_srrt",
]
