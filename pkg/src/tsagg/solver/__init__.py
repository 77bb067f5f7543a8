"""Embedded desk-scale LP/MILP solver and LP-format export."""

from .branch_bound import solve_lp, solve_milp
from .lpfile import export_lp
from .problem import (
    BINARY,
    CONTINUOUS,
    EQUAL,
    GREATER_EQUAL,
    LESS_EQUAL,
    MilpProblem,
    MilpSolution,
    NoIncumbentError,
)
from .simplex import NumericalError

__all__ = [
    "MilpProblem",
    "MilpSolution",
    "NoIncumbentError",
    "NumericalError",
    "solve_lp",
    "solve_milp",
    "export_lp",
    "BINARY",
    "CONTINUOUS",
    "LESS_EQUAL",
    "GREATER_EQUAL",
    "EQUAL",
]
