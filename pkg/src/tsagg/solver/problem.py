"""Container types for linear programs with binary variables."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CONTINUOUS = "continuous"
BINARY = "binary"

LESS_EQUAL = "<="
GREATER_EQUAL = ">="
EQUAL = "="

_SENSES = (LESS_EQUAL, GREATER_EQUAL, EQUAL)


@dataclass
class Variable:
    name: str
    kind: str = CONTINUOUS
    lower: float = 0.0
    upper: float = math.inf
    objective: float = 0.0


@dataclass
class Constraint:
    name: str
    coeffs: dict[int, float]
    sense: str
    rhs: float


class MilpProblem:
    """A minimization LP with optional binary variables.

    Rows are stored sparsely as ``{variable index: coefficient}`` maps. The
    container is solver-agnostic; see :mod:`tsagg.solver.simplex` and
    :mod:`tsagg.solver.branch_bound` for the embedded algorithms and
    :func:`tsagg.solver.lpfile.export_lp` for the portable text form.
    """

    def __init__(self, name: str = "problem"):
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self._index: dict[str, int] = {}

    def add_variable(
        self,
        name: str,
        lower: float = 0.0,
        upper: float = math.inf,
        kind: str = CONTINUOUS,
        objective: float = 0.0,
    ) -> int:
        if name in self._index:
            raise ValueError(f"duplicate variable name {name!r}")
        if kind not in (CONTINUOUS, BINARY):
            raise ValueError(f"unknown variable kind {kind!r}")
        if kind == BINARY:
            lower = max(0.0, float(lower))
            upper = min(1.0, float(upper))
        if lower > upper:
            raise ValueError(f"variable {name!r} has crossing bounds [{lower}, {upper}]")
        idx = len(self.variables)
        self.variables.append(Variable(name, kind, float(lower), float(upper), float(objective)))
        self._index[name] = idx
        return idx

    def add_constraint(self, name: str, coeffs: dict[int, float], sense: str, rhs: float) -> int:
        if sense not in _SENSES:
            raise ValueError(f"unknown constraint sense {sense!r}")
        cleaned = {int(j): float(v) for j, v in coeffs.items() if v != 0.0}
        for j in cleaned:
            if not 0 <= j < len(self.variables):
                raise ValueError(f"constraint {name!r} references unknown variable index {j}")
        self.constraints.append(Constraint(name, cleaned, sense, float(rhs)))
        return len(self.constraints) - 1

    def set_objective_coefficient(self, index: int, value: float) -> None:
        self.variables[index].objective = float(value)

    def add_objective_coefficient(self, index: int, value: float) -> None:
        self.variables[index].objective += float(value)

    def variable_index(self, name: str) -> int:
        return self._index[name]

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    @property
    def binary_indices(self) -> list[int]:
        return [i for i, v in enumerate(self.variables) if v.kind == BINARY]

    def objective_vector(self) -> np.ndarray:
        return np.array([v.objective for v in self.variables], dtype=float)

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lower = np.array([v.lower for v in self.variables], dtype=float)
        upper = np.array([v.upper for v in self.variables], dtype=float)
        return lower, upper

    def audit(self, allow_empty_rows: bool = False) -> None:
        """Raise if the problem is malformed (empty rows, non-finite data, bad bounds).

        The solver tolerates empty rows (its presolve removes them after a
        feasibility check), so it audits with ``allow_empty_rows=True``; model
        builders use the strict default as a self-check.
        """
        for var in self.variables:
            if not (math.isfinite(var.objective)):
                raise ValueError(f"variable {var.name!r} has a non-finite objective coefficient")
            if math.isnan(var.lower) or math.isnan(var.upper):
                raise ValueError(f"variable {var.name!r} has NaN bounds")
            if var.lower > var.upper:
                raise ValueError(f"variable {var.name!r} has crossing bounds")
            if var.kind == BINARY and (var.lower < 0 or var.upper > 1):
                raise ValueError(f"binary variable {var.name!r} must stay within [0, 1]")
        for con in self.constraints:
            if not con.coeffs and not allow_empty_rows:
                raise ValueError(f"constraint {con.name!r} has no coefficients")
            if not math.isfinite(con.rhs):
                raise ValueError(f"constraint {con.name!r} has a non-finite right-hand side")
            for j, v in con.coeffs.items():
                if not math.isfinite(v):
                    raise ValueError(f"constraint {con.name!r} has a non-finite coefficient")


@dataclass
class MilpSolution:
    """Solved variable values plus solver statistics."""

    status: str  # optimal | infeasible | unbounded | time_limit_incumbent
    objective: float
    values: np.ndarray
    gap: float = 0.0
    iterations: int = 0
    nodes: int = 0
    wall_time_seconds: float = 0.0
    dual_objective: float = math.nan

    def value_of(self, problem: MilpProblem, name: str) -> float:
        return float(self.values[problem.variable_index(name)])


class NoIncumbentError(RuntimeError):
    """Raised when the time limit expires before any feasible point was found."""
