"""Best-bound branch and bound over the embedded simplex."""

from __future__ import annotations

import heapq
import math
import time

import numpy as np

from .problem import MilpProblem, MilpSolution, NoIncumbentError
from .simplex import solve_arrays, to_arrays

INT_TOL = 1e-6
DEFAULT_GAP = 1e-6


def solve_lp(problem: MilpProblem) -> MilpSolution:
    """Solve a pure LP to an optimal basic solution.

    Binary variables are rejected; use :func:`solve_milp` for those.
    """
    if problem.binary_indices:
        raise ValueError("problem contains binary variables; use solve_milp")
    start = time.perf_counter()
    arrays = to_arrays(problem)
    res = solve_arrays(arrays)
    return MilpSolution(
        status=res.status,
        objective=res.objective,
        values=res.x,
        gap=0.0,
        iterations=res.iterations,
        nodes=0,
        wall_time_seconds=time.perf_counter() - start,
        dual_objective=res.dual_objective,
    )


def solve_milp(
    problem: MilpProblem,
    time_limit_seconds: float = math.inf,
    gap_tolerance: float = DEFAULT_GAP,
) -> MilpSolution:
    """Branch and bound on the binary variables over LP relaxations.

    Nodes are explored best-bound first; branching picks the most fractional
    binary with lowest-index tie-breaking. On time-limit expiry the incumbent
    is returned with its proven gap; without an incumbent the expiry raises
    :class:`NoIncumbentError`.
    """
    start = time.perf_counter()
    arrays = to_arrays(problem)
    binaries = np.array(problem.binary_indices, dtype=int)
    lower = arrays.lower.copy()
    upper = arrays.upper.copy()
    if binaries.size:
        # Presolve may have tightened binary bounds fractionally; round them in.
        lower[binaries] = np.ceil(lower[binaries] - INT_TOL)
        upper[binaries] = np.floor(upper[binaries] + INT_TOL)

    total_iterations = 0
    nodes = 0
    incumbent_x: np.ndarray | None = None
    incumbent_obj = math.inf

    counter = 0
    heap: list[tuple[float, int, dict[int, tuple[float, float]]]] = [(-math.inf, counter, {})]

    def best_bound() -> float:
        bound = heap[0][0] if heap else math.inf
        return min(bound, incumbent_obj)

    def current_gap() -> float:
        if incumbent_x is None:
            return math.inf
        bound = best_bound()
        if not math.isfinite(bound):
            return math.inf
        return max(0.0, (incumbent_obj - bound) / max(abs(incumbent_obj), 1e-10))

    def finish(status: str) -> MilpSolution:
        return MilpSolution(
            status=status,
            objective=incumbent_obj if incumbent_x is not None else math.nan,
            values=incumbent_x if incumbent_x is not None else np.zeros(arrays.n_cols),
            gap=current_gap() if incumbent_x is not None else math.nan,
            iterations=total_iterations,
            nodes=nodes,
            wall_time_seconds=time.perf_counter() - start,
        )

    while heap:
        if time.perf_counter() - start > time_limit_seconds:
            if incumbent_x is None:
                raise NoIncumbentError(
                    f"time limit of {time_limit_seconds} s expired with no feasible point")
            return finish("time_limit_incumbent")

        bound, _, fixes = heapq.heappop(heap)
        if incumbent_x is not None and bound >= incumbent_obj - 1e-12 * max(1.0, abs(incumbent_obj)):
            continue

        node_lower = lower.copy()
        node_upper = upper.copy()
        for j, (lo, hi) in fixes.items():
            node_lower[j] = lo
            node_upper[j] = hi

        res = solve_arrays(arrays, node_lower, node_upper)
        nodes += 1
        total_iterations += res.iterations
        if res.status == "infeasible":
            continue
        if res.status == "unbounded":
            return MilpSolution(
                status="unbounded", objective=-math.inf, values=res.x,
                gap=math.inf, iterations=total_iterations, nodes=nodes,
                wall_time_seconds=time.perf_counter() - start)
        if incumbent_x is not None and res.objective >= incumbent_obj - 1e-12 * max(1.0, abs(incumbent_obj)):
            continue

        frac = np.abs(res.x[binaries] - np.round(res.x[binaries])) if binaries.size else np.zeros(0)
        if not binaries.size or frac.max(initial=0.0) <= INT_TOL:
            incumbent_x = res.x
            incumbent_obj = res.objective
            if current_gap() <= gap_tolerance:
                return finish("optimal")
            continue

        j = int(binaries[np.argmax(np.minimum(frac, 1.0 - frac))])
        child = dict(fixes)
        child[j] = (node_lower[j], 0.0)
        counter += 1
        heapq.heappush(heap, (res.objective, counter, child))
        child = dict(fixes)
        child[j] = (1.0, node_upper[j])
        counter += 1
        heapq.heappush(heap, (res.objective, counter, child))

    if incumbent_x is None:
        return finish("infeasible")
    return finish("optimal")
