"""Bounded-variable revised simplex with product-form basis updates.

The basis inverse is held as a sparse LU factorization (refreshed periodically)
plus a list of eta pivot vectors, so desk-scale energy models with thousands of
rows stay tractable. Pricing is Dantzig by default and falls back to Bland's
rule after a degenerate stall, which breaks cycles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .problem import EQUAL, GREATER_EQUAL, LESS_EQUAL, MilpProblem

FEAS_TOL = 1e-7
OPT_TOL = 1e-7
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 100
STALL_LIMIT = 1000

_BASIC, _AT_LOWER, _AT_UPPER, _FREE = 0, 1, 2, 3


class NumericalError(RuntimeError):
    """Raised when the factorization or pivoting breaks down irrecoverably."""


@dataclass
class _ScaledForm:
    """Equilibrated matrices shared by repeated solves of the same rows."""

    row_scale: np.ndarray
    col_scale: np.ndarray
    a: sp.csc_matrix
    a_t_csr: sp.csr_matrix  # transpose, kept for per-iteration pricing
    cols: sp.csc_matrix  # [A | I]


@dataclass
class ArrayProblem:
    """Presolved row/column data handed to the simplex core.

    The scaled form is built once and cached, so branch-and-bound nodes and
    enumeration oracles that only vary bounds skip the matrix setup.
    """

    a: sp.csc_matrix  # m x n structural columns
    b: np.ndarray
    senses: np.ndarray  # row senses coded -1 (<=), 0 (=), +1 (>=)
    c: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    infeasible: bool = False
    scaled: _ScaledForm | None = None

    @property
    def n_rows(self) -> int:
        return self.a.shape[0]

    @property
    def n_cols(self) -> int:
        return self.a.shape[1]

    def scaled_form(self) -> _ScaledForm:
        if self.scaled is None:
            a = self.a.tocsr(copy=True)
            row_max = _row_abs_max(a)
            row_max[row_max == 0.0] = 1.0
            row_scale = 1.0 / np.clip(row_max, 1e-8, 1e8)
            a = sp.diags(row_scale) @ a
            col_max = _col_abs_max(a.tocsc())
            col_max[col_max == 0.0] = 1.0
            col_scale = 1.0 / np.clip(col_max, 1e-8, 1e8)
            scaled_a = (a @ sp.diags(col_scale)).tocsc()
            cols = sp.hstack([scaled_a, sp.eye(self.n_rows, format="csc")], format="csc")
            self.scaled = _ScaledForm(row_scale, col_scale, scaled_a,
                                      scaled_a.T.tocsr(), cols)
        return self.scaled


@dataclass
class SimplexResult:
    status: str  # optimal | infeasible | unbounded
    x: np.ndarray
    objective: float
    dual_objective: float
    duals: np.ndarray
    iterations: int


_SENSE_CODE = {LESS_EQUAL: -1, GREATER_EQUAL: 1, EQUAL: 0}


def to_arrays(problem: MilpProblem) -> ArrayProblem:
    """Convert a MilpProblem into sparse arrays, applying the light presolve.

    Presolve removes empty rows (verifying their feasibility) and turns
    singleton rows into tightened variable bounds; crossing bounds mark the
    problem infeasible up front.
    """
    problem.audit(allow_empty_rows=True)
    n = problem.n_variables
    lower, upper = problem.bounds_arrays()
    c = problem.objective_vector()

    rows, cols, vals = [], [], []
    b_list, sense_list = [], []
    infeasible = False
    kept = 0
    for con in problem.constraints:
        entries = [(j, v) for j, v in con.coeffs.items() if v != 0.0]
        if not entries:
            if _violates_empty(con.sense, con.rhs):
                infeasible = True
            continue
        if len(entries) == 1:
            j, v = entries[0]
            lo, up = _singleton_bounds(con.sense, con.rhs, v)
            lower[j] = max(lower[j], lo)
            upper[j] = min(upper[j], up)
            continue
        for j, v in entries:
            rows.append(kept)
            cols.append(j)
            vals.append(v)
        b_list.append(con.rhs)
        sense_list.append(_SENSE_CODE[con.sense])
        kept += 1

    if np.any(lower > upper + FEAS_TOL):
        infeasible = True
    a = sp.csc_matrix(
        (np.asarray(vals, dtype=float), (np.asarray(rows, dtype=int), np.asarray(cols, dtype=int))),
        shape=(kept, n),
    )
    return ArrayProblem(
        a=a,
        b=np.asarray(b_list, dtype=float),
        senses=np.asarray(sense_list, dtype=np.int8),
        c=c,
        lower=lower,
        upper=upper,
        infeasible=infeasible,
    )


def _violates_empty(sense: str, rhs: float) -> bool:
    if sense == LESS_EQUAL:
        return rhs < -FEAS_TOL
    if sense == GREATER_EQUAL:
        return rhs > FEAS_TOL
    return abs(rhs) > FEAS_TOL


def _singleton_bounds(sense: str, rhs: float, coef: float) -> tuple[float, float]:
    bound = rhs / coef
    if sense == EQUAL:
        return bound, bound
    at_most = (sense == LESS_EQUAL) == (coef > 0)
    return (-math.inf, bound) if at_most else (bound, math.inf)


def solve_arrays(
    arrays: ArrayProblem,
    lower_override: np.ndarray | None = None,
    upper_override: np.ndarray | None = None,
    max_iter: int | None = None,
) -> SimplexResult:
    """Solve min c'x, Ax (sense) b, l <= x <= u, returning an optimal basic solution."""
    lower = arrays.lower if lower_override is None else lower_override
    upper = arrays.upper if upper_override is None else upper_override
    if arrays.infeasible or np.any(lower > upper + FEAS_TOL):
        return SimplexResult("infeasible", np.zeros(arrays.n_cols), math.nan, math.nan,
                             np.zeros(arrays.n_rows), 0)
    if arrays.n_rows == 0:
        return _solve_unconstrained(arrays.c, lower, upper)
    return _Simplex(arrays, lower.copy(), upper.copy(), max_iter).run()


def _solve_unconstrained(c: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> SimplexResult:
    x = np.zeros_like(c)
    for j, cj in enumerate(c):
        if cj > 0 or (cj == 0 and math.isfinite(lower[j])):
            x[j] = lower[j]
        elif cj < 0 or math.isfinite(upper[j]):
            x[j] = upper[j]
        else:
            x[j] = 0.0
        if not math.isfinite(x[j]):
            if cj == 0:
                x[j] = upper[j] if math.isfinite(upper[j]) else 0.0
            else:
                return SimplexResult("unbounded", x, -math.inf, -math.inf, np.zeros(0), 0)
    obj = float(c @ x)
    return SimplexResult("optimal", x, obj, obj, np.zeros(0), 0)


class _IdentityLU:
    """Stand-in factorization for the all-slack starting basis."""

    @staticmethod
    def solve(rhs: np.ndarray, trans: str = "N") -> np.ndarray:
        return rhs.copy()


class _Basis:
    """LU factorization of the basis columns plus eta updates since the last refresh."""

    def __init__(self, cols: sp.csc_matrix, basis: np.ndarray, identity: bool = False):
        self._cols = cols
        if identity:
            self._lu = _IdentityLU()
            self._etas: list[tuple[int, np.ndarray]] = []
        else:
            self.refactor(basis)

    def refactor(self, basis: np.ndarray) -> None:
        matrix = self._cols[:, basis].tocsc()
        try:
            self._lu = spla.splu(matrix, permc_spec="COLAMD")
        except RuntimeError as exc:  # singular basis
            raise NumericalError(f"basis factorization failed: {exc}") from exc
        self._etas = []

    @property
    def n_etas(self) -> int:
        return len(self._etas)

    def push_eta(self, pos: int, w: np.ndarray) -> None:
        self._etas.append((pos, w))

    def ftran(self, rhs: np.ndarray) -> np.ndarray:
        v = self._lu.solve(rhs)
        for pos, w in self._etas:
            alpha = v[pos] / w[pos]
            v -= alpha * w
            v[pos] = alpha
        return v

    def btran(self, costs: np.ndarray) -> np.ndarray:
        t = costs.copy()
        for pos, w in reversed(self._etas):
            t[pos] -= (w @ t - t[pos]) / w[pos]
        return self._lu.solve(t, trans="T")


class _Simplex:
    def __init__(self, arrays: ArrayProblem, lower: np.ndarray, upper: np.ndarray,
                 max_iter: int | None):
        self.m = arrays.n_rows
        self.n = arrays.n_cols
        self.max_iter = max_iter if max_iter is not None else 20000 + 40 * (self.m + self.n)

        # Rows and columns equilibrated to unit max magnitude; empty rows and
        # columns (variables outside every constraint) keep scale 1.
        form = arrays.scaled_form()
        self.row_scale = form.row_scale
        self.col_scale = form.col_scale
        self.a = form.a
        self.a_t_csr = form.a_t_csr
        self.cols = form.cols
        self.b = arrays.b * self.row_scale
        self.c_struct = arrays.c * self.col_scale

        n, m = self.n, self.m
        total = n + m
        self.lower = np.empty(total)
        self.upper = np.empty(total)
        self.lower[:n] = lower / self.col_scale
        self.upper[:n] = upper / self.col_scale
        # Logical (slack) columns: Ax + s = b with bounds encoding the row sense.
        self.lower[n:] = np.where(arrays.senses <= 0, 0.0, -math.inf)
        self.upper[n:] = np.where(arrays.senses >= 0, 0.0, math.inf)

        self.cost = np.zeros(total)
        self.cost[:n] = self.c_struct

        self.status = np.full(total, _AT_LOWER, dtype=np.int8)
        finite_lo = np.isfinite(self.lower)
        finite_hi = np.isfinite(self.upper)
        self.status[~finite_lo & finite_hi] = _AT_UPPER
        self.status[~finite_lo & ~finite_hi] = _FREE
        self.xval = np.where(self.status == _AT_UPPER, self.upper, self.lower)
        self.xval[self.status == _FREE] = 0.0

        self.basis = np.arange(n, n + m)
        self.status[self.basis] = _BASIC
        self.factor = _Basis(self.cols, self.basis, identity=True)
        self._recompute_basics()

        self._movable = (self.upper - self.lower) > FEAS_TOL
        self.iterations = 0
        self.bland = False
        self._stall = 0
        self._last_merit = math.inf

    # -- helpers -----------------------------------------------------------

    def _recompute_basics(self) -> None:
        """Refresh basic values from the factorization to curb incremental drift."""
        xnb = self.xval.copy()
        xnb[self.basis] = 0.0
        rhs = self.b - self.cols @ xnb
        self.xval[self.basis] = self.factor.ftran(rhs)

    def _column(self, j: int) -> np.ndarray:
        col = np.zeros(self.m)
        if j < self.n:
            start, end = self.a.indptr[j], self.a.indptr[j + 1]
            col[self.a.indices[start:end]] = self.a.data[start:end]
        else:
            col[j - self.n] = 1.0
        return col

    def _reduced_costs(self, y: np.ndarray, phase_two: bool) -> np.ndarray:
        d = np.empty(self.n + self.m)
        d[:self.n] = (self.c_struct if phase_two else 0.0) - self.a_t_csr @ y
        d[self.n:] = -y
        return d

    def _basic_bounds(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.xval[self.basis], self.lower[self.basis], self.upper[self.basis]

    def _phase1_state(self) -> tuple[np.ndarray, float, bool]:
        xb, lb, ub = self._basic_bounds()
        below = xb < lb - FEAS_TOL
        above = xb > ub + FEAS_TOL
        cost = np.zeros(self.m)
        cost[below] = -1.0
        cost[above] = 1.0
        infeas = float(np.sum(lb[below] - xb[below]) + np.sum(xb[above] - ub[above]))
        return cost, infeas, bool(below.any() or above.any())

    def _pick_entering(self, d: np.ndarray) -> int:
        movable = self._movable
        eligible = (self.status == _AT_LOWER) & movable & (d < -OPT_TOL)
        eligible |= (self.status == _AT_UPPER) & movable & (d > OPT_TOL)
        eligible |= (self.status == _FREE) & (np.abs(d) > OPT_TOL)
        if not np.any(eligible):
            return -1
        idx = np.flatnonzero(eligible)
        if self.bland:
            return int(idx[0])
        return int(idx[np.argmax(np.abs(d[idx]))])

    # -- ratio tests -------------------------------------------------------

    def _ratio_phase2(self, sigma: float, w: np.ndarray):
        xb, lb, ub = self._basic_bounds()
        rate = -sigma * w  # d x_B / d step
        ratios = np.full(self.m, math.inf)
        target_upper = np.zeros(self.m, dtype=bool)

        down = rate < -PIVOT_TOL
        ratios[down] = np.maximum(xb[down] - lb[down], 0.0) / -rate[down]
        up = rate > PIVOT_TOL
        ratios[up] = np.maximum(ub[up] - xb[up], 0.0) / rate[up]
        target_upper[up] = True
        return ratios, target_upper

    def _ratio_phase1(self, sigma: float, w: np.ndarray):
        xb, lb, ub = self._basic_bounds()
        rate = -sigma * w
        ratios = np.full(self.m, math.inf)
        target_upper = np.zeros(self.m, dtype=bool)

        below = xb < lb - FEAS_TOL
        above = xb > ub + FEAS_TOL
        feas = ~(below | above)
        up = rate > PIVOT_TOL
        down = rate < -PIVOT_TOL

        sel = feas & up & np.isfinite(ub)
        ratios[sel] = np.maximum(ub[sel] - xb[sel], 0.0) / rate[sel]
        target_upper[sel] = True
        sel = feas & down & np.isfinite(lb)
        ratios[sel] = np.maximum(xb[sel] - lb[sel], 0.0) / -rate[sel]
        # A violated basic travelling back toward its bound stops once feasible.
        sel = below & up
        ratios[sel] = (lb[sel] - xb[sel]) / rate[sel]
        sel = above & down
        ratios[sel] = (xb[sel] - ub[sel]) / -rate[sel]
        target_upper[sel] = True
        return ratios, target_upper

    # -- main loop ---------------------------------------------------------

    def run(self) -> SimplexResult:
        status = self._loop(phase_two=False)
        if status == "infeasible":
            return self._result("infeasible")
        if self.factor.n_etas:
            self.factor.refactor(self.basis)
            self._recompute_basics()
        status = self._loop(phase_two=True)
        if status == "unbounded":
            return self._result("unbounded")
        return self._result("optimal")

    def _loop(self, phase_two: bool) -> str:
        self.bland = False
        self._stall = 0
        self._last_merit = math.inf
        while True:
            if self.iterations > self.max_iter:
                raise NumericalError(f"iteration limit {self.max_iter} exceeded")

            if phase_two:
                cost_b = self.cost[self.basis]
                merit = float(cost_b @ self.xval[self.basis])
            else:
                cost_b, merit, violated = self._phase1_state()
                if not violated:
                    return "feasible"

            self._track_stall(merit)
            y = self.factor.btran(cost_b)
            d = self._reduced_costs(y, phase_two)
            q = self._pick_entering(d)
            if q < 0:
                return "optimal" if phase_two else "infeasible"

            sigma = -1.0 if self.status[q] == _AT_UPPER or (self.status[q] == _FREE and d[q] > 0) else 1.0

            w = self.factor.ftran(self._column(q))
            ratios, target_upper = (self._ratio_phase2 if phase_two else self._ratio_phase1)(sigma, w)

            span = self.upper[q] - self.lower[q]
            flip_step = span if math.isfinite(span) else math.inf
            r = self._pick_leaving(ratios, w)
            step = ratios[r] if r >= 0 else math.inf

            if flip_step <= step:
                if not math.isfinite(flip_step):
                    if phase_two:
                        return "unbounded"
                    raise NumericalError("phase-1 objective unbounded")  # pragma: no cover
                self.xval[self.basis] -= sigma * flip_step * w
                self.status[q] = _AT_UPPER if self.status[q] == _AT_LOWER else _AT_LOWER
                self.xval[q] = self.upper[q] if self.status[q] == _AT_UPPER else self.lower[q]
            else:
                self._pivot(q, r, sigma, step, w, bool(target_upper[r]))
            self.iterations += 1

    def _track_stall(self, merit: float) -> None:
        if merit < self._last_merit - 1e-12:
            self._last_merit = merit
            self._stall = 0
            self.bland = False
        else:
            self._stall += 1
            if self._stall > STALL_LIMIT:
                self.bland = True

    def _pick_leaving(self, ratios: np.ndarray, w: np.ndarray) -> int:
        best = ratios.min(initial=math.inf)
        if not math.isfinite(best):
            return -1
        window = np.flatnonzero(ratios <= best + 1e-9)
        if self.bland:
            return int(window[np.argmin(self.basis[window])])
        return int(window[np.argmax(np.abs(w[window]))])

    def _pivot(self, q: int, r: int, sigma: float, step: float, w: np.ndarray,
               to_upper: bool) -> None:
        if abs(w[r]) < PIVOT_TOL:
            raise NumericalError("pivot element vanished")
        leaving = self.basis[r]
        self.xval[self.basis] -= sigma * step * w
        self.xval[q] = self.xval[q] + sigma * step
        self.xval[leaving] = self.upper[leaving] if to_upper else self.lower[leaving]
        self.status[leaving] = _AT_UPPER if to_upper else _AT_LOWER
        self.status[q] = _BASIC
        self.basis[r] = q
        self.factor.push_eta(r, w)
        if self.factor.n_etas >= REFACTOR_EVERY:
            self.factor.refactor(self.basis)
            self._recompute_basics()

    # -- results -----------------------------------------------------------

    def _result(self, status: str) -> SimplexResult:
        if status != "optimal":
            x = self.xval[:self.n] * self.col_scale
            obj = math.nan if status == "infeasible" else -math.inf
            return SimplexResult(status, x, obj, obj, np.zeros(self.m), self.iterations)
        if self.factor.n_etas:
            self.factor.refactor(self.basis)
            self._recompute_basics()
        x = self.xval[:self.n] * self.col_scale
        obj = float(self.c_struct @ self.xval[:self.n])
        y = self.factor.btran(self.cost[self.basis])
        d = self._reduced_costs(y, True)
        dual = float(y @ self.b)
        at_low = (self.status[:self.n] == _AT_LOWER) & np.isfinite(self.lower[:self.n])
        at_up = (self.status[:self.n] == _AT_UPPER) & np.isfinite(self.upper[:self.n])
        dual += float(d[:self.n][at_low] @ self.lower[:self.n][at_low])
        dual += float(d[:self.n][at_up] @ self.upper[:self.n][at_up])
        return SimplexResult(status, x, obj, dual, y * self.row_scale, self.iterations)


def _row_abs_max(a: sp.csr_matrix) -> np.ndarray:
    out = np.zeros(a.shape[0])
    if a.nnz:
        mags = np.abs(a.data)
        maxima = np.maximum.reduceat(mags, a.indptr[:-1][np.diff(a.indptr) > 0])
        out[np.diff(a.indptr) > 0] = maxima
    return out


def _col_abs_max(a: sp.csc_matrix) -> np.ndarray:
    out = np.zeros(a.shape[1])
    if a.nnz:
        mags = np.abs(a.data)
        maxima = np.maximum.reduceat(mags, a.indptr[:-1][np.diff(a.indptr) > 0])
        out[np.diff(a.indptr) > 0] = maxima
    return out
