"""Detection of design-relevant extreme periods and their integration variants."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .cluster import ClusterResult, _finalize, _values

__all__ = [
    "ExtremeSpec",
    "INTEGRATION_METHODS",
    "detect_extremes",
    "integrate_extremes",
]

MAX_STEP = "max_step_value"
MIN_STEP = "min_step_value"
MAX_SUM = "max_period_sum"
MIN_SUM = "min_period_sum"
_CRITERIA = (MAX_STEP, MIN_STEP, MAX_SUM, MIN_SUM)

NONE = "none"
APPEND = "append"
NEW_CLUSTER_CENTER = "new_cluster_center"
REPLACE_REPRESENTATIVE = "replace_representative"
INTEGRATION_METHODS = (NONE, APPEND, NEW_CLUSTER_CENTER, REPLACE_REPRESENTATIVE)


@dataclass(frozen=True)
class ExtremeSpec:
    """Which attribute to scan and what kind of extremum marks a peak period."""

    attribute: str
    criterion: str

    def __post_init__(self):
        if self.criterion not in _CRITERIA:
            raise ValueError(f"unknown extreme criterion {self.criterion!r}")


def detect_extremes(matrix, specs) -> list[int]:
    """Candidate indices containing the requested extrema, deduplicated in spec order.

    Step criteria pick the period containing the global extreme step of the
    attribute; sum criteria compare per-period attribute sums. Ties go to the
    lowest period index.
    """
    specs = list(specs)
    if not specs:
        raise ValueError("at least one extreme spec is required")
    found: list[int] = []
    for spec in specs:
        block = matrix.attribute_block(spec.attribute)
        if spec.criterion == MAX_STEP:
            idx = int(np.unravel_index(np.argmax(block), block.shape)[0])
        elif spec.criterion == MIN_STEP:
            idx = int(np.unravel_index(np.argmin(block), block.shape)[0])
        elif spec.criterion == MAX_SUM:
            idx = int(np.argmax(block.sum(axis=1)))
        else:
            idx = int(np.argmin(block.sum(axis=1)))
        if idx not in found:
            found.append(idx)
    return found


def _is_existing_representative(row: np.ndarray, representatives: np.ndarray) -> bool:
    return bool(np.any(np.all(representatives == row, axis=1)))


def _drop_empty_clusters(assignment: np.ndarray, representatives: np.ndarray):
    """Remove clusters that lost all members, relabeling the assignment."""
    n_k = representatives.shape[0]
    counts = np.bincount(assignment, minlength=n_k)
    keep = np.flatnonzero(counts > 0)
    relabel = -np.ones(n_k, dtype=int)
    relabel[keep] = np.arange(keep.size)
    return relabel[assignment], representatives[keep], int(n_k - keep.size)


def integrate_extremes(result: ClusterResult, matrix, extreme_indices,
                       method: str) -> ClusterResult:
    """Fold extreme candidates into an aggregation by one of the four variants.

    - ``none``: unchanged.
    - ``append``: each extreme becomes its own representative with weight 1 and
      leaves its donor cluster (a drained donor cluster is dropped).
    - ``new_cluster_center``: the extreme row opens a new cluster; every
      candidate strictly closer to it than to its current representative moves
      over. Existing representatives are kept frozen.
    - ``replace_representative``: the representative of the extreme's cluster
      becomes the extreme row; assignment and weights stay untouched.

    Extremes that already are representatives are skipped (no-op).
    """
    if method not in INTEGRATION_METHODS:
        raise ValueError(f"unknown integration method {method!r}")
    x = _values(matrix)
    n_i = x.shape[0]
    extremes = []
    for e in extreme_indices:
        e = int(e)
        if not 0 <= e < n_i:
            raise ValueError(f"extreme index {e} out of range")
        if e not in extremes:
            extremes.append(e)

    report = {"integration": method, "extremes": list(extremes), "skipped": [],
              "dropped_clusters": 0}
    if method == NONE:
        return replace(result, integration_report=report)

    assignment = result.assignment.copy()
    representatives = result.representatives.copy()
    dropped = 0

    if method == REPLACE_REPRESENTATIVE:
        for e in extremes:
            if _is_existing_representative(x[e], representatives):
                report["skipped"].append(e)
                continue
            representatives[assignment[e]] = x[e]
        out = _finalize(matrix, result.method, assignment, representatives,
                        result.representative_kind, solver_gap=result.solver_gap)
        out.integration_report = report
        return out

    for e in extremes:
        if _is_existing_representative(x[e], representatives):
            report["skipped"].append(e)
            continue
        new_label = representatives.shape[0]
        representatives = np.vstack([representatives, x[e]])
        if method == APPEND:
            assignment[e] = new_label
        else:  # NEW_CLUSTER_CENTER
            dist_new = np.einsum("ij,ij->i", x - x[e], x - x[e])
            diff_old = x - representatives[assignment]
            dist_old = np.einsum("ij,ij->i", diff_old, diff_old)
            assignment[dist_new < dist_old] = new_label
        assignment, representatives, n_dropped = _drop_empty_clusters(assignment, representatives)
        dropped += n_dropped

    report["dropped_clusters"] = dropped
    out = _finalize(matrix, result.method, assignment, representatives,
                    result.representative_kind, solver_gap=result.solver_gap)
    out.integration_report = report
    return out
