"""Grouping candidate periods into typical periods.

Four methods are provided: chronological averaging, k-means (Lloyd with seeded
distance-proportional initialization and restarts), exact k-medoids via the
embedded MILP solver, and agglomerative clustering with centroid linkage and
medoid representatives. All tie-breaking is lowest-index for reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .solver import MilpProblem, solve_milp

__all__ = [
    "ClusterResult",
    "pairwise_distances",
    "cluster_objective",
    "medoid_of",
    "aggregate_averaging",
    "aggregate_kmeans",
    "aggregate_kmedoids_exact",
    "aggregate_hierarchical",
]

AVERAGING = "averaging"
KMEANS = "kmeans"
KMEDOIDS_EXACT = "kmedoids_exact"
HIERARCHICAL = "hierarchical"


@dataclass
class ClusterResult:
    """A partition of candidate periods plus one representative per cluster.

    ``assignment`` holds 0-based cluster labels per candidate; ``weights[k]``
    is the cluster size. ``objective`` is the recomputed sum of squared
    distances between candidates and their assigned representatives.
    """

    method: str
    assignment: np.ndarray
    clusters: tuple[np.ndarray, ...]
    representatives: np.ndarray
    representative_kind: str  # centroid | medoid | chronological_mean
    weights: np.ndarray
    objective: float
    solver_gap: float = 0.0
    integration_report: dict = field(default_factory=dict)

    @property
    def n_clusters(self) -> int:
        return self.representatives.shape[0]

    @property
    def n_candidates(self) -> int:
        return self.assignment.shape[0]


def _values(matrix) -> np.ndarray:
    data = getattr(matrix, "values", matrix)
    return np.asarray(data, dtype=float)


def pairwise_distances(matrix) -> np.ndarray:
    """Squared Euclidean distances between all candidate rows.

    Returns a symmetric matrix with an exactly zero diagonal.
    """
    x = _values(matrix)
    sq = np.einsum("ij,ij->i", x, x)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d, 0.0, out=d)
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return d


def cluster_objective(matrix, assignment: np.ndarray, representatives: np.ndarray) -> float:
    """Sum of squared distances of candidates to their assigned representatives."""
    x = _values(matrix)
    assignment = np.asarray(assignment, dtype=int)
    representatives = np.asarray(representatives, dtype=float)
    if assignment.shape[0] != x.shape[0]:
        raise ValueError("assignment must cover every candidate")
    if assignment.size and (assignment.min() < 0 or assignment.max() >= representatives.shape[0]):
        raise ValueError("assignment index out of range")
    diff = x - representatives[assignment]
    return float(np.einsum("ij,ij->", diff, diff))


def medoid_of(matrix, members) -> int:
    """Member with the smallest summed squared distance to all other members.

    Ties are broken toward the lowest candidate index.
    """
    members = np.sort(np.asarray(members, dtype=int))
    if members.size == 0:
        raise ValueError("member set must not be empty")
    if members.size == 1:
        return int(members[0])
    sub = _values(matrix)[members]
    d = pairwise_distances(sub)
    return int(members[np.argmin(d.sum(axis=1))])


def _finalize(matrix, method: str, assignment: np.ndarray, representatives: np.ndarray,
              kind: str, solver_gap: float = 0.0) -> ClusterResult:
    assignment = np.asarray(assignment, dtype=int)
    n_k = representatives.shape[0]
    clusters = tuple(np.flatnonzero(assignment == k) for k in range(n_k))
    weights = np.array([c.size for c in clusters], dtype=int)
    if np.any(weights == 0):
        raise ValueError("every cluster must contain at least one candidate")
    return ClusterResult(
        method=method,
        assignment=assignment,
        clusters=clusters,
        representatives=np.asarray(representatives, dtype=float),
        representative_kind=kind,
        weights=weights,
        objective=cluster_objective(matrix, assignment, representatives),
        solver_gap=solver_gap,
    )


def _check_n_clusters(n_candidates: int, n_clusters: int) -> None:
    if not 1 <= n_clusters <= n_candidates:
        raise ValueError(
            f"number of clusters must lie in [1, {n_candidates}], got {n_clusters}")


def aggregate_averaging(matrix, n_clusters: int) -> ClusterResult:
    """Chronological averaging: contiguous blocks of periods, block means as representatives.

    Blocks have floor(n_candidates / n_clusters) members; the last block
    receives the remainder.
    """
    x = _values(matrix)
    n_i = x.shape[0]
    _check_n_clusters(n_i, n_clusters)
    block = n_i // n_clusters
    assignment = np.minimum(np.arange(n_i) // block, n_clusters - 1)
    representatives = np.vstack([x[assignment == k].mean(axis=0) for k in range(n_clusters)])
    return _finalize(matrix, AVERAGING, assignment, representatives, "chronological_mean")


def _seed_centers(x: np.ndarray, n_clusters: int, rng: np.random.Generator) -> np.ndarray:
    """Distance-proportional (k-means++ style) seeding."""
    n_i = x.shape[0]
    chosen = [int(rng.integers(n_i))]
    d2 = np.einsum("ij,ij->i", x - x[chosen[0]], x - x[chosen[0]])
    while len(chosen) < n_clusters:
        total = d2.sum()
        if total <= 0.0:
            pick = next(i for i in range(n_i) if i not in chosen)
        else:
            pick = int(rng.choice(n_i, p=d2 / total))
            if pick in chosen:  # duplicate rows leave zero-probability mass only
                pick = next(i for i in range(n_i) if i not in chosen)
        chosen.append(pick)
        alt = np.einsum("ij,ij->i", x - x[pick], x - x[pick])
        d2 = np.minimum(d2, alt)
    return x[chosen].copy()


def _assign_to_centers(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d, axis=1)  # first minimum: lowest cluster index wins ties


def _repair_empty(x: np.ndarray, assignment: np.ndarray, n_clusters: int) -> np.ndarray:
    """Move the candidate farthest from its centroid into each empty cluster."""
    assignment = assignment.copy()
    while True:
        counts = np.bincount(assignment, minlength=n_clusters)
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            return assignment
        centers = np.vstack([
            x[assignment == k].mean(axis=0) if counts[k] else np.zeros(x.shape[1])
            for k in range(n_clusters)
        ])
        dist = np.einsum("ij,ij->i", x - centers[assignment], x - centers[assignment])
        dist[counts[assignment] <= 1] = -1.0  # do not empty a singleton donor
        assignment[int(np.argmax(dist))] = empty[0]


def _lloyd(x: np.ndarray, centers: np.ndarray, max_iter: int, tol: float):
    """One k-means run; returns (assignment, centers, objective, objective history)."""
    n_clusters = centers.shape[0]
    assignment = None
    history = []
    for _ in range(max_iter):
        new_assignment = _assign_to_centers(x, centers)
        new_assignment = _repair_empty(x, new_assignment, n_clusters)
        centers = np.vstack([x[new_assignment == k].mean(axis=0) for k in range(n_clusters)])
        diff = x - centers[new_assignment]
        objective = float(np.einsum("ij,ij->", diff, diff))
        history.append(objective)
        if assignment is not None and np.array_equal(assignment, new_assignment):
            break
        if len(history) > 1 and history[-2] - objective < tol:
            assignment = new_assignment
            break
        assignment = new_assignment
    return assignment, centers, history[-1], history


def aggregate_kmeans(matrix, n_clusters: int, seed: int = 0, restarts: int = 10,
                     max_iter: int = 300, tol: float = 1e-9) -> ClusterResult:
    """Lloyd's k-means over candidate periods, keeping the best of ``restarts`` runs.

    Initialization is seeded distance-proportional sampling, so results are
    reproducible for a fixed seed. Empty clusters are repaired by donating the
    candidate farthest from its centroid.
    """
    x = _values(matrix)
    _check_n_clusters(x.shape[0], n_clusters)
    if restarts < 1:
        raise ValueError("restarts must be positive")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        centers = _seed_centers(x, n_clusters, rng)
        assignment, centers, objective, _ = _lloyd(x, centers, max_iter, tol)
        if best is None or objective < best[0] - 1e-15:
            best = (objective, assignment, centers)
    _, assignment, centers = best
    return _finalize(matrix, KMEANS, assignment, centers, "centroid")


def _medoid_milp(d: np.ndarray, n_clusters: int) -> MilpProblem:
    """Medoid-selection MILP: pick n_clusters medoids, assign everyone to one.

    ``y_i`` marks candidate i as a medoid; ``z_ij`` assigns candidate j to
    medoid i and is only allowed when ``y_i`` is chosen. A chosen medoid is
    assigned to itself (the self-assignment variable is substituted by y_i).
    """
    n = d.shape[0]
    problem = MilpProblem("kmedoids")
    y = [problem.add_variable(f"y_{i}", kind="binary") for i in range(n)]
    z = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                z[i, j] = problem.add_variable(f"z_{i}_{j}", lower=0.0, upper=1.0,
                                               objective=float(d[i, j]))
    for j in range(n):
        coeffs = {z[i, j]: 1.0 for i in range(n) if i != j}
        coeffs[y[j]] = 1.0
        problem.add_constraint(f"assign_{j}", coeffs, "=", 1.0)
    for (i, j), var in z.items():
        problem.add_constraint(f"open_{i}_{j}", {var: 1.0, y[i]: -1.0}, "<=", 0.0)
    problem.add_constraint("medoid_count", {v: 1.0 for v in y}, "=", float(n_clusters))
    return problem


def _medoid_set_cost(d: np.ndarray, medoids: np.ndarray) -> float:
    return float(d[medoids].min(axis=0).sum())


def _polish_medoid_set(d: np.ndarray, medoids: list[int]) -> list[int]:
    """Swap toward the lexicographically smallest medoid set with equal cost."""
    base = _medoid_set_cost(d, np.array(medoids))
    current = set(medoids)
    changed = True
    while changed:
        changed = False
        for candidate in range(d.shape[0]):
            if candidate in current:
                continue
            for medoid in sorted(current, reverse=True):
                if medoid <= candidate:
                    break
                trial = np.array(sorted(current - {medoid} | {candidate}))
                if _medoid_set_cost(d, trial) <= base + 1e-12:
                    current = set(trial)
                    changed = True
                    break
    return sorted(current)


def aggregate_kmedoids_exact(matrix, n_clusters: int,
                             time_limit_seconds: float = math.inf,
                             gap_tolerance: float = 1e-6) -> ClusterResult:
    """Globally optimal k-medoids via the embedded MILP solver.

    On time-limit expiry the incumbent is returned and ``solver_gap`` reports
    the remaining optimality gap. Among equal-cost optima the lexicographically
    smallest medoid set is selected.
    """
    x = _values(matrix)
    n_i = x.shape[0]
    _check_n_clusters(n_i, n_clusters)
    d = pairwise_distances(x)
    problem = _medoid_milp(d, n_clusters)
    solution = solve_milp(problem, time_limit_seconds=time_limit_seconds,
                          gap_tolerance=gap_tolerance)
    if solution.status not in ("optimal", "time_limit_incumbent"):
        raise ValueError(f"medoid MILP ended with status {solution.status}")
    y_values = np.array([solution.values[problem.variable_index(f"y_{i}")] for i in range(n_i)])
    medoids = [int(i) for i in np.flatnonzero(y_values > 0.5)]
    if solution.status == "optimal":
        medoids = _polish_medoid_set(d, medoids)
    medoid_rows = np.array(medoids, dtype=int)
    assignment = medoid_rows[np.argmin(d[medoid_rows], axis=0)]
    # chosen medoids are assigned to themselves; with duplicate candidate rows
    # the nearest-medoid tie-break could otherwise drain a medoid's cluster
    assignment[medoid_rows] = medoid_rows
    # relabel clusters 0..n_k-1 in medoid index order
    label_of = {medoid: k for k, medoid in enumerate(medoids)}
    labels = np.array([label_of[m] for m in assignment], dtype=int)
    representatives = x[medoid_rows].copy()
    return _finalize(matrix, KMEDOIDS_EXACT, labels, representatives, "medoid",
                     solver_gap=solution.gap)


def aggregate_hierarchical(matrix, n_clusters: int) -> ClusterResult:
    """Agglomerative clustering with centroid linkage and medoid representatives.

    Each round recomputes cluster centroids and merges the pair with the
    smallest squared centroid distance (lowest pair on ties); the final
    representative of a cluster is its medoid. Deterministic, no seed.
    """
    x = _values(matrix)
    n_i = x.shape[0]
    _check_n_clusters(n_i, n_clusters)
    clusters: list[list[int]] = [[i] for i in range(n_i)]
    centroids = x.copy()
    sizes = np.ones(n_i)
    while len(clusters) > n_clusters:
        d = pairwise_distances(centroids)
        np.fill_diagonal(d, math.inf)
        flat = int(np.argmin(d))  # first minimum: lexicographically lowest (i, j)
        i, j = divmod(flat, d.shape[0])
        if i > j:
            i, j = j, i
        merged = sizes[i] + sizes[j]
        centroids[i] = (centroids[i] * sizes[i] + centroids[j] * sizes[j]) / merged
        sizes[i] = merged
        clusters[i] = sorted(clusters[i] + clusters[j])
        del clusters[j]
        centroids = np.delete(centroids, j, axis=0)
        sizes = np.delete(sizes, j)

    assignment = np.empty(n_i, dtype=int)
    representatives = np.empty((n_clusters, x.shape[1]))
    for k, members in enumerate(clusters):
        assignment[members] = k
        representatives[k] = x[medoid_of(x, members)]
    return _finalize(matrix, HIERARCHICAL, assignment, representatives, "medoid")
