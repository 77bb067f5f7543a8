"""sklearn-style estimator wrapping the whole aggregation pipeline."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .cluster import (
    AVERAGING,
    HIERARCHICAL,
    KMEANS,
    KMEDOIDS_EXACT,
    aggregate_averaging,
    aggregate_hierarchical,
    aggregate_kmeans,
    aggregate_kmedoids_exact,
)
from .extremes import NONE, ExtremeSpec, detect_extremes, integrate_extremes
from .preprocess import RawSeriesSet, normalize, reshape_to_periods
from .rescale import build_typical_period_set, reconstruct_full

__all__ = ["TimeSeriesAggregator", "check_series_input"]

METHODS = (AVERAGING, KMEANS, KMEDOIDS_EXACT, HIERARCHICAL)


def check_series_input(X) -> tuple[np.ndarray, tuple[str, ...]]:
    """Validate a 2-d series container and extract (values, attribute names).

    Accepts a pandas DataFrame (columns become attribute names) or any
    array-like of shape (n_steps, n_attributes).
    """
    if hasattr(X, "columns") and hasattr(X, "to_numpy"):
        names = tuple(str(c) for c in X.columns)
        values = np.asarray(X.to_numpy(), dtype=float)
    else:
        values = np.asarray(X, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        names = tuple(f"x{i}" for i in range(values.shape[1]))
    if values.ndim != 2:
        raise ValueError(f"expected 2-d series data, got shape {values.shape}")
    if values.shape[0] < 1 or values.shape[1] < 1:
        raise ValueError("series data must not be empty")
    if not np.all(np.isfinite(values)):
        raise ValueError("series data contains non-finite values")
    return values, names


class TimeSeriesAggregator(BaseEstimator, TransformerMixin):
    """Aggregate a multi-attribute time series into weighted typical periods.

    ``fit`` normalizes the input, reshapes it into candidate periods, clusters
    them with the chosen method, optionally integrates extreme periods, and
    rescales the representatives so every attribute keeps its mean.
    ``transform`` returns the full-length reconstruction in original units and
    ``predict`` assigns new periods to the fitted representatives.

    Parameters
    ----------
    n_periods : int
        Number of typical periods to produce.
    steps_per_period : int
        Steps per candidate period (24 for typical days on hourly data).
    method : {"averaging", "kmeans", "kmedoids_exact", "hierarchical"}
    extreme_specs : sequence of ExtremeSpec or (attribute, criterion) pairs
    extreme_method : {"none", "append", "new_cluster_center", "replace_representative"}
    tail_policy : {"truncate", "pad_repeat_last"}
    seed, restarts : k-means reproducibility controls
    step_length_hours : duration of one step
    time_limit_seconds : cap for the exact k-medoids solve
    """

    def __init__(self, n_periods: int = 8, steps_per_period: int = 24,
                 method: str = HIERARCHICAL, extreme_specs=(),
                 extreme_method: str = NONE, tail_policy: str = "truncate",
                 seed: int = 0, restarts: int = 10, step_length_hours: float = 1.0,
                 time_limit_seconds: float = math.inf):
        self.n_periods = n_periods
        self.steps_per_period = steps_per_period
        self.method = method
        self.extreme_specs = extreme_specs
        self.extreme_method = extreme_method
        self.tail_policy = tail_policy
        self.seed = seed
        self.restarts = restarts
        self.step_length_hours = step_length_hours
        self.time_limit_seconds = time_limit_seconds

    def _cluster(self, matrix):
        if self.method == AVERAGING:
            return aggregate_averaging(matrix, self.n_periods)
        if self.method == KMEANS:
            return aggregate_kmeans(matrix, self.n_periods, seed=self.seed,
                                    restarts=self.restarts)
        if self.method == KMEDOIDS_EXACT:
            return aggregate_kmedoids_exact(matrix, self.n_periods,
                                            time_limit_seconds=self.time_limit_seconds)
        if self.method == HIERARCHICAL:
            return aggregate_hierarchical(matrix, self.n_periods)
        raise ValueError(f"unknown method {self.method!r}; choose one of {METHODS}")

    def fit(self, X, y=None):
        values, names = check_series_input(X)
        raw = RawSeriesSet(names=names, units=("",) * len(names), values=values,
                           step_length_hours=self.step_length_hours)
        normalized, info = normalize(raw)
        matrix = reshape_to_periods(normalized, raw.names, info, self.steps_per_period,
                                    tail_policy=self.tail_policy,
                                    step_length_hours=self.step_length_hours)
        result = self._cluster(matrix)
        if self.extreme_method != NONE or self.extreme_specs:
            specs = [s if isinstance(s, ExtremeSpec) else ExtremeSpec(*s)
                     for s in self.extreme_specs]
            if specs:
                extremes = detect_extremes(matrix, specs)
                result = integrate_extremes(result, matrix, extremes, self.extreme_method)
        self.raw_ = raw
        self.candidate_matrix_ = matrix
        self.cluster_result_ = result
        self.typical_periods_ = build_typical_period_set(
            result, matrix,
            provenance={"method": self.method, "integration": self.extreme_method,
                        "seed": self.seed})
        self.weights_ = self.typical_periods_.weights
        self.assignment_ = self.typical_periods_.assignment
        self.n_features_in_ = len(names)
        return self

    def _check_fitted(self):
        if not hasattr(self, "typical_periods_"):
            raise ValueError("this aggregator is not fitted yet; call fit first")

    def transform(self, X):
        """Full-length reconstruction of the fitted series in original units.

        ``X`` must carry the same attributes the aggregator was fitted on;
        DataFrames come back as DataFrames (index truncated to whole periods).
        """
        self._check_fitted()
        values, names = check_series_input(X)
        if names != self.raw_.names or values.shape != self.raw_.values.shape:
            raise ValueError("transform expects the series the aggregator was fitted on")
        reconstruction = self.reconstruction()
        if hasattr(X, "columns") and hasattr(X, "iloc"):
            out = X.iloc[: reconstruction.shape[0]].copy()
            out.loc[:, :] = reconstruction
            return out
        return reconstruction

    def reconstruction(self) -> np.ndarray:
        """Reconstruction of the fitted series from its typical periods."""
        self._check_fitted()
        return reconstruct_full(self.typical_periods_, scale="physical")

    def predict(self, X) -> np.ndarray:
        """Cluster label of each period of ``X`` (nearest fitted representative)."""
        self._check_fitted()
        values, names = check_series_input(X)
        if len(names) != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} attributes, got {len(names)}")
        info = self.typical_periods_.norm_info
        spans = np.where(info.degenerate, 1.0, info.spans)
        normalized = (values - info.min_values) / spans
        normalized[:, info.degenerate] = 0.0
        g = self.steps_per_period
        n_i = normalized.shape[0] // g
        if n_i < 1:
            raise ValueError(f"need at least {g} steps to form one period")
        rows = np.empty((n_i, self.n_features_in_ * g))
        for a in range(self.n_features_in_):
            rows[:, a * g:(a + 1) * g] = normalized[: n_i * g, a].reshape(n_i, g)
        reps = self.typical_periods_.representatives_scaled
        d = ((rows[:, None, :] - reps[None, :, :]) ** 2).sum(axis=2)
        return np.argmin(d, axis=1)
