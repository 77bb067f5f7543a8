"""Mean-preserving rescaling, back-scaling, and full-series reconstruction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cluster import ClusterResult
from .preprocess import CandidateMatrix, NormalizationInfo

__all__ = [
    "TypicalPeriodSet",
    "rescale_to_mean",
    "backscale",
    "build_typical_period_set",
    "reconstruct_full",
]


@dataclass(frozen=True)
class TypicalPeriodSet:
    """Rescaled typical periods in physical units with everything needed to rebuild a year.

    Representatives use the candidate-matrix column layout (attribute blocks of
    period steps). ``representatives_scaled`` is the normalized stage kept for
    indicator computation; ``representatives_physical`` is after back-scaling.
    """

    representatives_physical: np.ndarray
    representatives_scaled: np.ndarray
    weights: np.ndarray
    assignment: np.ndarray
    steps_per_period: int
    attribute_order: tuple[str, ...]
    step_length_hours: float
    norm_info: NormalizationInfo
    provenance: dict = field(default_factory=dict)
    scaling_report: dict = field(default_factory=dict)

    @property
    def n_clusters(self) -> int:
        return self.representatives_physical.shape[0]

    @property
    def n_periods(self) -> int:
        return self.assignment.shape[0]

    @property
    def n_attributes(self) -> int:
        return len(self.attribute_order)


def rescale_to_mean(result: ClusterResult, matrix: CandidateMatrix,
                    tol: float = 1e-9, max_iter: int = 100) -> tuple[np.ndarray, dict]:
    """Scale representatives so the weighted mean matches the original mean per attribute.

    After the multiplicative correction, values above 1 are clipped and the
    unclipped remainder re-scaled, iterating to a fixed point so both the range
    bound and the mean hold. Returns the scaled representatives and a report of
    residuals or attributes left unscaled.
    """
    g = matrix.steps_per_period
    weights = result.weights.astype(float)
    n_total = matrix.n_periods * g
    scaled = result.representatives.copy()
    report: dict = {"unscaled_attributes": [], "residuals": {}}

    for a, name in enumerate(matrix.attribute_order):
        cols = slice(a * g, (a + 1) * g)
        target = float(matrix.values[:, cols].sum())
        block = scaled[:, cols]
        aggregated = float(weights @ block.sum(axis=1))
        if abs(target) < 1e-12 and abs(aggregated) < 1e-12:
            continue
        if aggregated < 1e-12:
            report["unscaled_attributes"].append(name)
            continue
        block *= target / aggregated

        for _ in range(max_iter):
            np.clip(block, None, 1.0, out=block)
            current = float(weights @ block.sum(axis=1))
            if abs(current - target) / n_total < tol:
                break
            clipped = block >= 1.0
            clipped_total = float((clipped * weights[:, None]).sum())
            open_total = float(weights @ np.where(clipped, 0.0, block).sum(axis=1))
            if open_total <= 0.0:
                break
            factor = max(target - clipped_total, 0.0) / open_total
            block[~clipped] *= factor
        current = float(weights @ block.sum(axis=1))
        residual = abs(current - target) / n_total
        if residual >= tol:
            report["residuals"][name] = residual
        scaled[:, cols] = block
    return scaled, report


def backscale(scaled: np.ndarray, norm_info: NormalizationInfo,
              steps_per_period: int) -> np.ndarray:
    """Map normalized representatives back to physical units per attribute.

    Degenerate (constant) attributes come back as their original constant.
    """
    g = steps_per_period
    physical = np.asarray(scaled, dtype=float).copy()
    for a in range(len(norm_info.names)):
        cols = slice(a * g, (a + 1) * g)
        physical[:, cols] = physical[:, cols] * norm_info.spans[a] + norm_info.min_values[a]
    return physical


def build_typical_period_set(result: ClusterResult, matrix: CandidateMatrix,
                             provenance: dict | None = None) -> TypicalPeriodSet:
    """Rescale, back-scale and bundle a ClusterResult into a TypicalPeriodSet."""
    scaled, report = rescale_to_mean(result, matrix)
    physical = backscale(scaled, matrix.norm_info, matrix.steps_per_period)
    return TypicalPeriodSet(
        representatives_physical=physical,
        representatives_scaled=scaled,
        weights=result.weights.copy(),
        assignment=result.assignment.copy(),
        steps_per_period=matrix.steps_per_period,
        attribute_order=matrix.attribute_order,
        step_length_hours=matrix.step_length_hours,
        norm_info=matrix.norm_info,
        provenance=dict(provenance or {}),
        scaling_report=report,
    )


def _rows_to_series(rows: np.ndarray, steps_per_period: int) -> np.ndarray:
    n_rows, width = rows.shape
    n_attr = width // steps_per_period
    out = np.empty((n_rows * steps_per_period, n_attr))
    for a in range(n_attr):
        out[:, a] = rows[:, a * steps_per_period:(a + 1) * steps_per_period].reshape(-1)
    return out


def reconstruct_full(typical: TypicalPeriodSet, scale: str = "physical") -> np.ndarray:
    """Chronological full-length series with each period slot holding its representative.

    Returns shape (n_periods * steps_per_period, n_attributes); ``scale``
    selects physical units or the normalized stage.
    """
    if scale == "physical":
        reps = typical.representatives_physical
    elif scale == "normalized":
        reps = typical.representatives_scaled
    else:
        raise ValueError(f"unknown scale {scale!r}")
    return _rows_to_series(reps[typical.assignment], typical.steps_per_period)
