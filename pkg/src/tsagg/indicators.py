"""Accuracy indicators comparing an aggregation against the original series."""

from __future__ import annotations

import numpy as np

from .rescale import TypicalPeriodSet, reconstruct_full

__all__ = ["rmse_profile", "rmse_duration"]


def _as_reconstruction(aggregated) -> np.ndarray:
    if isinstance(aggregated, TypicalPeriodSet):
        return reconstruct_full(aggregated, scale="normalized")
    return np.asarray(aggregated, dtype=float)


def _check_shapes(original: np.ndarray, reconstruction: np.ndarray) -> None:
    if original.shape != reconstruction.shape:
        raise ValueError(
            f"length mismatch: original {original.shape} vs reconstruction {reconstruction.shape}")


def rmse_profile(original_normalized, aggregated) -> np.ndarray:
    """Per-attribute RMSE in percent between normalized original and reconstruction.

    The reconstruction is compared chronologically, step by step.
    """
    original = np.asarray(original_normalized, dtype=float)
    reconstruction = _as_reconstruction(aggregated)
    _check_shapes(original, reconstruction)
    return 100.0 * np.sqrt(np.mean((original - reconstruction) ** 2, axis=0))


def rmse_duration(original_normalized, aggregated) -> np.ndarray:
    """Per-attribute RMSE in percent between the duration curves of both series.

    Both sides are sorted in descending order first, so chronology is ignored
    and only the value distributions are compared.
    """
    original = np.asarray(original_normalized, dtype=float)
    reconstruction = _as_reconstruction(aggregated)
    _check_shapes(original, reconstruction)
    orig_sorted = -np.sort(-original, axis=0)
    reco_sorted = -np.sort(-reconstruction, axis=0)
    return 100.0 * np.sqrt(np.mean((orig_sorted - reco_sorted) ** 2, axis=0))
