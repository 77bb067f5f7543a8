"""Normalization, candidate-period reshaping and frequency analysis of raw series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RawSeriesSet",
    "NormalizationInfo",
    "CandidateMatrix",
    "Spectrum",
    "normalize",
    "reshape_to_periods",
    "spectrum",
]


@dataclass(frozen=True)
class RawSeriesSet:
    """A bundle of equally long, equally sampled attribute time series.

    Attributes are stored column-wise in ``values`` (``n_steps`` x ``n_attributes``),
    with ``names``/``units`` giving one label per column.
    """

    names: tuple[str, ...]
    units: tuple[str, ...]
    values: np.ndarray
    step_length_hours: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("values must be a 2-d array (n_steps x n_attributes)")
        object.__setattr__(self, "values", values)
        if len(self.names) == 0:
            raise ValueError("at least one attribute is required")
        if len(self.names) != values.shape[1]:
            raise ValueError("number of names does not match number of columns")
        if len(set(self.names)) != len(self.names):
            raise ValueError("attribute names must be unique")
        if len(self.units) != len(self.names):
            raise ValueError("one unit per attribute is required")
        if self.step_length_hours <= 0:
            raise ValueError("step_length_hours must be positive")
        if not np.all(np.isfinite(values)):
            raise ValueError("attribute values must be finite")

    @property
    def n_steps(self) -> int:
        return self.values.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]


@dataclass(frozen=True)
class NormalizationInfo:
    """Per-attribute min/max recorded during normalization, used for back-scaling."""

    names: tuple[str, ...]
    min_values: np.ndarray
    max_values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "min_values", np.asarray(self.min_values, dtype=float))
        object.__setattr__(self, "max_values", np.asarray(self.max_values, dtype=float))
        if np.any(self.max_values < self.min_values):
            raise ValueError("max must not fall below min")

    @property
    def degenerate(self) -> np.ndarray:
        """True for attributes whose values are all identical (max == min)."""
        return self.max_values == self.min_values

    @property
    def spans(self) -> np.ndarray:
        return self.max_values - self.min_values


@dataclass(frozen=True)
class CandidateMatrix:
    """Candidate periods as rows; columns are attribute blocks of period steps.

    Row ``i`` holds period ``i``. Columns ``[a * steps_per_period, (a + 1) *
    steps_per_period)`` hold attribute ``a``'s consecutive steps of that period,
    so the column count is ``n_attributes * steps_per_period``.
    """

    values: np.ndarray
    steps_per_period: int
    attribute_order: tuple[str, ...]
    norm_info: NormalizationInfo
    dropped_tail_steps: int = 0
    step_length_hours: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2:
            raise ValueError("candidate matrix must be 2-d")
        if values.shape[1] != self.steps_per_period * len(self.attribute_order):
            raise ValueError("column count must equal n_attributes * steps_per_period")
        if values.size and (values.min() < -1e-12 or values.max() > 1 + 1e-12):
            raise ValueError("normalized entries must lie in [0, 1]")

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]

    @property
    def n_attributes(self) -> int:
        return len(self.attribute_order)

    def attribute_block(self, name: str) -> np.ndarray:
        """All periods of one attribute, shape (n_periods, steps_per_period)."""
        a = self.attribute_order.index(name)
        g = self.steps_per_period
        return self.values[:, a * g:(a + 1) * g]

    def to_series(self, values: np.ndarray | None = None) -> np.ndarray:
        """Undo the period reshaping, returning (n_periods * steps_per_period, n_attributes)."""
        mat = self.values if values is None else np.asarray(values, dtype=float)
        n_i = mat.shape[0]
        g = self.steps_per_period
        out = np.empty((n_i * g, self.n_attributes))
        for a in range(self.n_attributes):
            out[:, a] = mat[:, a * g:(a + 1) * g].reshape(-1)
        return out


@dataclass(frozen=True)
class Spectrum:
    """One-sided amplitude spectrum per attribute, zero-frequency bin removed."""

    frequencies_per_hour: np.ndarray
    amplitudes: np.ndarray  # (n_frequencies, n_attributes)
    attribute_names: tuple[str, ...]

    def dominant_frequencies(self, name: str, count: int = 2) -> np.ndarray:
        """Frequencies of the ``count`` largest amplitudes of one attribute."""
        a = self.attribute_names.index(name)
        order = np.argsort(self.amplitudes[:, a])[::-1]
        return self.frequencies_per_hour[order[:count]]


def normalize(raw: RawSeriesSet) -> tuple[np.ndarray, NormalizationInfo]:
    """Scale every attribute to [0, 1] via (x - min) / (max - min).

    Constant attributes would divide by zero; they are mapped to all zeros and
    flagged as degenerate so that back-scaling can restore the constant.
    """
    mins = raw.values.min(axis=0)
    maxs = raw.values.max(axis=0)
    info = NormalizationInfo(raw.names, mins, maxs)
    spans = np.where(info.degenerate, 1.0, info.spans)
    scaled = (raw.values - mins) / spans
    scaled[:, info.degenerate] = 0.0
    return scaled, info


def reshape_to_periods(
    normalized: np.ndarray,
    names: tuple[str, ...],
    norm_info: NormalizationInfo,
    steps_per_period: int,
    tail_policy: str = "truncate",
    step_length_hours: float = 1.0,
) -> CandidateMatrix:
    """Arrange normalized series into the candidate-period matrix.

    ``truncate`` drops a trailing partial period; ``pad_repeat_last`` completes
    it by repeating each attribute's final value.
    """
    normalized = np.asarray(normalized, dtype=float)
    n_t, n_a = normalized.shape
    g = int(steps_per_period)
    if g < 1:
        raise ValueError("steps_per_period must be at least 1")
    if g > n_t:
        raise ValueError(f"steps_per_period {g} exceeds series length {n_t}")
    if tail_policy not in ("truncate", "pad_repeat_last"):
        raise ValueError(f"unknown tail policy {tail_policy!r}")

    remainder = n_t % g
    dropped = 0
    if tail_policy == "truncate":
        n_i = n_t // g
        data = normalized[: n_i * g]
        dropped = remainder
    else:
        n_i = -(-n_t // g)
        pad = n_i * g - n_t
        data = np.vstack([normalized, np.repeat(normalized[-1:], pad, axis=0)]) if pad else normalized

    columns = np.empty((n_i, n_a * g))
    for a in range(n_a):
        columns[:, a * g:(a + 1) * g] = data[:, a].reshape(n_i, g)
    return CandidateMatrix(
        values=columns,
        steps_per_period=g,
        attribute_order=tuple(names),
        norm_info=norm_info,
        dropped_tail_steps=dropped,
        step_length_hours=step_length_hours,
    )


def spectrum(raw: RawSeriesSet) -> Spectrum:
    """One-sided amplitude spectrum of each attribute, frequencies in 1/hour.

    Amplitudes are scaled so a pure sinusoid of amplitude A shows up as A in
    its bin; the mean (zero-frequency) component is dropped.
    """
    if raw.n_steps < 2:
        raise ValueError("at least two time steps are required")
    n = raw.n_steps
    coeffs = np.fft.rfft(raw.values, axis=0)
    amps = np.abs(coeffs) * (2.0 / n)
    if n % 2 == 0:
        amps[-1] /= 2.0  # Nyquist bin is not duplicated in the half spectrum
    freqs = np.fft.rfftfreq(n, d=raw.step_length_hours)
    return Spectrum(
        frequencies_per_hour=freqs[1:],
        amplitudes=amps[1:],
        attribute_names=raw.names,
    )
