"""CSV and JSON interfaces: series input, typical-period sets, result tables."""

from __future__ import annotations

import csv
import math
import re
from pathlib import Path

import numpy as np

from .preprocess import NormalizationInfo, RawSeriesSet, Spectrum
from .rescale import TypicalPeriodSet

__all__ = [
    "read_series_csv",
    "write_series_csv",
    "save_typical_set",
    "load_typical_set",
    "write_spectrum_csv",
    "write_indicator_csv",
    "solution_report",
]

_TIME_NAMES = {"time", "timestamp", "datetime", "date", "t"}
_UNIT_IN_NAME = re.compile(r"^(?P<name>.*?)\s*\[(?P<unit>[^\]]*)\]\s*$")


def _parse_header(cell: str) -> tuple[str, str]:
    match = _UNIT_IN_NAME.match(cell.strip())
    if match:
        return match.group("name"), match.group("unit")
    return cell.strip(), ""


def read_series_csv(path: str | Path, step_length_hours: float = 1.0) -> RawSeriesSet:
    """Read a comma-separated series file: header row, one attribute per column.

    A first column named like a timestamp (or non-numeric) is used only to
    validate ordering. Units may ride along in headers as ``name [unit]``.
    Malformed rows abort with the offending line number.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        if not header:
            raise ValueError(f"{path}: header row is empty")

        first_is_time = _parse_header(header[0])[0].lower() in _TIME_NAMES
        rows: list[list[float]] = []
        stamps: list[str] = []
        width = len(header)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != width:
                raise ValueError(f"{path}:{lineno}: expected {width} columns, found {len(row)}")
            data_cells = row[1:] if first_is_time else row
            if not first_is_time and lineno == 2:
                # Tolerate an unnamed leading timestamp column.
                try:
                    float(row[0])
                except ValueError:
                    first_is_time = True
                    data_cells = row[1:]
            try:
                rows.append([float(cell) for cell in data_cells])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if first_is_time:
                stamps.append(row[0])

        if not rows:
            raise ValueError(f"{path}: no data rows")
        if stamps and stamps != sorted(stamps):
            raise ValueError(f"{path}: timestamp column is not in ascending order")

    data_header = header[1:] if first_is_time else header
    names, units = zip(*(_parse_header(cell) for cell in data_header))
    return RawSeriesSet(names=tuple(names), units=tuple(units),
                        values=np.asarray(rows, dtype=float),
                        step_length_hours=step_length_hours)


def write_series_csv(path: str | Path, raw: RawSeriesSet) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"{n} [{u}]" if u else n for n, u in zip(raw.names, raw.units)])
        for row in raw.values:
            writer.writerow([repr(float(v)) for v in row])
    return path


def save_typical_set(typical: TypicalPeriodSet, base: str | Path) -> tuple[Path, Path]:
    """Write ``<base>.csv`` (cluster, weight, step, attribute, value rows) plus
    a ``<base>.meta`` key-value sidecar carrying layout and provenance."""
    base = Path(base)
    csv_path = base.with_suffix(".csv")
    meta_path = base.with_suffix(".meta")
    g = typical.steps_per_period
    with open(csv_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["cluster", "weight", "step", "attribute", "value"])
        for k in range(typical.n_clusters):
            for a, name in enumerate(typical.attribute_order):
                block = typical.representatives_physical[k, a * g:(a + 1) * g]
                for s, value in enumerate(block):
                    writer.writerow([k, int(typical.weights[k]), s, name, repr(float(value))])

    info = typical.norm_info
    lines = [
        f"steps_per_period = {g}",
        f"step_length_hours = {typical.step_length_hours!r}",
        f"attribute_order = {','.join(typical.attribute_order)}",
        f"assignment = {','.join(str(int(v)) for v in typical.assignment)}",
        f"norm_min = {','.join(repr(float(v)) for v in info.min_values)}",
        f"norm_max = {','.join(repr(float(v)) for v in info.max_values)}",
    ]
    for key, value in sorted(typical.provenance.items()):
        lines.append(f"provenance.{key} = {value}")
    meta_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return csv_path, meta_path


def load_typical_set(base: str | Path) -> TypicalPeriodSet:
    """Rebuild a TypicalPeriodSet from ``save_typical_set`` output."""
    base = Path(base)
    meta: dict[str, str] = {}
    for line in base.with_suffix(".meta").read_text(encoding="utf-8").splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            meta[key.strip()] = value.strip()
    g = int(meta["steps_per_period"])
    names = tuple(meta["attribute_order"].split(","))
    assignment = np.array([int(v) for v in meta["assignment"].split(",")], dtype=int)
    info = NormalizationInfo(
        names=names,
        min_values=np.array([float(v) for v in meta["norm_min"].split(",")]),
        max_values=np.array([float(v) for v in meta["norm_max"].split(",")]),
    )
    provenance = {k.split(".", 1)[1]: v for k, v in meta.items() if k.startswith("provenance.")}

    cells: dict[tuple[int, int, int], float] = {}
    weights: dict[int, int] = {}
    col_of = {name: a for a, name in enumerate(names)}
    with open(base.with_suffix(".csv"), "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        next(reader)
        for row in reader:
            k, weight, s, name, value = int(row[0]), int(row[1]), int(row[2]), row[3], float(row[4])
            cells[(k, col_of[name], s)] = value
            weights[k] = weight
    n_k = max(weights) + 1
    physical = np.empty((n_k, len(names) * g))
    for (k, a, s), value in cells.items():
        physical[k, a * g + s] = value

    spans = np.where(info.degenerate, 1.0, info.spans)
    scaled = physical.copy()
    for a in range(len(names)):
        cols = slice(a * g, (a + 1) * g)
        scaled[:, cols] = (physical[:, cols] - info.min_values[a]) / spans[a]
        if info.degenerate[a]:
            scaled[:, cols] = 0.0
    return TypicalPeriodSet(
        representatives_physical=physical,
        representatives_scaled=scaled,
        weights=np.array([weights[k] for k in range(n_k)], dtype=int),
        assignment=assignment,
        steps_per_period=g,
        attribute_order=names,
        step_length_hours=float(meta["step_length_hours"]),
        norm_info=info,
        provenance=provenance,
    )


def write_spectrum_csv(path: str | Path, spec: Spectrum) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["attribute", "frequency_per_hour", "amplitude"])
        for a, name in enumerate(spec.attribute_names):
            for f, amp in zip(spec.frequencies_per_hour, spec.amplitudes[:, a]):
                writer.writerow([name, repr(float(f)), repr(float(amp))])
    return path


def write_indicator_csv(path: str | Path, names, profile_rmse, duration_rmse) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["attribute", "rmse_percent", "duration_rmse_percent"])
        for name, rp, rd in zip(names, profile_rmse, duration_rmse):
            writer.writerow([name, repr(float(rp)), repr(float(rd))])
    return path


def solution_report(solution, built=None) -> dict:
    """JSON-ready summary of a MilpSolution, optionally with device capacities."""
    report = {
        "status": solution.status,
        "objective": None if math.isnan(solution.objective) else solution.objective,
        "gap": None if math.isnan(solution.gap) else solution.gap,
        "iterations": solution.iterations,
        "nodes": solution.nodes,
        "wall_time_seconds": solution.wall_time_seconds,
    }
    if built is not None and solution.values.size:
        def _clean(value: float) -> float:
            return 0.0 if abs(value) < 1e-9 else value

        report["capacities"] = {
            name: _clean(built.capacity_of(solution.values, name))
            for name in built.capacity_vars}
        report["existence"] = {
            name: round(built.existence_of(solution.values, name))
            for name in built.existence_vars}
    return report
