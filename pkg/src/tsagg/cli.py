"""Command-line interface: aggregation, indicators, spectra, model solving, sweeps."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import io
from .cluster import AVERAGING, HIERARCHICAL, KMEANS, KMEDOIDS_EXACT
from .config import load_system_config
from .esm import build_full_model, build_typical_model
from .estimator import TimeSeriesAggregator
from .extremes import APPEND, NEW_CLUSTER_CENTER, NONE, REPLACE_REPRESENTATIVE
from .indicators import rmse_duration, rmse_profile
from .preprocess import normalize, spectrum
from .rescale import reconstruct_full
from .solver import NoIncumbentError, export_lp, solve_milp
from .synthetic import PROFILE_KINDS, generate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INFEASIBLE = 4
EXIT_NO_INCUMBENT = 5

_METHOD_FLAG = {
    "averaging": AVERAGING,
    "kmeans": KMEANS,
    "kmedoids": KMEDOIDS_EXACT,
    "hierarchical": HIERARCHICAL,
}
_EXTREME_FLAG = {
    "none": NONE,
    "append": APPEND,
    "new-center": NEW_CLUSTER_CENTER,
    "replace": REPLACE_REPRESENTATIVE,
}


def _parse_extreme(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"extreme spec must look like attribute:criterion, got {text!r}")
    return parts[0], parts[1]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsagg",
        description="Aggregate energy time series into typical periods and "
                    "validate them on design optimization models.")
    sub = parser.add_subparsers(dest="command", required=True)

    agg = sub.add_parser("aggregate", help="CSV in, typical-period set out")
    agg.add_argument("--input", required=True)
    agg.add_argument("--output", required=True, help="basename for .csv/.meta pair")
    agg.add_argument("--periods", type=int, required=True)
    agg.add_argument("--steps", type=int, default=24)
    agg.add_argument("--method", choices=sorted(_METHOD_FLAG), default="hierarchical")
    agg.add_argument("--extremes", type=_parse_extreme, nargs="*", default=[],
                     metavar="ATTR:CRITERION")
    agg.add_argument("--extreme-method", choices=sorted(_EXTREME_FLAG), default="none")
    agg.add_argument("--seed", type=int, default=0)
    agg.add_argument("--restarts", type=int, default=10)
    agg.add_argument("--tail", choices=["truncate", "pad"], default="truncate")
    agg.add_argument("--dt", type=float, default=1.0, help="step length in hours")
    agg.add_argument("--time-limit", type=float, default=math.inf)

    ind = sub.add_parser("indicators", help="score a typical-period set against the original")
    ind.add_argument("--input", required=True)
    ind.add_argument("--typical", required=True, help="basename of the saved set")
    ind.add_argument("--output", required=True)
    ind.add_argument("--dt", type=float, default=1.0)

    spec = sub.add_parser("spectrum", help="amplitude spectrum of each attribute")
    spec.add_argument("--input", required=True)
    spec.add_argument("--output", required=True)
    spec.add_argument("--dt", type=float, default=1.0)

    model = sub.add_parser("model", help="energy system model commands")
    model_sub = model.add_subparsers(dest="model_command", required=True)
    solve = model_sub.add_parser("solve", help="build and solve a design model")
    solve.add_argument("--config", required=True)
    group = solve.add_mutually_exclusive_group(required=True)
    group.add_argument("--profiles", help="CSV with the full series")
    group.add_argument("--typical", help="basename of a saved typical-period set")
    solve.add_argument("--output", required=True, help="JSON report path")
    solve.add_argument("--export-lp", default=None)
    solve.add_argument("--dt", type=float, default=1.0)
    solve.add_argument("--time-limit", type=float, default=math.inf)
    solve.add_argument("--gap", type=float, default=1e-6)

    sweep = sub.add_parser("sweep", help="method x n_periods x period-length error study")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--input", required=True)
    sweep.add_argument("--output", required=True)
    sweep.add_argument("--periods", required=True,
                       help="comma-separated list of typical-period counts")
    sweep.add_argument("--methods", default="averaging,kmeans,hierarchical")
    sweep.add_argument("--steps", default="24", help="comma-separated period lengths")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--dt", type=float, default=1.0)
    sweep.add_argument("--time-limit", type=float, default=math.inf)

    synth = sub.add_parser("synth", help="generate synthetic profiles")
    synth.add_argument("--kind", choices=PROFILE_KINDS, action="append", required=True,
                       dest="kinds")
    synth.add_argument("--names", default=None,
                       help="comma-separated column names (default: the kinds)")
    synth.add_argument("--output", required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--steps", type=int, default=8760)
    synth.add_argument("--dt", type=float, default=1.0)
    return parser


def _cmd_aggregate(args) -> int:
    raw = io.read_series_csv(args.input, step_length_hours=args.dt)
    agg = TimeSeriesAggregator(
        n_periods=args.periods, steps_per_period=args.steps,
        method=_METHOD_FLAG[args.method], extreme_specs=args.extremes,
        extreme_method=_EXTREME_FLAG[args.extreme_method],
        tail_policy="truncate" if args.tail == "truncate" else "pad_repeat_last",
        seed=args.seed, restarts=args.restarts, step_length_hours=args.dt,
        time_limit_seconds=args.time_limit)
    frame = _NamedSeries(raw.values, raw.names)
    agg.fit(frame)
    io.save_typical_set(agg.typical_periods_, args.output)
    print(f"wrote {args.output}.csv / .meta "
          f"({agg.typical_periods_.n_clusters} periods, method {args.method})")
    return EXIT_OK


class _NamedSeries:
    """Array with attribute names, enough to satisfy check_series_input."""

    def __init__(self, values, names):
        self._values = np.asarray(values, dtype=float)
        self.columns = list(names)

    def to_numpy(self):
        return self._values


def _cmd_indicators(args) -> int:
    raw = io.read_series_csv(args.input, step_length_hours=args.dt)
    typical = io.load_typical_set(args.typical)
    if set(typical.attribute_order) != set(raw.names):
        raise ValueError("typical set attributes do not match the input series")
    normalized, _ = normalize(raw)
    reconstruction = reconstruct_full(typical, scale="normalized")
    # a padded tail (pad_repeat_last) makes the reconstruction run past the
    # original; score the overlapping steps
    n_compare = min(raw.n_steps, reconstruction.shape[0])
    order = [raw.names.index(name) for name in typical.attribute_order]
    original = normalized[:n_compare, order]
    reconstruction = reconstruction[:n_compare]
    rp = rmse_profile(original, reconstruction)
    rd = rmse_duration(original, reconstruction)
    io.write_indicator_csv(args.output, typical.attribute_order, rp, rd)
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    raw = io.read_series_csv(args.input, step_length_hours=args.dt)
    io.write_spectrum_csv(args.output, spectrum(raw))
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_model_solve(args) -> int:
    system = load_system_config(args.config)
    if args.profiles:
        raw = io.read_series_csv(args.profiles, step_length_hours=args.dt)
        built = build_full_model(system, raw)
    else:
        typical = io.load_typical_set(args.typical)
        built = build_typical_model(system, typical)
    if args.export_lp:
        export_lp(built.problem, args.export_lp)
    solution = solve_milp(built.problem, time_limit_seconds=args.time_limit,
                          gap_tolerance=args.gap)
    report = io.solution_report(solution, built)
    with open(args.output, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2, sort_keys=True)
        handle.write("\n")
    print(f"wrote {args.output} (status {solution.status})")
    if solution.status in ("infeasible", "unbounded"):
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_sweep(args) -> int:
    system = load_system_config(args.config)
    raw = io.read_series_csv(args.input, step_length_hours=args.dt)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in _METHOD_FLAG:
            raise ValueError(f"unknown method {m!r}")
    period_counts = [int(v) for v in args.periods.split(",")]
    step_counts = [int(v) for v in args.steps.split(",")]

    built_full = build_full_model(system, raw)
    t0 = time.perf_counter()
    full_solution = solve_milp(built_full.problem, time_limit_seconds=args.time_limit)
    full_time = time.perf_counter() - t0
    if full_solution.status != "optimal":
        raise ValueError(f"full model ended with status {full_solution.status}")
    full_objective = full_solution.objective

    rows = []
    frame = _NamedSeries(raw.values, raw.names)
    for method in sorted(methods):
        for n_g in sorted(step_counts):
            for n_k in sorted(period_counts):
                agg = TimeSeriesAggregator(
                    n_periods=n_k, steps_per_period=n_g,
                    method=_METHOD_FLAG[method], seed=args.seed,
                    step_length_hours=args.dt, time_limit_seconds=args.time_limit)
                t0 = time.perf_counter()
                agg.fit(frame)
                built = build_typical_model(system, agg.typical_periods_)
                solution = solve_milp(built.problem, time_limit_seconds=args.time_limit)
                wall = time.perf_counter() - t0
                if solution.status != "optimal":
                    raise ValueError(
                        f"cell ({method}, {n_k}, {n_g}) ended with status {solution.status}")
                rows.append({
                    "method": method,
                    "n_periods": n_k,
                    "steps_per_period": n_g,
                    "objective": solution.objective,
                    "full_objective": full_objective,
                    "relative_error": (solution.objective - full_objective) / full_objective,
                    "wall_time_seconds": wall,
                    "full_wall_time_seconds": full_time,
                })

    with open(args.output, "w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.output} ({len(rows)} cells, full objective {full_objective:.6g})")
    return EXIT_OK


def _cmd_synth(args) -> int:
    from .preprocess import RawSeriesSet

    columns = []
    names = []
    units = []
    for i, kind in enumerate(args.kinds):
        raw = generate(kind, args.seed + i, args.steps, args.dt)
        columns.append(raw.values[:, 0])
        names.append(raw.names[0])
        units.append(raw.units[0])
    if args.names is not None:
        names = [n.strip() for n in args.names.split(",")]
        if len(names) != len(columns):
            raise ValueError(f"--names lists {len(names)} names for {len(columns)} kinds")
    merged = RawSeriesSet(names=tuple(names), units=tuple(units),
                          values=np.column_stack(columns), step_length_hours=args.dt)
    io.write_series_csv(args.output, merged)
    print(f"wrote {args.output} ({args.steps} steps x {len(names)} attributes)")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "aggregate":
            return _cmd_aggregate(args)
        if args.command == "indicators":
            return _cmd_indicators(args)
        if args.command == "spectrum":
            return _cmd_spectrum(args)
        if args.command == "model":
            return _cmd_model_solve(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "synth":
            return _cmd_synth(args)
        parser.error(f"unknown command {args.command!r}")
    except NoIncumbentError as exc:
        print(f"error: time_limit: {exc}", file=sys.stderr)
        return EXIT_NO_INCUMBENT
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
