"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and the logged speedup ratio.
"""

import itertools
import math
import time

import numpy as np
import pytest

from tsagg.cluster import (
    aggregate_averaging,
    aggregate_hierarchical,
    aggregate_kmeans,
    aggregate_kmedoids_exact,
    cluster_objective,
    medoid_of,
    pairwise_distances,
)
from tsagg.config import bundled_config_path, load_system_config
from tsagg.esm import (
    Connection,
    Device,
    Profile,
    SystemModel,
    build_full_model,
    build_typical_model,
)
from tsagg.extremes import (
    APPEND,
    INTEGRATION_METHODS,
    NEW_CLUSTER_CENTER,
    NONE,
    REPLACE_REPRESENTATIVE,
    ExtremeSpec,
    detect_extremes,
    integrate_extremes,
)
from tsagg.indicators import rmse_duration, rmse_profile
from tsagg.preprocess import RawSeriesSet, normalize, reshape_to_periods, spectrum
from tsagg.rescale import build_typical_period_set, reconstruct_full
from tsagg.solver import MilpProblem, solve_milp
from tsagg.solver.simplex import solve_arrays, to_arrays
from tsagg.synthetic import PROFILE_KINDS, generate

METHODS = {
    "averaging": lambda mat, k: aggregate_averaging(mat, k),
    "kmeans": lambda mat, k: aggregate_kmeans(mat, k, seed=0),
    "kmedoids_exact": lambda mat, k: aggregate_kmedoids_exact(mat, k),
    "hierarchical": lambda mat, k: aggregate_hierarchical(mat, k),
}

# ClusterResults produced while checking criteria 3-5, re-audited by criterion 11.
PRODUCED_RESULTS: list = []


def _report(number: int, text: str) -> None:
    print(f"ACCEPTANCE {number}: PASS - {text}")


@pytest.fixture(scope="module")
def synthetic_days():
    """21 hourly days with one attribute per synthetic profile kind."""
    n_steps = 21 * 24
    columns = [generate(kind, seed, n_steps).values[:, 0]
               for seed, kind in enumerate(PROFILE_KINDS)]
    raw = RawSeriesSet(names=PROFILE_KINDS, units=("",) * len(PROFILE_KINDS),
                       values=np.column_stack(columns))
    scaled, info = normalize(raw)
    matrix = reshape_to_periods(scaled, raw.names, info, 24)
    return raw, scaled, matrix


def canonical_partition(assignment):
    label_map = {}
    out = []
    for value in assignment:
        label_map.setdefault(value, len(label_map))
        out.append(label_map[value])
    return tuple(out)


def test_criterion_01_exact_kmedoids_matches_enumeration():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    for _ in range(50):
        n_i = int(rng.integers(2, 11))
        n_k = int(rng.integers(1, min(3, n_i) + 1))
        x = rng.random((n_i, int(rng.integers(1, 7))))
        result = aggregate_kmedoids_exact(x, n_k)

        d = pairwise_distances(x)
        best_cost, best_set = math.inf, None
        for combo in itertools.combinations(range(n_i), n_k):
            cost = d[list(combo)].min(axis=0).sum()
            if cost < best_cost - 1e-12:
                best_cost, best_set = cost, combo
        oracle_rows = np.array(best_set)
        oracle_assignment = oracle_rows[np.argmin(d[oracle_rows], axis=0)]

        assert result.objective == pytest.approx(best_cost, abs=1e-9)
        assert canonical_partition(result.assignment) == canonical_partition(oracle_assignment)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"k-medoids oracle took {elapsed:.2f}s"
    _report(1, f"50 instances matched enumeration in {elapsed:.2f}s")


def test_criterion_02_milp_matches_binary_enumeration():
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    sizes = [int(rng.integers(1, 9)) for _ in range(45)] + [12, 11, 10, 9, 9]
    for nb in sizes:
        nc = int(rng.integers(1, 21))
        m = int(rng.integers(2, 7))
        n = nb + nc
        a = np.round(rng.normal(0, 2, (m, n)) * (rng.random((m, n)) < 0.7), 3)
        c = np.round(rng.normal(0, 2, n), 3)
        senses = rng.choice(["<=", ">=", "="], m, p=[0.6, 0.25, 0.15])
        x0 = np.concatenate([rng.integers(0, 2, nb).astype(float), rng.uniform(0, 2, nc)])
        slack = np.where(senses == "<=", np.abs(rng.normal(0, 1, m)),
                         np.where(senses == ">=", -np.abs(rng.normal(0, 1, m)), 0.0))
        b = a @ x0 + slack

        problem = MilpProblem("acc2")
        for j in range(nb):
            problem.add_variable(f"b{j}", kind="binary", objective=c[j])
        for j in range(nc):
            problem.add_variable(f"x{j}", lower=0.0, upper=4.0, objective=c[nb + j])
        for i in range(m):
            coeffs = {j: a[i, j] for j in range(n) if a[i, j] != 0.0}
            if coeffs:
                problem.add_constraint(f"r{i}", coeffs, senses[i], b[i])

        solution = solve_milp(problem)

        arrays = to_arrays(problem)
        best = math.inf
        for bits in itertools.product([0.0, 1.0], repeat=nb):
            lo = arrays.lower.copy()
            hi = arrays.upper.copy()
            lo[:nb] = np.maximum(lo[:nb], bits)
            hi[:nb] = np.minimum(hi[:nb], bits)
            completed = solve_arrays(arrays, lo, hi)
            if completed.status == "optimal":
                best = min(best, completed.objective)

        if math.isfinite(best):
            assert solution.status == "optimal"
            assert abs(solution.objective - best) <= 1e-6 * max(1.0, abs(best))
        else:
            assert solution.status == "infeasible"
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"MILP oracle took {elapsed:.2f}s"
    _report(2, f"50 problems matched exhaustive enumeration in {elapsed:.2f}s")


def test_criterion_03_duration_rmse_never_exceeds_profile_rmse(synthetic_days):
    raw, scaled, matrix = synthetic_days
    checked = 0
    for name, method in METHODS.items():
        for n_k in (2, 4, 8):
            result = method(matrix, n_k)
            PRODUCED_RESULTS.append((result, matrix))
            typical = build_typical_period_set(result, matrix)
            used = typical.n_periods * typical.steps_per_period
            profile = rmse_profile(scaled[:used], typical)
            duration = rmse_duration(scaled[:used], typical)
            assert np.all(duration <= profile + 1e-12), (name, n_k)
            checked += len(profile)
    _report(3, f"{checked} (method, n_k, attribute) cells satisfy the sorted bound")


def test_criterion_04_centroid_dominates_medoid_substitution(synthetic_days):
    _, _, matrix = synthetic_days
    rng = np.random.default_rng(404)
    cases = 0
    for n_k in (2, 4, 8):
        result = aggregate_kmeans(matrix, n_k, seed=0)
        medoid_reps = np.vstack([matrix.values[medoid_of(matrix.values, members)]
                                 for members in result.clusters])
        substituted = cluster_objective(matrix, result.assignment, medoid_reps)
        assert substituted >= result.objective - 1e-9
        cases += 1
    for _ in range(5):
        x = rng.random((int(rng.integers(8, 30)), int(rng.integers(2, 10))))
        result = aggregate_kmeans(x, int(rng.integers(2, 6)), seed=1)
        medoid_reps = np.vstack([x[medoid_of(x, members)] for members in result.clusters])
        assert cluster_objective(x, result.assignment, medoid_reps) >= result.objective - 1e-9
        cases += 1
    _report(4, f"medoid substitution never improved k-means in {cases} cases")


def test_criterion_05_mean_preserved_for_all_pipelines(synthetic_days):
    raw, scaled, matrix = synthetic_days
    specs = [ExtremeSpec("household_load_like", "max_step_value"),
             ExtremeSpec("solar_like", "min_period_sum"),
             ExtremeSpec("regional_load_like", "max_period_sum")]
    extremes = detect_extremes(matrix, specs)
    used = matrix.n_periods * matrix.steps_per_period
    original = raw.values[:used]
    pipelines = 0
    for name, method in METHODS.items():
        for n_k in (2, 4, 8, 12):
            base = method(matrix, n_k)
            for integration in INTEGRATION_METHODS:
                result = integrate_extremes(base, matrix, extremes, integration)
                PRODUCED_RESULTS.append((result, matrix))
                typical = build_typical_period_set(result, matrix)
                reconstruction = reconstruct_full(typical, scale="physical")
                for a in range(raw.n_attributes):
                    mean_orig = original[:, a].mean()
                    mean_reco = reconstruction[:, a].mean()
                    rel = abs(mean_reco - mean_orig) / max(abs(mean_orig), 1e-12)
                    assert rel < 1e-6, (name, n_k, integration, raw.names[a])
                pipelines += 1
    _report(5, f"attribute means preserved across {pipelines} pipelines")


def test_criterion_06_spectra_show_daily_and_annual_structure():
    for kind in ("solar_like", "regional_load_like"):
        raw = generate(kind, 0, 8760)
        spec = spectrum(raw)
        top2 = sorted(spec.dominant_frequencies(kind, 2))
        assert top2[0] == pytest.approx(1.0 / 8760.0, rel=1e-9), kind
        assert top2[1] == pytest.approx(1.0 / 24.0, rel=1e-9), kind
    wind = spectrum(generate("wind_like", 0, 8760))
    amps = wind.amplitudes[:, 0]
    daily_bin = int(np.argmin(np.abs(wind.frequencies_per_hour - 1.0 / 24.0)))
    assert int(np.argmax(amps)) != daily_bin
    _report(6, "daily/annual lines dominate solar and regional load; wind daily line is secondary")


def _storage_free_toy():
    return SystemModel(
        name="acc7",
        devices={
            "imp": Device("imp", "source_sink", variable_cost=0.21, max_capacity=1e5),
            "conv": Device("conv", "transformer", capex_spec=75.0, max_capacity=1e5,
                           efficiencies={("fuel", "electricity"): 0.85}),
            "dem": Device("dem", "source_sink", min_capacity=1.0, max_capacity=1.0,
                          lower_bound=Profile(attribute="elec_demand"),
                          upper_bound=Profile(attribute="elec_demand")),
        },
        connections=[Connection("imp", "conv", "fuel"),
                     Connection("conv", "dem", "electricity")],
    )


def test_criterion_07_typical_model_degenerates_to_full_model():
    rng = np.random.default_rng(707)
    demand = 1.0 + rng.random(96)
    raw = RawSeriesSet(names=("elec_demand",), units=("kW",), values=demand[:, None])
    system = _storage_free_toy()
    full = solve_milp(build_full_model(system, raw).problem)

    scaled, info = normalize(raw)
    matrix = reshape_to_periods(scaled, raw.names, info, 24)
    result = aggregate_hierarchical(matrix, matrix.n_periods)  # singleton clusters
    typical = build_typical_period_set(result, matrix)
    typ = solve_milp(build_typical_model(system, typical).problem)

    rel = abs(typ.objective - full.objective) / abs(full.objective)
    assert rel < 1e-6
    _report(7, f"singleton typical model reproduces the full objective (rel err {rel:.2e})")


def test_criterion_08_per_period_closure_starves_seasonal_storage():
    avail = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    demand = np.full(6, 0.5)
    raw = RawSeriesSet(names=("avail", "elec_demand"), units=("", "kW"),
                       values=np.c_[avail, demand], step_length_hours=24.0)
    system = SystemModel(
        name="acc8",
        devices={
            "renew": Device("renew", "source_sink", capex_spec=100.0, max_capacity=100.0,
                            upper_bound=Profile(attribute="avail")),
            "backup": Device("backup", "source_sink", variable_cost=50.0,
                             max_capacity=100.0),
            "store": Device("store", "storage", capex_exist=10.0, capex_spec=1.0,
                            max_capacity=1000.0),
            "bus": Device("bus", "collector"),
            "dem": Device("dem", "source_sink", min_capacity=1.0, max_capacity=1.0,
                          lower_bound=Profile(attribute="elec_demand"),
                          upper_bound=Profile(attribute="elec_demand")),
        },
        connections=[
            Connection("renew", "bus", "electricity"),
            Connection("backup", "bus", "electricity"),
            Connection("bus", "store", "electricity"),
            Connection("store", "bus", "electricity"),
            Connection("bus", "dem", "electricity"),
        ],
    )
    built_full = build_full_model(system, raw)
    full = solve_milp(built_full.problem)
    storage_full = built_full.capacity_of(full.values, "store")
    assert storage_full > 1.0, "full model should rely on inter-day storage"

    scaled, info = normalize(raw)
    matrix = reshape_to_periods(scaled, raw.names, info, 1, step_length_hours=24.0)
    typical = build_typical_period_set(aggregate_kmedoids_exact(matrix, 2), matrix)
    built_typ = build_typical_model(system, typical)
    typ = solve_milp(built_typ.problem)
    storage_typ = built_typ.capacity_of(typ.values, "store")
    assert storage_typ == pytest.approx(0.0, abs=1e-6)
    _report(8, f"storage capacity {storage_full:.1f} kWh (full) vs {storage_typ:.1e} (typical)")


def test_criterion_09_typical_model_solves_at_least_five_times_faster():
    system = load_system_config(bundled_config_path("chp"))
    n_days = 364
    elec = generate("regional_load_like", 11, n_days, 24.0).values[:, 0] / 10.0
    heat = generate("household_load_like", 12, n_days, 24.0).values[:, 0] * 40.0 + 10.0
    raw = RawSeriesSet(names=("elec_demand", "heat_demand"), units=("kW", "kW"),
                       values=np.c_[elec, heat], step_length_hours=24.0)

    built_full = build_full_model(system, raw)
    start = time.perf_counter()
    full = solve_milp(built_full.problem)
    full_time = time.perf_counter() - start
    assert full.status == "optimal"

    scaled, info = normalize(raw)
    matrix = reshape_to_periods(scaled, raw.names, info, 1, step_length_hours=24.0)
    typical = build_typical_period_set(aggregate_hierarchical(matrix, 8), matrix)
    built_typ = build_typical_model(system, typical)
    start = time.perf_counter()
    typ = solve_milp(built_typ.problem)
    typ_time = time.perf_counter() - start
    assert typ.status == "optimal"

    ratio = full_time / typ_time
    assert ratio >= 5.0, f"speedup only {ratio:.1f}x"
    _report(9, f"8-typical-day model is {ratio:.0f}x faster "
               f"({full_time:.2f}s vs {typ_time:.4f}s, objectives "
               f"{full.objective:.0f} vs {typ.objective:.0f})")


def test_criterion_10_extreme_integration_bookkeeping():
    rng = np.random.default_rng(1010)
    cases = 0
    for _ in range(20):
        n_steps = int(rng.integers(12, 40)) * 2
        values = rng.random((n_steps, 2))
        raw = RawSeriesSet(names=("p", "q"), units=("", ""), values=values)
        scaled, info = normalize(raw)
        matrix = reshape_to_periods(scaled, raw.names, info, 2)
        n_k = int(rng.integers(1, min(6, matrix.n_periods) + 1))
        base = aggregate_kmeans(matrix, n_k, seed=int(rng.integers(1000)))
        extremes = detect_extremes(matrix, [ExtremeSpec("p", "max_step_value"),
                                            ExtremeSpec("q", "min_period_sum")])
        for method in INTEGRATION_METHODS:
            out = integrate_extremes(base, matrix, extremes, method)
            assert out.weights.sum() == matrix.n_periods, method
            report = out.integration_report
            fresh = len(report["extremes"]) - len(report["skipped"])
            if method in (APPEND, NEW_CLUSTER_CENTER):
                assert out.n_clusters == base.n_clusters + fresh - report["dropped_clusters"]
            else:
                assert out.n_clusters == base.n_clusters
            if method in (NONE, REPLACE_REPRESENTATIVE):
                assert np.array_equal(out.assignment, base.assignment)
            cases += 1
    _report(10, f"bookkeeping held in {cases} integration cases")


def test_criterion_11_partition_and_weight_invariants_hold_everywhere():
    assert PRODUCED_RESULTS, "criteria 3 and 5 must run first"
    for result, matrix in PRODUCED_RESULTS:
        n = matrix.n_periods
        assert result.weights.sum() == n
        assert np.all(result.weights >= 1)
        assert sum(len(c) for c in result.clusters) == n
        covered = np.sort(np.concatenate(result.clusters))
        assert np.array_equal(covered, np.arange(n))
        recomputed = cluster_objective(matrix, result.assignment, result.representatives)
        assert abs(recomputed - result.objective) <= 1e-9 * max(1.0, recomputed)
    _report(11, f"partition/weight invariants hold for {len(PRODUCED_RESULTS)} cluster results")
