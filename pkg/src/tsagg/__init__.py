"""Typical-period time series aggregation with an embedded design-model workbench.

The package turns multi-attribute energy time series into weighted typical
periods (averaging, k-means, exact k-medoids, hierarchical clustering, plus
extreme-period integration and mean-preserving rescaling), scores the result
against the original series, and validates aggregations by building and
solving cost-minimal energy system design models on both the full and the
aggregated inputs.
"""

from .cluster import (
    ClusterResult,
    aggregate_averaging,
    aggregate_hierarchical,
    aggregate_kmeans,
    aggregate_kmedoids_exact,
    cluster_objective,
    medoid_of,
    pairwise_distances,
)
from .esm import (
    BuiltModel,
    Connection,
    Device,
    Profile,
    SystemModel,
    annualized_costs,
    build_full_model,
    build_typical_model,
    crf,
)
from .estimator import TimeSeriesAggregator
from .extremes import ExtremeSpec, detect_extremes, integrate_extremes
from .indicators import rmse_duration, rmse_profile
from .preprocess import (
    CandidateMatrix,
    NormalizationInfo,
    RawSeriesSet,
    Spectrum,
    normalize,
    reshape_to_periods,
    spectrum,
)
from .rescale import (
    TypicalPeriodSet,
    backscale,
    build_typical_period_set,
    reconstruct_full,
    rescale_to_mean,
)
from .solver import (
    MilpProblem,
    MilpSolution,
    NoIncumbentError,
    export_lp,
    solve_lp,
    solve_milp,
)
from .synthetic import PROFILE_KINDS, generate

__version__ = "0.1.0"

__all__ = [
    "RawSeriesSet", "NormalizationInfo", "CandidateMatrix", "Spectrum",
    "normalize", "reshape_to_periods", "spectrum",
    "ClusterResult", "pairwise_distances", "cluster_objective", "medoid_of",
    "aggregate_averaging", "aggregate_kmeans", "aggregate_kmedoids_exact",
    "aggregate_hierarchical",
    "ExtremeSpec", "detect_extremes", "integrate_extremes",
    "TypicalPeriodSet", "rescale_to_mean", "backscale",
    "build_typical_period_set", "reconstruct_full",
    "rmse_profile", "rmse_duration",
    "Device", "Connection", "Profile", "SystemModel", "BuiltModel",
    "crf", "annualized_costs", "build_full_model", "build_typical_model",
    "MilpProblem", "MilpSolution", "NoIncumbentError",
    "solve_lp", "solve_milp", "export_lp",
    "PROFILE_KINDS", "generate",
    "TimeSeriesAggregator",
    "__version__",
]
