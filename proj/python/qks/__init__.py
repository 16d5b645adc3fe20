"""k-means approximation scheme with emulated noisy distance oracles."""

from ._qks import (  # noqa: F401
    Dataset,
    OracleConfig,
    OracleMode,
    QksError,
    Rng,
    WeightTree,
    aspect_ratio,
    brute_force_opt,
    centroid,
    count_disjoint_tuples,
    d2_distribution,
    enumerate_disjoint_tuples,
    estimate_cost,
    euclidean_distance,
    exact_cost,
    normalize_dataset,
    pseudo_approx_seed,
    run_experiment,
    sample_count_m,
    solve,
)

__version__ = "0.1.0"
