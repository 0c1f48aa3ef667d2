"""Late Stopping: iterative removal of late-learned examples from noisy-label data."""

from ._core import (
    ConfigError,
    Dataset,
    Error,
    EvaluationError,
    FklTracker,
    InputError,
    InternalError,
    IterationResult,
    LateStopConfig,
    NumericError,
    OuterStop,
    Parameters,
    Ranking,
    RunError,
    RunResult,
    SyntheticSpec,
    confusion_matrix,
    default_ranges,
    derive_iteration_seed,
    falsely_retained,
    fix_labels,
    generate_synthetic,
    inject_noise,
    inner_halt,
    label_precision,
    load_csv,
    measure_noise_rate,
    noise_curve,
    outer_stop,
    overlapping_subgroup_means,
    rank_by_fkl,
    rank_shift,
    retention,
    run,
    save_csv,
    split_holdout,
    test_accuracy,
)

__version__ = "0.1.0"
