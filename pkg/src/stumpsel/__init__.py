"""Decision-stump feature selection for sparse additive regression."""

__version__ = "0.1.0"

from .baselines import LassoFit, lambda_max, lasso_fit, lasso_rank, sis_rank
from .harness import (
    METHODS,
    ExperimentConfig,
    ExperimentRow,
    UnreachableTargetError,
    min_samples,
    rank_features,
    read_rows,
    recovery_fraction,
    run_experiment,
)
from .permutation import (
    ThresholdResult,
    estimate_threshold,
    permute_rows,
    recover_unknown_s,
)
from .stump import (
    Dataset,
    ImpurityScores,
    SplitStrategy,
    feature_impurity,
    feature_rng,
    score_all,
    select_top,
    sorted_order,
    split_impurity,
    split_impurity_via_identity,
)
from .synth import (
    DesignDistribution,
    LinkFunction,
    ModelSpec,
    gen_dataset,
    gen_model,
    signal_gap,
)

__all__ = [
    "Dataset",
    "DesignDistribution",
    "ExperimentConfig",
    "ExperimentRow",
    "ImpurityScores",
    "LassoFit",
    "LinkFunction",
    "METHODS",
    "ModelSpec",
    "SplitStrategy",
    "ThresholdResult",
    "UnreachableTargetError",
    "estimate_threshold",
    "feature_impurity",
    "feature_rng",
    "gen_dataset",
    "gen_model",
    "lambda_max",
    "lasso_fit",
    "lasso_rank",
    "min_samples",
    "permute_rows",
    "rank_features",
    "read_rows",
    "recover_unknown_s",
    "recovery_fraction",
    "run_experiment",
    "score_all",
    "select_top",
    "signal_gap",
    "sis_rank",
    "sorted_order",
    "split_impurity",
    "split_impurity_via_identity",
    "__version__",
]
