"""Score-guided autoencoder anomaly detection."""

from sgad._sgad import (
    Model,
    auc_pr,
    auc_roc,
    generate_synthetic,
    ks_statistic,
    run_evaluate,
    run_rate,
    run_simulate,
    run_sweep,
    score_difference,
)

__all__ = [
    "Model",
    "auc_pr",
    "auc_roc",
    "generate_synthetic",
    "ks_statistic",
    "run_evaluate",
    "run_rate",
    "run_simulate",
    "run_sweep",
    "score_difference",
]
