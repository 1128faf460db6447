"""Audit metrics for synthetic smart-meter load curves."""

from ._core import (
    ConfigError,
    DomainError,
    Error,
    NumericalError,
    acf,
    classification_metrics,
    cli_main,
    correlation_score,
    degree_day,
    discriminative_score,
    forecast_repeat_week,
    frechet_distance,
    min_distances,
    mmd2_unbiased,
    mmd_three_sample_test,
    nndr,
    roc_curve,
    run_audit,
    stats8,
    wasserstein1,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "NumericalError",
    "acf",
    "classification_metrics",
    "cli_main",
    "correlation_score",
    "degree_day",
    "discriminative_score",
    "forecast_repeat_week",
    "frechet_distance",
    "min_distances",
    "mmd2_unbiased",
    "mmd_three_sample_test",
    "nndr",
    "roc_curve",
    "run_audit",
    "stats8",
    "wasserstein1",
]
