"""Wearable-cohort analytics engine: python bindings over the C++ core."""

from ._wearlab import (  # noqa: F401
    DomainError,
    SchemaError,
    auc,
    bh_fdr,
    chi_square_test,
    descriptive_stats,
    estimated_hba1c,
    extract_cohort,
    feature_id,
    generate_cohort,
    glucose_band_fractions,
    glucose_cv,
    pearson,
    rank_sum_test,
    registry,
    rmssd,
    roc_curve,
    run_pipeline,
)

__all__ = [
    "DomainError",
    "SchemaError",
    "auc",
    "bh_fdr",
    "chi_square_test",
    "descriptive_stats",
    "estimated_hba1c",
    "extract_cohort",
    "feature_id",
    "generate_cohort",
    "glucose_band_fractions",
    "glucose_cv",
    "pearson",
    "rank_sum_test",
    "registry",
    "rmssd",
    "roc_curve",
    "run_pipeline",
]
