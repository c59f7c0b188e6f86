"""Ordinary Kriging and Cluster Kriging for large regression datasets."""

from ._core import (
    ClusterKrigingConfig,
    ClusterKrigingModel,
    ConditioningError,
    FitConfig,
    Flavor,
    InputError,
    IoError,
    KernelParams,
    KrigingModel,
    MetricError,
    NuggetMode,
    ParameterError,
    ck_fit,
    ck_predict,
    fit,
    load_model,
    log_marginal_likelihood,
    msll,
    r2_score,
    smse,
    synth,
    test_functions,
)

__all__ = [
    "ClusterKrigingConfig",
    "ClusterKrigingModel",
    "ConditioningError",
    "FitConfig",
    "Flavor",
    "InputError",
    "IoError",
    "KernelParams",
    "KrigingModel",
    "MetricError",
    "NuggetMode",
    "ParameterError",
    "ck_fit",
    "ck_predict",
    "fit",
    "load_model",
    "log_marginal_likelihood",
    "msll",
    "r2_score",
    "smse",
    "synth",
    "test_functions",
]
