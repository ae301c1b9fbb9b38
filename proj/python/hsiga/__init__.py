"""Band selection and model selection for hyperspectral pixel classification."""

from ._hsiga import (
    Error,
    InvalidArgument,
    Model,
    accuracy,
    cv_accuracy,
    default_removed_bands,
    derivative,
    load_dataset,
    main,
    median_normalize,
    preprocess,
    run_scenario,
    synthesize,
    train_knn,
    train_mlp,
    train_svm,
)

__all__ = [
    "Error",
    "InvalidArgument",
    "Model",
    "accuracy",
    "cv_accuracy",
    "default_removed_bands",
    "derivative",
    "load_dataset",
    "main",
    "median_normalize",
    "preprocess",
    "run_scenario",
    "synthesize",
    "train_knn",
    "train_mlp",
    "train_svm",
]
