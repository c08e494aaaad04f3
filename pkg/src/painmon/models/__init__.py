from .base import (
    ALGORITHMS,
    DEFAULT_HYPERPARAMS,
    TrainedModel,
    predict,
    predict_proba,
    predict_proba_vector,
    resolve_hyperparams,
    train,
)
from .serialize import deserialize, load_model, save_model, serialize
from .svm import dual_objective, fit_platt, rbf_kernel, scale_gamma, solve_smo

__all__ = [
    "ALGORITHMS", "DEFAULT_HYPERPARAMS", "TrainedModel",
    "train", "predict", "predict_proba", "predict_proba_vector",
    "resolve_hyperparams",
    "serialize", "deserialize", "save_model", "load_model",
    "solve_smo", "rbf_kernel", "scale_gamma", "dual_objective", "fit_platt",
]
