"""Uniform train/predict contract over the eight classifiers."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import ManifestMismatch, NonFiniteFeature, NotFitted, SingleClassData
from ..features.standardize import StandardizationState, transform_matrix
from ..features.vector import FeatureVector
from .bayes import fit_gaussian_nb, proba_gaussian_nb
from .boosting import fit_grad_boost, fit_reg_grad_boost, proba_boosted
from .forest import fit_random_forest, proba_random_forest
from .knn import fit_knn, proba_knn
from .linear import (
    fit_linear_discriminant,
    fit_logistic_regression,
    proba_linear_discriminant,
    proba_logistic_regression,
)
from .svm import fit_svm_rbf, proba_svm_rbf

ALGORITHMS = ("svm_rbf", "knn", "random_forest", "reg_grad_boost",
              "logistic_regression", "linear_discriminant", "grad_boost",
              "gaussian_nb")

DEFAULT_HYPERPARAMS: dict[str, dict] = {
    "svm_rbf": {"C": 1.0, "gamma": "scale", "tol": 1e-3, "max_passes": 200},
    "knn": {"k": 5},
    "random_forest": {"n_trees": 100, "max_depth": 8, "max_features": "sqrt",
                      "bootstrap": True},
    "grad_boost": {"n_trees": 200, "max_depth": 3, "learning_rate": 0.1},
    "reg_grad_boost": {"n_trees": 100, "max_depth": 4, "learning_rate": 0.1,
                       "reg_lambda": 1.0, "min_child_weight": 1e-3},
    "logistic_regression": {"l2": 1e-2, "grad_tol": 1e-6, "max_iter": 100},
    "linear_discriminant": {"shrinkage": 1e-3},
    "gaussian_nb": {"var_smoothing": 1e-9},
}

_FITTERS = {
    "svm_rbf": fit_svm_rbf,
    "knn": fit_knn,
    "random_forest": fit_random_forest,
    "reg_grad_boost": fit_reg_grad_boost,
    "logistic_regression": fit_logistic_regression,
    "linear_discriminant": fit_linear_discriminant,
    "grad_boost": fit_grad_boost,
    "gaussian_nb": fit_gaussian_nb,
}

_PREDICTORS = {
    "svm_rbf": proba_svm_rbf,
    "knn": proba_knn,
    "random_forest": proba_random_forest,
    "reg_grad_boost": proba_boosted,
    "logistic_regression": proba_logistic_regression,
    "linear_discriminant": proba_linear_discriminant,
    "grad_boost": proba_boosted,
    "gaussian_nb": proba_gaussian_nb,
}


@dataclass
class TrainedModel:
    algorithm: str
    params: dict
    hyperparams: dict
    manifest_hash: str = ""
    standardization: StandardizationState | None = None
    train_meta: dict = field(default_factory=dict)


def resolve_hyperparams(algorithm: str, overrides: dict | None = None) -> dict:
    hp = dict(DEFAULT_HYPERPARAMS[algorithm])
    if overrides:
        unknown = set(overrides) - set(hp)
        if unknown:
            raise ValueError(f"unknown hyperparameters for {algorithm}: {sorted(unknown)}")
        hp.update(overrides)
    return hp


def train(algorithm: str, X: np.ndarray, y: np.ndarray,
          hp: dict | None = None, seed: int = 0, *,
          manifest_hash: str = "",
          standardization: StandardizationState | None = None,
          fold: str = "") -> TrainedModel:
    """Train one algorithm on a standardized matrix; deterministic given
    (data, hyperparameters, seed)."""
    if algorithm not in _FITTERS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.shape[0] < 10:
        raise ValueError("need >= 10 training rows")
    if not np.isfinite(X).all():
        raise NonFiniteFeature("training matrix contains non-finite values")
    classes = np.unique(y)
    if classes.size < 2:
        raise SingleClassData(f"training labels contain only class {classes}")

    merged = resolve_hyperparams(algorithm, hp)
    t0 = time.perf_counter()
    params = _FITTERS[algorithm](X, y.astype(int), merged, seed)
    elapsed = time.perf_counter() - t0
    return TrainedModel(algorithm=algorithm, params=params, hyperparams=merged,
                        manifest_hash=manifest_hash,
                        standardization=standardization,
                        train_meta={"seed": seed, "fold": fold,
                                    "train_seconds": elapsed})


def predict_proba(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """P(high class) for standardized rows; scalar in, scalar out."""
    if model.params is None:
        raise NotFitted("model has no parameters")
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    p = _PREDICTORS[model.algorithm](model.params, np.atleast_2d(X))
    p = np.clip(p, 0.0, 1.0)
    return float(p[0]) if single else p


def predict(model: TrainedModel, X: np.ndarray, threshold: float = 0.5):
    p = predict_proba(model, X)
    if np.isscalar(p):
        return int(p >= threshold)
    return (p >= threshold).astype(int)


def predict_proba_vector(model: TrainedModel, vector: FeatureVector) -> float:
    """Standardize one raw feature vector with the model's own state and
    score it; refuses vectors built under a different manifest."""
    if vector.manifest_hash and model.manifest_hash \
            and vector.manifest_hash != model.manifest_hash:
        raise ManifestMismatch(
            f"model expects manifest {model.manifest_hash}, "
            f"vector carries {vector.manifest_hash}")
    if model.standardization is None:
        raise NotFitted("model carries no standardization state")
    z = transform_matrix(model.standardization, vector.values, vector.imputed_mask)
    return float(predict_proba(model, z))
