"""Two boosted-tree variants over the shared tree grower.

``grad_boost``: classic first-order gradient boosting on binomial deviance.
Each round fits a variance-reduction regression tree to the residuals
y - p and assigns leaf values by a per-leaf Newton step
sum(residual) / sum(p(1-p)), scaled by the learning rate.

``reg_grad_boost``: second-order boosting. Trees are grown directly on the
per-sample gradient g = p - y and hessian h = p(1-p) with split gain
GL^2/(HL+lam) + GR^2/(HR+lam) - G^2/(H+lam) and leaf weight -G/(H+lam);
exact greedy splits, no histogram binning.
"""
from __future__ import annotations

import numpy as np
from scipy.special import expit

from .tree import Tree, grow_tree, pack_ensemble, packed_ensemble_predict, presort


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return expit(z)


def _log_odds(y: np.ndarray) -> float:
    p = np.clip(y.mean(), 1e-12, 1 - 1e-12)
    return float(np.log(p / (1 - p)))


def fit_grad_boost(X: np.ndarray, y01: np.ndarray, hp: dict, seed: int) -> dict:
    y = np.asarray(y01, dtype=np.float64)
    order = presort(X)
    f0 = _log_odds(y)
    f = np.full(y.size, f0)
    ones = np.ones(y.size)
    lr = hp["learning_rate"]
    trees: list[Tree] = []
    for _ in range(hp["n_trees"]):
        p = _sigmoid(f)
        residual = y - p
        hess = np.maximum(p * (1 - p), 1e-12)
        tree = grow_tree(X, order, residual, ones,
                         leaf_num=residual, leaf_den=hess,
                         lam=0.0, leaf_reg=1e-12, max_depth=hp["max_depth"],
                         min_child_weight=1.0)
        f += lr * tree.predict(X)
        trees.append(tree)
    packed = pack_ensemble(trees)
    packed["f0"] = np.array([f0])
    packed["learning_rate"] = np.array([lr])
    return packed


def fit_reg_grad_boost(X: np.ndarray, y01: np.ndarray, hp: dict, seed: int) -> dict:
    y = np.asarray(y01, dtype=np.float64)
    order = presort(X)
    f0 = _log_odds(y)
    f = np.full(y.size, f0)
    lam = hp["reg_lambda"]
    lr = hp["learning_rate"]
    trees: list[Tree] = []
    for _ in range(hp["n_trees"]):
        p = _sigmoid(f)
        g = p - y
        h = np.maximum(p * (1 - p), 1e-12)
        tree = grow_tree(X, order, g, h,
                         leaf_num=-g, leaf_den=h,
                         lam=lam, leaf_reg=lam, max_depth=hp["max_depth"],
                         min_child_weight=hp["min_child_weight"])
        f += lr * tree.predict(X)
        trees.append(tree)
    packed = pack_ensemble(trees)
    packed["f0"] = np.array([f0])
    packed["learning_rate"] = np.array([lr])
    return packed


def proba_boosted(params: dict, X: np.ndarray) -> np.ndarray:
    f = float(params["f0"][0]) + float(params["learning_rate"][0]) \
        * packed_ensemble_predict(params, X)
    return _sigmoid(f)
