"""k-nearest-neighbour classifier (Euclidean, stored training set)."""
from __future__ import annotations

import numpy as np


def fit_knn(X: np.ndarray, y01: np.ndarray, hp: dict, seed: int) -> dict:
    return {"train_X": X.copy(),
            "train_y": np.asarray(y01, dtype=np.float64),
            "k": np.array([hp["k"]], dtype=np.int64),
            "sq_norms": (X * X).sum(axis=1)}


def proba_knn(params: dict, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    train = params["train_X"]
    k = int(params["k"][0])
    # Distance ties break toward the lower training index (stable ordering
    # on the (distance, index) pair).
    d2 = params["sq_norms"][None, :] - 2.0 * (X @ train.T)
    out = np.empty(X.shape[0])
    n = train.shape[0]
    idx_key = np.arange(n)
    for i in range(X.shape[0]):
        nearest = np.lexsort((idx_key, d2[i]))[:k]
        out[i] = params["train_y"][nearest].mean()
    return out
