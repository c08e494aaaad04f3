"""Random forest: bagged Gini trees with per-split feature subsampling."""
from __future__ import annotations

import numpy as np

from .tree import Tree, grow_tree, pack_ensemble, packed_ensemble_predict, presort


def fit_random_forest(X: np.ndarray, y01: np.ndarray, hp: dict, seed: int) -> dict:
    n, d = X.shape
    y = np.asarray(y01, dtype=np.float64)
    order = presort(X)
    n_feats = max(1, int(round(np.sqrt(d)))) if hp["max_features"] == "sqrt" \
        else int(hp["max_features"])
    rng = np.random.default_rng(seed)
    trees: list[Tree] = []
    for _ in range(hp["n_trees"]):
        tree_rng = np.random.default_rng(rng.integers(2 ** 63))
        if hp["bootstrap"]:
            counts = np.bincount(tree_rng.integers(0, n, size=n),
                                 minlength=n).astype(np.float64)
        else:
            counts = np.ones(n)
        g = counts * y
        trees.append(grow_tree(
            X, order, g, counts, leaf_num=g, leaf_den=counts,
            lam=0.0, leaf_reg=0.0, max_depth=hp["max_depth"],
            min_child_weight=1.0, n_features_per_split=n_feats,
            rng=tree_rng, root_mask=counts > 0))
    packed = pack_ensemble(trees)
    packed["n_trees"] = np.array([len(trees)], dtype=np.int64)
    return packed


def proba_random_forest(params: dict, X: np.ndarray) -> np.ndarray:
    # Leaf values are in-leaf class fractions; the forest averages them.
    n_trees = int(params["n_trees"][0])
    return np.clip(packed_ensemble_predict(params, X) / n_trees, 0.0, 1.0)
