"""Shared exact-greedy decision tree used by the forest and both boosters.

Split search maximizes GL^2/(HL+lam) + GR^2/(HR+lam) - G^2/(H+lam) over all
(feature, threshold) pairs. With g = w*y and h = w this is equivalent to
Gini/variance-reduction splitting for binary targets; with per-sample
gradients and hessians it is second-order boosting gain with L2 leaf
penalty lam. Ties break toward the lower feature index, then the lower
threshold (the scan visits candidates in that order).

Columns are presorted once per fit; the compiled kernel walks each column
in sorted order and skips rows outside the node.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@njit(cache=True)
def _best_split(xs, order, node, g, h, feat_idx, lam, min_child_weight):
    n = xs.shape[0]
    best_gain = 0.0
    best_feat = -1
    best_thresh = 0.0
    gt = 0.0
    ht = 0.0
    for i in range(n):
        if node[i]:
            gt += g[i]
            ht += h[i]
    parent = gt * gt / (ht + lam)
    for fi in range(feat_idx.shape[0]):
        f = feat_idx[fi]
        gl = 0.0
        hl = 0.0
        prev_val = 0.0
        have_prev = False
        for oi in range(n):
            row = order[oi, f]
            if not node[row]:
                continue
            v = xs[row, f]
            if (have_prev and v != prev_val and hl >= min_child_weight
                    and (ht - hl) >= min_child_weight):
                gr = gt - gl
                hr = ht - hl
                gain = gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    best_feat = f
                    best_thresh = 0.5 * (prev_val + v)
            gl += g[row]
            hl += h[row]
            prev_val = v
            have_prev = True
    return best_feat, best_thresh, best_gain


@dataclass
class Tree:
    feature: np.ndarray      # int32, -1 for leaves
    threshold: np.ndarray    # float64
    left: np.ndarray         # int32
    right: np.ndarray        # int32
    value: np.ndarray        # float64, meaningful at leaves

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        idx = np.zeros(X.shape[0], dtype=np.int32)
        while True:
            feat = self.feature[idx]
            active = np.nonzero(feat >= 0)[0]
            if active.size == 0:
                break
            cur = idx[active]
            go_left = X[active, feat[active]] <= self.threshold[cur]
            idx[active] = np.where(go_left, self.left[cur], self.right[cur])
        return self.value[idx]

    def to_arrays(self) -> dict:
        return {"feature": self.feature, "threshold": self.threshold,
                "left": self.left, "right": self.right, "value": self.value}

    @classmethod
    def from_arrays(cls, arrays: dict) -> "Tree":
        return cls(feature=np.asarray(arrays["feature"], dtype=np.int32),
                   threshold=np.asarray(arrays["threshold"], dtype=np.float64),
                   left=np.asarray(arrays["left"], dtype=np.int32),
                   right=np.asarray(arrays["right"], dtype=np.int32),
                   value=np.asarray(arrays["value"], dtype=np.float64))


def presort(X: np.ndarray) -> np.ndarray:
    return np.asfortranarray(np.argsort(X, axis=0, kind="stable").astype(np.int32))


def grow_tree(X: np.ndarray, order: np.ndarray, g: np.ndarray, h: np.ndarray,
              leaf_num: np.ndarray, leaf_den: np.ndarray, *,
              lam: float = 0.0, leaf_reg: float = 0.0, max_depth: int = 6,
              min_child_weight: float = 1.0, n_features_per_split: int | None = None,
              rng: np.random.Generator | None = None,
              root_mask: np.ndarray | None = None) -> Tree:
    """Grow one tree. Leaf value = sum(leaf_num) / (sum(leaf_den) + leaf_reg)
    over the leaf's rows."""
    n, d = X.shape
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    all_feats = np.arange(d, dtype=np.int32)
    stack: list[tuple[np.ndarray, int, int]] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    root = new_node()
    if root_mask is None:
        root_mask = np.ones(n, dtype=np.bool_)
    stack.append((np.ascontiguousarray(root_mask, dtype=np.bool_), 0, root))

    while stack:
        mask, depth, node_id = stack.pop()
        if depth < max_depth and h[mask].sum() >= 2 * min_child_weight:
            if n_features_per_split is not None and n_features_per_split < d:
                feats = np.sort(rng.choice(d, n_features_per_split,
                                           replace=False)).astype(np.int32)
            else:
                feats = all_feats
            f, t, gain = _best_split(X, order, mask, g, h, feats,
                                     lam, min_child_weight)
        else:
            f = -1
        if f < 0:
            den = leaf_den[mask].sum() + leaf_reg
            num = leaf_num[mask].sum()
            value[node_id] = num / den if abs(den) > 1e-12 else 0.0
            continue
        go_left = mask & (X[:, f] <= t)
        go_right = mask & ~go_left
        feature[node_id] = int(f)
        threshold[node_id] = float(t)
        lid = new_node()
        rid = new_node()
        left[node_id] = lid
        right[node_id] = rid
        stack.append((go_left, depth + 1, lid))
        stack.append((go_right, depth + 1, rid))

    return Tree(feature=np.asarray(feature, dtype=np.int32),
                threshold=np.asarray(threshold, dtype=np.float64),
                left=np.asarray(left, dtype=np.int32),
                right=np.asarray(right, dtype=np.int32),
                value=np.asarray(value, dtype=np.float64))


def ensemble_predict(trees: list[Tree], X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    acc = np.zeros(X.shape[0])
    for tree in trees:
        acc += tree.predict(X)
    return acc


@njit(cache=True)
def _packed_predict(feature, threshold, left, right, value, offsets, X):
    n = X.shape[0]
    out = np.zeros(n)
    for t in range(offsets.shape[0] - 1):
        base = offsets[t]
        for i in range(n):
            node = 0
            f = feature[base + node]
            while f >= 0:
                if X[i, f] <= threshold[base + node]:
                    node = left[base + node]
                else:
                    node = right[base + node]
                f = feature[base + node]
            out[i] += value[base + node]
    return out


def packed_ensemble_predict(params: dict, X: np.ndarray) -> np.ndarray:
    """Summed leaf values straight off the packed arrays (fast path for
    inference; no Tree objects materialized)."""
    X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
    sizes = np.asarray(params["tree_sizes"], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    return _packed_predict(
        np.ascontiguousarray(params["feature"], dtype=np.int32),
        np.ascontiguousarray(params["threshold"], dtype=np.float64),
        np.ascontiguousarray(params["left"], dtype=np.int32),
        np.ascontiguousarray(params["right"], dtype=np.int32),
        np.ascontiguousarray(params["value"], dtype=np.float64),
        offsets, X)


def pack_ensemble(trees: list[Tree]) -> dict:
    """Flatten an ensemble into concatenated arrays plus offsets."""
    sizes = np.array([t.feature.size for t in trees], dtype=np.int64)
    return {
        "tree_sizes": sizes,
        "feature": np.concatenate([t.feature for t in trees]),
        "threshold": np.concatenate([t.threshold for t in trees]),
        "left": np.concatenate([t.left for t in trees]),
        "right": np.concatenate([t.right for t in trees]),
        "value": np.concatenate([t.value for t in trees]),
    }


def unpack_ensemble(arrays: dict) -> list[Tree]:
    sizes = np.asarray(arrays["tree_sizes"], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    trees = []
    for i in range(sizes.size):
        a, b = offsets[i], offsets[i + 1]
        trees.append(Tree(
            feature=np.asarray(arrays["feature"][a:b], dtype=np.int32),
            threshold=np.asarray(arrays["threshold"][a:b], dtype=np.float64),
            left=np.asarray(arrays["left"][a:b], dtype=np.int32),
            right=np.asarray(arrays["right"][a:b], dtype=np.int32),
            value=np.asarray(arrays["value"][a:b], dtype=np.float64),
        ))
    return trees
