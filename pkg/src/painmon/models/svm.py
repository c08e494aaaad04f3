"""RBF-kernel support vector machine trained by sequential minimal
optimization, with logistic calibration of the decision values.

The dual problem

    max  sum(a) - 1/2 * sum_ij a_i a_j y_i y_j K_ij
    s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0

is solved by pairwise coordinate steps: starting from a = 0 the equality
constraint is preserved exactly by every update. Working pairs follow the
classic heuristic: sweep violators over all points, then over non-bound
points, choosing the partner that maximizes |E1 - E2| with seeded-random
fallbacks.
"""
from __future__ import annotations

import numpy as np
from scipy.special import expit


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def scale_gamma(X: np.ndarray) -> float:
    """gamma = 1 / (d * var(X)), variance over all entries."""
    var = float(X.var())
    return 1.0 / (X.shape[1] * var) if var > 0 else 1.0 / X.shape[1]


def solve_smo(K: np.ndarray, y: np.ndarray, C: float, tol: float = 1e-3,
              max_passes: int = 200, seed: int = 0
              ) -> tuple[np.ndarray, float, bool]:
    """Solve the dual on a precomputed PSD kernel matrix.

    ``y`` is +-1. Returns (alpha, bias, converged); when the pass budget
    runs out the best iterate is returned with converged False. The bias
    convention is f(x) = sum_i a_i y_i K(x_i, x) + b.
    """
    n = K.shape[0]
    y = np.asarray(y, dtype=np.float64)
    alpha = np.zeros(n)
    b = 0.0
    # E[i] = f(x_i) - y_i, kept incrementally up to date.
    errors = -y.copy()
    rng = np.random.default_rng(seed)

    def take_step(i1: int, i2: int) -> bool:
        nonlocal b, errors
        if i1 == i2:
            return False
        a1, a2 = alpha[i1], alpha[i2]
        y1, y2 = y[i1], y[i2]
        e1, e2 = errors[i1], errors[i2]
        s = y1 * y2
        if s > 0:
            lo, hi = max(0.0, a1 + a2 - C), min(C, a1 + a2)
        else:
            lo, hi = max(0.0, a2 - a1), min(C, C + a2 - a1)
        if hi - lo < 1e-12:
            return False
        eta = K[i1, i1] + K[i2, i2] - 2.0 * K[i1, i2]
        if eta <= 1e-12:
            return False
        a2_new = a2 + y2 * (e1 - e2) / eta
        a2_new = min(max(a2_new, lo), hi)
        if abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12):
            return False
        a1_new = a1 + s * (a2 - a2_new)

        b1 = b - e1 - y1 * (a1_new - a1) * K[i1, i1] - y2 * (a2_new - a2) * K[i1, i2]
        b2 = b - e2 - y1 * (a1_new - a1) * K[i1, i2] - y2 * (a2_new - a2) * K[i2, i2]
        if 0 < a1_new < C:
            b_new = b1
        elif 0 < a2_new < C:
            b_new = b2
        else:
            b_new = (b1 + b2) / 2.0

        d1 = y1 * (a1_new - a1)
        d2 = y2 * (a2_new - a2)
        errors += d1 * K[i1] + d2 * K[i2] + (b_new - b)
        alpha[i1], alpha[i2] = a1_new, a2_new
        b = b_new
        return True

    def examine(i2: int) -> bool:
        y2, a2, e2 = y[i2], alpha[i2], errors[i2]
        r2 = e2 * y2
        if not ((r2 < -tol and a2 < C) or (r2 > tol and a2 > 0)):
            return False
        non_bound = np.nonzero((alpha > 0) & (alpha < C))[0]
        if non_bound.size > 1:
            i1 = int(non_bound[np.argmax(np.abs(errors[non_bound] - e2))])
            if take_step(i1, i2):
                return True
        if non_bound.size:
            start = rng.integers(non_bound.size)
            for k in range(non_bound.size):
                if take_step(int(non_bound[(start + k) % non_bound.size]), i2):
                    return True
        start = rng.integers(n)
        for k in range(n):
            if take_step(int((start + k) % n), i2):
                return True
        return False

    passes = 0
    examine_all = True
    num_changed = 1
    while (num_changed > 0 or examine_all) and passes < max_passes:
        num_changed = 0
        candidates = range(n) if examine_all else \
            np.nonzero((alpha > 0) & (alpha < C))[0]
        for i in candidates:
            if examine(int(i)):
                num_changed += 1
        if examine_all:
            examine_all = False
        elif num_changed == 0:
            examine_all = True
        passes += 1

    converged = passes < max_passes
    return alpha, float(b), converged


def dual_objective(K: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def fit_platt(decision: np.ndarray, y01: np.ndarray, max_iter: int = 100
              ) -> tuple[float, float]:
    """Fit P(y=1|f) = sigmoid(-(A f + B)) on training decision values.

    Newton iterations on the smoothed targets (n+ + 1)/(n+ + 2) and
    1/(n- + 2); numerically stable log-loss formulation.
    """
    f = np.asarray(decision, dtype=np.float64)
    y01 = np.asarray(y01)
    n_pos = int((y01 == 1).sum())
    n_neg = y01.size - n_pos
    t = np.where(y01 == 1, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))

    a, bb = 0.0, np.log((n_neg + 1.0) / (n_pos + 1.0))
    for _ in range(max_iter):
        z = a * f + bb
        p = expit(-z)
        # dL/dz = t - p for p = sigmoid(-z)
        d1 = t - p
        g_a = (f * d1).sum()
        g_b = d1.sum()
        if max(abs(g_a), abs(g_b)) < 1e-10:
            break
        w = np.maximum(p * (1 - p), 1e-12)
        h11 = (f * f * w).sum() + 1e-12
        h12 = (f * w).sum()
        h22 = w.sum() + 1e-12
        det = h11 * h22 - h12 * h12
        if det <= 0:
            break
        da = -(h22 * g_a - h12 * g_b) / det
        db = -(-h12 * g_a + h11 * g_b) / det
        a += da
        bb += db
        if max(abs(da), abs(db)) < 1e-12:
            break
    return float(a), float(bb)


def fit_svm_rbf(X: np.ndarray, y01: np.ndarray, hp: dict, seed: int) -> dict:
    y = np.where(np.asarray(y01) == 1, 1.0, -1.0)
    gamma = hp["gamma"]
    if gamma == "scale":
        gamma = scale_gamma(X)
    K = rbf_kernel(X, X, gamma)
    alpha, b, converged = solve_smo(K, y, hp["C"], hp["tol"],
                                    hp["max_passes"], seed)
    sv = alpha > 1e-10
    decision = (alpha * y) @ K + b
    A, B = fit_platt(decision, y01)
    return {
        "support_vectors": X[sv].copy(),
        "dual_coef": (alpha * y)[sv],
        "bias": np.array([b]),
        "gamma": np.array([gamma]),
        "platt": np.array([A, B]),
        "converged": np.array([1.0 if converged else 0.0]),
    }


def svm_decision(params: dict, X: np.ndarray) -> np.ndarray:
    K = rbf_kernel(np.atleast_2d(X), params["support_vectors"],
                   float(params["gamma"][0]))
    return K @ params["dual_coef"] + float(params["bias"][0])


def proba_svm_rbf(params: dict, X: np.ndarray) -> np.ndarray:
    f = svm_decision(params, X)
    A, B = params["platt"]
    return expit(-(A * f + B))
