"""Linear models: L2 logistic regression (Newton) and regularized LDA."""
from __future__ import annotations

import numpy as np
from scipy.special import expit


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return expit(z)


def fit_logistic_regression(X: np.ndarray, y01: np.ndarray, hp: dict, seed: int) -> dict:
    """Full-batch Newton on the L2-penalized log-likelihood (bias
    unpenalized), iterated to the configured gradient norm."""
    y = np.asarray(y01, dtype=np.float64)
    n, d = X.shape
    lam = hp["l2"]
    w = np.zeros(d)
    b = 0.0
    for _ in range(hp["max_iter"]):
        z = X @ w + b
        p = _sigmoid(z)
        grad_w = X.T @ (p - y) / n + lam * w
        grad_b = float((p - y).mean())
        gnorm = max(np.abs(grad_w).max(), abs(grad_b))
        if gnorm < hp["grad_tol"]:
            break
        r = np.maximum(p * (1 - p), 1e-12) / n
        Xw = X * r[:, None]
        H = np.empty((d + 1, d + 1))
        H[:d, :d] = X.T @ Xw + lam * np.eye(d)
        H[:d, d] = Xw.sum(axis=0)
        H[d, :d] = H[:d, d]
        H[d, d] = r.sum() + 1e-12
        step = np.linalg.solve(H, np.concatenate([grad_w, [grad_b]]))
        w -= step[:d]
        b -= step[d]
    return {"weights": w, "bias": np.array([b])}


def proba_logistic_regression(params: dict, X: np.ndarray) -> np.ndarray:
    return _sigmoid(np.atleast_2d(X) @ params["weights"] + float(params["bias"][0]))


def fit_linear_discriminant(X: np.ndarray, y01: np.ndarray, hp: dict, seed: int) -> dict:
    """Shared-covariance discriminant with ridge shrinkage on the pooled
    covariance: sigma + shrinkage * mean(diag(sigma)) * I."""
    y = np.asarray(y01)
    X0 = X[y == 0]
    X1 = X[y == 1]
    mu0 = X0.mean(axis=0)
    mu1 = X1.mean(axis=0)
    n = X.shape[0]
    c0 = X0 - mu0
    c1 = X1 - mu1
    cov = (c0.T @ c0 + c1.T @ c1) / max(n - 2, 1)
    ridge = hp["shrinkage"] * float(np.trace(cov)) / X.shape[1]
    cov_reg = cov + ridge * np.eye(X.shape[1])

    w = np.linalg.solve(cov_reg, mu1 - mu0)
    pi0 = X0.shape[0] / n
    pi1 = X1.shape[0] / n
    b = -0.5 * float((mu1 + mu0) @ w) + float(np.log(pi1 / pi0))
    return {"weights": w, "bias": np.array([b]),
            "mu0": mu0, "mu1": mu1}


def proba_linear_discriminant(params: dict, X: np.ndarray) -> np.ndarray:
    return _sigmoid(np.atleast_2d(X) @ params["weights"] + float(params["bias"][0]))
