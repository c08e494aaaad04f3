"""Gaussian naive Bayes with variance smoothing."""
from __future__ import annotations

import numpy as np


def fit_gaussian_nb(X: np.ndarray, y01: np.ndarray, hp: dict, seed: int) -> dict:
    y = np.asarray(y01)
    out = {}
    eps = hp["var_smoothing"] * float(X.var(axis=0).max())
    for cls in (0, 1):
        Xc = X[y == cls]
        out[f"mean{cls}"] = Xc.mean(axis=0)
        out[f"var{cls}"] = Xc.var(axis=0) + max(eps, 1e-300)
        out[f"logprior{cls}"] = np.array([np.log(Xc.shape[0] / X.shape[0])])
    return out


def _log_likelihood(X: np.ndarray, mean: np.ndarray, var: np.ndarray,
                    logprior: float) -> np.ndarray:
    return (logprior
            - 0.5 * np.sum(np.log(2 * np.pi * var))
            - 0.5 * ((X - mean) ** 2 / var).sum(axis=1))


def proba_gaussian_nb(params: dict, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    l0 = _log_likelihood(X, params["mean0"], params["var0"],
                         float(params["logprior0"][0]))
    l1 = _log_likelihood(X, params["mean1"], params["var1"],
                         float(params["logprior1"][0]))
    m = np.maximum(l0, l1)
    e0 = np.exp(l0 - m)
    e1 = np.exp(l1 - m)
    return e1 / (e0 + e1)
