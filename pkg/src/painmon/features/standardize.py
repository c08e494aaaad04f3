"""Mean imputation and z-scoring, fitted on training data only.

Fitting mirrors the impute-then-scale convention: slot means are computed
over observed (non-imputed) values, the training matrix is imputed with
those means, and the scale is the population SD of the imputed matrix.
Slots with SD below the floor are constant; they standardize to 0 for any
input.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NotFitted
from .manifest import CANONICAL_SLOTS
from .vector import FeatureVector

SD_FLOOR = 1e-8


@dataclass
class StandardizationState:
    means: np.ndarray
    sds: np.ndarray               # floored; constant slots marked separately
    constant: np.ndarray          # bool per slot
    eps: float = SD_FLOOR

    @property
    def n_slots(self) -> int:
        return self.means.size

    def to_arrays(self) -> dict:
        return {"means": self.means, "sds": self.sds,
                "constant": self.constant.astype(np.uint8),
                "eps": np.array([self.eps])}

    @classmethod
    def from_arrays(cls, arrays: dict) -> "StandardizationState":
        return cls(means=np.asarray(arrays["means"], dtype=np.float64),
                   sds=np.asarray(arrays["sds"], dtype=np.float64),
                   constant=np.asarray(arrays["constant"]).astype(bool),
                   eps=float(np.asarray(arrays["eps"]).ravel()[0]))


def fit_standardization(values: np.ndarray, imputed: np.ndarray | None = None,
                        eps: float = SD_FLOOR) -> StandardizationState:
    """Fit imputation means and z-scale from a training matrix.

    ``values`` is (n, slots) with NaN at imputed-pending positions (or an
    explicit ``imputed`` mask). Slots never observed get mean 0.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError("expected a (n, slots) matrix")
    work = values.copy()
    if imputed is not None:
        work[np.asarray(imputed, dtype=bool)] = np.nan

    with np.errstate(invalid="ignore"):
        means = np.nanmean(work, axis=0)
    means = np.where(np.isnan(means), 0.0, means)

    filled = np.where(np.isnan(work), means[None, :], work)
    sds = filled.std(axis=0)
    constant = sds < eps
    sds = np.where(constant, eps, sds)
    return StandardizationState(means=means, sds=sds, constant=constant, eps=eps)


def transform_matrix(state: StandardizationState, values: np.ndarray,
                     imputed: np.ndarray | None = None) -> np.ndarray:
    """Impute with training means, then z-score. Constant slots map to 0."""
    if state is None:
        raise NotFitted("standardization state missing")
    values = np.asarray(values, dtype=np.float64)
    single = values.ndim == 1
    work = np.atleast_2d(values).copy()
    if imputed is not None:
        work[np.atleast_2d(np.asarray(imputed, dtype=bool))] = np.nan
    work = np.where(np.isnan(work), state.means[None, :], work)
    out = (work - state.means[None, :]) / state.sds[None, :]
    out[:, state.constant] = 0.0
    return out[0] if single else out


def fit_from_vectors(vectors: list[FeatureVector], eps: float = SD_FLOOR
                     ) -> StandardizationState:
    values = np.stack([v.values for v in vectors])
    imputed = np.stack([v.imputed_mask for v in vectors])
    state = fit_standardization(values, imputed, eps)
    if state.n_slots != CANONICAL_SLOTS:
        raise ValueError("vectors do not carry the canonical slot count")
    return state


def apply_standardization(state: StandardizationState, vector: FeatureVector
                          ) -> np.ndarray:
    """Standardized values for one vector; the input is left untouched."""
    return transform_matrix(state, vector.values, vector.imputed_mask)
