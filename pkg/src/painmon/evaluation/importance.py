"""Single-slot permutation importance on held-out data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..features.manifest import FeatureManifest
from ..models.base import TrainedModel, predict_proba


@dataclass
class ImportanceEntry:
    slot: int
    feature_name: str
    mean_importance: float
    sd: float


@dataclass
class ImportanceReport:
    entries: list[ImportanceEntry]       # sorted descending by mean importance
    n_repeats: int
    baseline_accuracy: float
    metric: str = "accuracy"

    def top(self, k: int) -> list[ImportanceEntry]:
        return self.entries[:k]


def permutation_importance(model: TrainedModel, X: np.ndarray, y: np.ndarray,
                           n_repeats: int = 10, seed: int = 0,
                           manifest: FeatureManifest | None = None
                           ) -> ImportanceReport:
    """importance(slot) = baseline accuracy minus mean accuracy after
    shuffling that slot across rows, over ``n_repeats`` shuffles.

    Constant slots shuffle to themselves and score exactly zero.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y).astype(int)
    baseline = float(((predict_proba(model, X) >= 0.5).astype(int) == y).mean())

    n, d = X.shape
    means = np.empty(d)
    sds = np.empty(d)
    work = X.copy()
    for slot in range(d):
        col = X[:, slot].copy()
        drops = np.empty(n_repeats)
        for rep in range(n_repeats):
            rng = np.random.default_rng([seed, slot, rep])
            perm = rng.permutation(n)
            work[:, slot] = col[perm]
            acc = float(((predict_proba(model, work) >= 0.5).astype(int) == y).mean())
            drops[rep] = baseline - acc
        work[:, slot] = col
        means[slot] = drops.mean()
        sds[slot] = drops.std()

    def name(slot: int) -> str:
        if manifest is None:
            return f"slot_{slot}"
        e = manifest.entries[slot]
        return f"{e.feature}[{e.channel}|{e.detail}]"

    order = np.argsort(-means, kind="stable")
    entries = [ImportanceEntry(int(s), name(int(s)), float(means[s]), float(sds[s]))
               for s in order]
    return ImportanceReport(entries=entries, n_repeats=n_repeats,
                            baseline_accuracy=baseline)
