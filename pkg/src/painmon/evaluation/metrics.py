"""Classification metrics, bootstrap confidence intervals and the
clinical-grade map."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TooFewPredictions

# Grade thresholds on accuracy (percent). Reverse-engineered so the map
# partitions the published per-algorithm accuracies into their grades:
# >= 88 EXCELLENT, >= 87 GOOD, >= 82 ACCEPTABLE, else LIMITED.
GRADE_THRESHOLDS = (("EXCELLENT", 88.0), ("GOOD", 87.0), ("ACCEPTABLE", 82.0))


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    sensitivity: float
    specificity: float
    confusion: ConfusionCounts
    bootstrap_ci: tuple[float, float, float] | None = None   # (level, lo, hi)
    per_subject_accuracy: dict[str, float] = field(default_factory=dict)
    mean_latency_ms: float = 0.0
    clinical_grade: str = ""


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def confusion_counts(y_true: np.ndarray, y_pred: np.ndarray) -> ConfusionCounts:
    y_true = np.asarray(y_true).astype(int)
    y_pred = np.asarray(y_pred).astype(int)
    return ConfusionCounts(
        tp=int(np.sum((y_pred == 1) & (y_true == 1))),
        fp=int(np.sum((y_pred == 1) & (y_true == 0))),
        tn=int(np.sum((y_pred == 0) & (y_true == 0))),
        fn=int(np.sum((y_pred == 0) & (y_true == 1))),
    )


def compute_metrics(y_true: np.ndarray, y_pred: np.ndarray) -> Metrics:
    c = confusion_counts(y_true, y_pred)
    precision = _safe_div(c.tp, c.tp + c.fp)
    recall = _safe_div(c.tp, c.tp + c.fn)
    specificity = _safe_div(c.tn, c.tn + c.fp)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    accuracy = _safe_div(c.tp + c.tn, c.total)
    m = Metrics(accuracy=accuracy, precision=precision, recall=recall, f1=f1,
                sensitivity=recall, specificity=specificity, confusion=c)
    m.clinical_grade = clinical_grade(accuracy)
    return m


def bootstrap_ci(correct: np.ndarray, n_resamples: int = 1000,
                 level: float = 0.95, seed: int = 0) -> tuple[float, float]:
    """Percentile bootstrap interval for mean accuracy over epoch-level
    resampling; deterministic from the seed."""
    correct = np.asarray(correct, dtype=np.float64)
    n = correct.size
    if n < 10:
        raise TooFewPredictions(f"need >= 10 predictions, got {n}")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=(n_resamples, n))
    means = correct[idx].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(means, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


def clinical_grade(accuracy: float) -> str:
    """Map accuracy (fraction or percent) onto the four-grade scale."""
    pct = accuracy * 100.0 if accuracy <= 1.0 else accuracy
    for grade, threshold in GRADE_THRESHOLDS:
        if pct >= threshold:
            return grade
    return "LIMITED"
