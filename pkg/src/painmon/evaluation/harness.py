"""Leave-one-participant-out evaluation harness.

Features are extracted once (extraction is fold-independent); imputation
means and z-scales are fitted inside each training fold only, so no
held-out statistics leak into training. Per-(fold, algorithm) failures are
recorded and the run continues with partial coverage.
"""
from __future__ import annotations

import hashlib
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..features.config import FeatureConfig
from ..features.manifest import build_manifest
from ..features.matrix import FeatureMatrix, featurize_epoch_set
from ..features.standardize import fit_standardization, transform_matrix
from ..ingest.epochs import EpochSet
from ..models.base import ALGORITHMS, TrainedModel, predict_proba, train
from .folds import FoldPlan, plan_lopo
from .metrics import Metrics, bootstrap_ci, compute_metrics
from .importance import ImportanceReport

log = logging.getLogger(__name__)


@dataclass
class EvalConfig:
    feature_cfg: FeatureConfig = field(default_factory=FeatureConfig)
    algorithms: tuple[str, ...] = ALGORITHMS
    hyperparams: dict[str, dict] = field(default_factory=dict)
    seed: int = 0
    bootstrap_resamples: int = 1000
    bootstrap_level: float = 0.95
    measure_latency: bool = True
    latency_rows_per_fold: int = 8


@dataclass
class AlgorithmResult:
    algorithm: str
    metrics: Metrics
    per_fold_accuracy: dict[str, float]
    pooled_true: np.ndarray
    pooled_pred: np.ndarray
    pooled_proba: np.ndarray
    pooled_subjects: list[str]
    best_subject: tuple[str, float]
    worst_subject: tuple[str, float]
    failed_folds: dict[str, str]
    coverage: float


@dataclass
class EvalReport:
    results: dict[str, AlgorithmResult]
    manifest_hash: str
    seed: int
    n_folds: int
    fold_standardization_digest: dict[str, str]
    importance: ImportanceReport | None = None

    def ranked(self) -> list[AlgorithmResult]:
        return sorted(self.results.values(),
                      key=lambda r: -r.metrics.accuracy)


def _derive_seed(*parts: int) -> int:
    return int(np.random.default_rng(list(parts)).integers(2 ** 62))


def run_eval_matrix(matrix: FeatureMatrix, plan: FoldPlan, cfg: EvalConfig
                    ) -> EvalReport:
    subjects = np.asarray(matrix.subjects)
    y_all = matrix.labels
    results: dict[str, dict] = {
        a: {"true": [], "pred": [], "proba": [], "subj": [],
            "fold_acc": {}, "failed": {}, "latency": []}
        for a in cfg.algorithms}
    std_digest: dict[str, str] = {}

    for fold_idx, fold in enumerate(plan.folds):
        test_mask = subjects == fold.held_out
        train_mask = ~test_mask
        assert not np.any(test_mask & train_mask)
        train_subject_ids = set(subjects[train_mask])
        assert fold.held_out not in train_subject_ids, \
            "held-out subject leaked into training"

        state = fit_standardization(matrix.values[train_mask],
                                    matrix.imputed[train_mask])
        std_digest[fold.held_out] = hashlib.sha1(
            state.means.tobytes() + state.sds.tobytes()).hexdigest()[:12]
        X_train = transform_matrix(state, matrix.values[train_mask],
                                   matrix.imputed[train_mask])
        X_test = transform_matrix(state, matrix.values[test_mask],
                                  matrix.imputed[test_mask])
        y_train = y_all[train_mask]
        y_test = y_all[test_mask]
        test_subjects = subjects[test_mask]

        for algo_idx, algo in enumerate(cfg.algorithms):
            bucket = results[algo]
            seed = _derive_seed(cfg.seed, fold_idx, algo_idx)
            try:
                model = train(algo, X_train, y_train,
                              hp=cfg.hyperparams.get(algo), seed=seed,
                              manifest_hash=matrix.manifest_hash,
                              fold=fold.held_out)
            except Exception as exc:           # noqa: BLE001 - fold isolation
                log.warning("fold %s algorithm %s failed: %s",
                            fold.held_out, algo, exc)
                bucket["failed"][fold.held_out] = str(exc)
                continue
            proba = predict_proba(model, X_test)
            pred = (proba >= 0.5).astype(int)
            bucket["true"].extend(y_test.tolist())
            bucket["pred"].extend(pred.tolist())
            bucket["proba"].extend(np.asarray(proba).tolist())
            bucket["subj"].extend(test_subjects.tolist())
            bucket["fold_acc"][fold.held_out] = float((pred == y_test).mean())
            if cfg.measure_latency:
                take = min(cfg.latency_rows_per_fold, X_test.shape[0])
                for row in X_test[:take]:
                    t0 = time.perf_counter()
                    predict_proba(model, row)
                    bucket["latency"].append(time.perf_counter() - t0)

    final: dict[str, AlgorithmResult] = {}
    for algo in cfg.algorithms:
        bucket = results[algo]
        y_true = np.asarray(bucket["true"], dtype=int)
        y_pred = np.asarray(bucket["pred"], dtype=int)
        if y_true.size == 0:
            continue
        metrics = compute_metrics(y_true, y_pred)
        correct = (y_true == y_pred).astype(float)
        try:
            lo, hi = bootstrap_ci(correct, cfg.bootstrap_resamples,
                                  cfg.bootstrap_level, cfg.seed)
            metrics.bootstrap_ci = (cfg.bootstrap_level, lo, hi)
        except Exception:
            metrics.bootstrap_ci = None
        metrics.per_subject_accuracy = dict(bucket["fold_acc"])
        if bucket["latency"]:
            metrics.mean_latency_ms = float(np.mean(bucket["latency"]) * 1e3)
        by_subject = sorted(bucket["fold_acc"].items(), key=lambda kv: kv[1])
        final[algo] = AlgorithmResult(
            algorithm=algo,
            metrics=metrics,
            per_fold_accuracy=dict(bucket["fold_acc"]),
            pooled_true=y_true,
            pooled_pred=y_pred,
            pooled_proba=np.asarray(bucket["proba"]),
            pooled_subjects=list(bucket["subj"]),
            best_subject=by_subject[-1] if by_subject else ("", 0.0),
            worst_subject=by_subject[0] if by_subject else ("", 0.0),
            failed_folds=dict(bucket["failed"]),
            coverage=1.0 - len(bucket["failed"]) / len(plan.folds),
        )

    return EvalReport(results=final, manifest_hash=matrix.manifest_hash,
                      seed=cfg.seed, n_folds=len(plan.folds),
                      fold_standardization_digest=std_digest)


def run_eval(epoch_set: EpochSet, cfg: EvalConfig | None = None) -> EvalReport:
    cfg = cfg or EvalConfig()
    manifest = build_manifest(epoch_set.channel_names, cfg.feature_cfg)
    matrix = featurize_epoch_set(epoch_set, cfg.feature_cfg, manifest)
    plan = plan_lopo(epoch_set)
    return run_eval_matrix(matrix, plan, cfg)
