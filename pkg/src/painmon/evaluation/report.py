"""Evaluation report rendering: text table, delimited file, JSON and
matplotlib figures."""
from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .harness import EvalReport  # noqa: E402
from .importance import ImportanceReport  # noqa: E402

GRADE_COLORS = {"EXCELLENT": "#2e7d32", "GOOD": "#558b2f",
                "ACCEPTABLE": "#f9a825", "LIMITED": "#c62828"}

TABLE_COLUMNS = ("Algorithm", "F1-Score", "Precision", "Recall", "Accuracy",
                 "Speed", "Clinical Grade")


def format_table(report: EvalReport) -> str:
    rows = [TABLE_COLUMNS]
    for r in report.ranked():
        m = r.metrics
        rows.append((r.algorithm, f"{m.f1 * 100:.2f}%", f"{m.precision * 100:.2f}%",
                     f"{m.recall * 100:.2f}%", f"{m.accuracy * 100:.2f}%",
                     f"{m.mean_latency_ms:.2f}ms", m.clinical_grade))
    widths = [max(len(row[i]) for row in rows) for i in range(len(TABLE_COLUMNS))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)))
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def write_delimited(path: str | Path, report: EvalReport, sep: str = "\t") -> None:
    header = ["algorithm", "f1", "precision", "recall", "accuracy",
              "sensitivity", "specificity", "mean_latency_ms",
              "ci_level", "ci_lo", "ci_hi", "clinical_grade", "coverage",
              "best_subject", "best_accuracy", "worst_subject", "worst_accuracy"]
    lines = [sep.join(header)]
    for r in report.ranked():
        m = r.metrics
        ci = m.bootstrap_ci or (float("nan"),) * 3
        lines.append(sep.join(str(v) for v in (
            r.algorithm, f"{m.f1:.6f}", f"{m.precision:.6f}", f"{m.recall:.6f}",
            f"{m.accuracy:.6f}", f"{m.sensitivity:.6f}", f"{m.specificity:.6f}",
            f"{m.mean_latency_ms:.4f}", ci[0], f"{ci[1]:.6f}", f"{ci[2]:.6f}",
            m.clinical_grade, f"{r.coverage:.3f}",
            r.best_subject[0], f"{r.best_subject[1]:.4f}",
            r.worst_subject[0], f"{r.worst_subject[1]:.4f}")))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path: str | Path, report: EvalReport) -> None:
    payload = {
        "manifest_hash": report.manifest_hash,
        "seed": report.seed,
        "n_folds": report.n_folds,
        "algorithms": {},
    }
    for name, r in report.results.items():
        m = r.metrics
        payload["algorithms"][name] = {
            "accuracy": m.accuracy, "precision": m.precision, "recall": m.recall,
            "f1": m.f1, "sensitivity": m.sensitivity, "specificity": m.specificity,
            "confusion": {"tp": m.confusion.tp, "fp": m.confusion.fp,
                          "tn": m.confusion.tn, "fn": m.confusion.fn},
            "bootstrap_ci": m.bootstrap_ci,
            "mean_latency_ms": m.mean_latency_ms,
            "clinical_grade": m.clinical_grade,
            "per_subject_accuracy": m.per_subject_accuracy,
            "coverage": r.coverage,
            "failed_folds": r.failed_folds,
        }
    Path(path).write_text(json.dumps(payload, indent=2), encoding="utf-8")


def render_figures(out_dir: str | Path, report: EvalReport) -> list[Path]:
    """Accuracy/latency charts plus the best algorithm's confusion matrix;
    returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    ranked = report.ranked()
    if not ranked:
        return written

    names = [r.algorithm for r in ranked]
    accs = np.array([r.metrics.accuracy * 100 for r in ranked])
    colors = [GRADE_COLORS.get(r.metrics.clinical_grade, "#607d8b") for r in ranked]
    errs = np.zeros((2, len(ranked)))
    for i, r in enumerate(ranked):
        if r.metrics.bootstrap_ci:
            _, lo, hi = r.metrics.bootstrap_ci
            errs[0, i] = max(0.0, accs[i] - lo * 100)
            errs[1, i] = max(0.0, hi * 100 - accs[i])

    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(names, accs, yerr=errs, color=colors, capsize=3)
    ax.set_ylabel("LOPO accuracy (%)")
    ax.set_ylim(0, 100)
    ax.axhline(50, color="gray", lw=0.8, ls="--")
    ax.tick_params(axis="x", rotation=30)
    for label in ax.get_xticklabels():
        label.set_horizontalalignment("right")
    fig.tight_layout()
    path = out_dir / "accuracy.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    best = ranked[0]
    c = best.metrics.confusion
    mat = np.array([[c.tn, c.fp], [c.fn, c.tp]])
    fig, ax = plt.subplots(figsize=(4.2, 3.8))
    im = ax.imshow(mat, cmap="Blues")
    for (i, j), v in np.ndenumerate(mat):
        ax.text(j, i, str(v), ha="center", va="center",
                color="black" if v < mat.max() * 0.6 else "white")
    ax.set_xticks([0, 1], ["pred low", "pred high"])
    ax.set_yticks([0, 1], ["true low", "true high"])
    ax.set_title(f"{best.algorithm} confusion")
    fig.colorbar(im, shrink=0.8)
    fig.tight_layout()
    path = out_dir / "confusion.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    lats = [r.metrics.mean_latency_ms for r in ranked]
    if any(v > 0 for v in lats):
        fig, ax = plt.subplots(figsize=(8, 3.5))
        ax.bar(names, lats, color="#455a64")
        ax.set_ylabel("inference latency (ms)")
        ax.tick_params(axis="x", rotation=30)
        for label in ax.get_xticklabels():
            label.set_horizontalalignment("right")
        fig.tight_layout()
        path = out_dir / "latency.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def render_importance_figure(out_dir: str | Path, imp: ImportanceReport,
                             top_k: int = 15) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    top = imp.top(top_k)
    names = [e.feature_name for e in top][::-1]
    vals = [e.mean_importance for e in top][::-1]
    sds = [e.sd for e in top][::-1]
    fig, ax = plt.subplots(figsize=(8, 0.4 * len(top) + 1.2))
    ax.barh(names, vals, xerr=sds, color="#1565c0", capsize=2)
    ax.set_xlabel("accuracy drop when shuffled")
    fig.tight_layout()
    path = out_dir / "importance.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_importance_delimited(path: str | Path, imp: ImportanceReport,
                               sep: str = "\t") -> None:
    lines = [sep.join(("rank", "slot", "feature", "mean_importance", "sd"))]
    for rank, e in enumerate(imp.entries, start=1):
        lines.append(sep.join((str(rank), str(e.slot), e.feature_name,
                               f"{e.mean_importance:.8f}", f"{e.sd:.8f}")))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
