from .folds import Fold, FoldPlan, plan_lopo
from .harness import AlgorithmResult, EvalConfig, EvalReport, run_eval, run_eval_matrix
from .importance import ImportanceEntry, ImportanceReport, permutation_importance
from .metrics import (
    ConfusionCounts,
    Metrics,
    bootstrap_ci,
    clinical_grade,
    compute_metrics,
    confusion_counts,
)
from .report import (
    format_table,
    render_figures,
    render_importance_figure,
    write_delimited,
    write_importance_delimited,
    write_json,
)
from .synth import (
    strong_stream_config,
    synth_stream_epoch_set,
    train_stream_model,
    SynthConfig,
    SyntheticStream,
    make_stream_training_windows,
    pink_noise,
    synth_generate,
)

__all__ = [
    "Fold", "FoldPlan", "plan_lopo",
    "EvalConfig", "EvalReport", "AlgorithmResult", "run_eval", "run_eval_matrix",
    "ImportanceEntry", "ImportanceReport", "permutation_importance",
    "ConfusionCounts", "Metrics", "confusion_counts", "compute_metrics",
    "bootstrap_ci", "clinical_grade",
    "format_table", "write_delimited", "write_json", "render_figures",
    "render_importance_figure", "write_importance_delimited",
    "SynthConfig", "synth_generate", "SyntheticStream",
    "make_stream_training_windows", "pink_noise",
    "strong_stream_config", "synth_stream_epoch_set", "train_stream_model",
]
