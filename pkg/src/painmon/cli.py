"""Command-line entry point wiring all subcommands.

Exit codes: 0 success, 1 usage error, 2 data/format error. Structured
status goes to stderr; data goes to files or stdout. Every run prints a
reproducibility header (seed plus the manifest hash where one is in
play).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import errors
from .evaluation import (
    EvalConfig,
    SynthConfig,
    format_table,
    permutation_importance,
    plan_lopo,
    render_figures,
    render_importance_figure,
    run_eval_matrix,
    synth_generate,
    write_delimited,
    write_importance_delimited,
    write_json,
)
from .features import (
    DEFAULT_CHANNELS,
    FeatureConfig,
    WelchParams,
    build_manifest,
    featurize_epoch_set,
    fit_standardization,
    read_matrix,
    realtime_config,
    transform_matrix,
    write_matrix,
)
from .ingest import EpochConfig, extract_epochs, load_recording, read_epochs, write_epochs
from .models import ALGORITHMS, load_model, predict_proba, save_model, train
from .preprocess import FilterSpec, PreprocessConfig, preprocess_recording

log = logging.getLogger("painmon")

DATA_DIR_ENV = "PAINMON_DATA_DIR"
_PATH_ARGS = ("bundle", "epochs", "epochs_out", "matrix", "matrix_out",
              "manifest_out", "model", "model_out", "report_out", "config")


def _resolve_data_paths(args: argparse.Namespace) -> None:
    # Relative data paths resolve against PAINMON_DATA_DIR when it is set.
    base = os.environ.get(DATA_DIR_ENV)
    if not base:
        return
    for name in _PATH_ARGS:
        value = getattr(args, name, None)
        if isinstance(value, str) and not Path(value).is_absolute():
            setattr(args, name, str(Path(base) / value))


def _header(seed: int | None = None, manifest_hash: str | None = None) -> None:
    parts = []
    if seed is not None:
        parts.append(f"seed={seed}")
    if manifest_hash:
        parts.append(f"manifest={manifest_hash}")
    if parts:
        print("# " + " ".join(parts), file=sys.stderr)


def _load_feature_config(path: str | None, realtime: bool = False) -> FeatureConfig:
    if path is None:
        return realtime_config() if realtime else FeatureConfig()
    raw = json.loads(Path(path).read_text())
    welch = raw.pop("welch", None)
    kwargs = dict(raw)
    if welch:
        kwargs["welch"] = WelchParams(**welch)
    if "subwindows_ms" in kwargs:
        kwargs["subwindows_ms"] = tuple(tuple(w) for w in kwargs["subwindows_ms"])
    if "coherence_pairs" in kwargs:
        kwargs["coherence_pairs"] = tuple(tuple(p) for p in kwargs["coherence_pairs"])
    return FeatureConfig(**kwargs)


def cmd_ingest(args) -> int:
    rec = load_recording(args.bundle)
    print(f"subject={rec.subject_id} channels={rec.header.channel_count} "
          f"rate={rec.header.sampling_rate_hz:g}Hz samples={rec.n_samples} "
          f"markers={len(rec.markers)}")
    epoch_set = extract_epochs(rec, EpochConfig(epoch_seconds=args.epoch_seconds))
    counts = epoch_set.label_counts()
    print(f"epochs={len(epoch_set)} "
          f"low={counts[list(counts)[0]]} high={counts[list(counts)[1]]} "
          f"skipped={epoch_set.skipped_markers}")
    if args.epochs_out:
        write_epochs(args.epochs_out, epoch_set)
        print(f"wrote {args.epochs_out}", file=sys.stderr)
    return 0


def cmd_preprocess(args) -> int:
    rec = load_recording(args.bundle)
    cfg = PreprocessConfig(
        filter_spec=FilterSpec(highpass_cutoff_hz=args.highpass,
                               notch_hz=args.notch),
        target_rate_hz=args.target_rate,
        z_threshold=args.z_threshold,
        ptp_threshold_uv=args.ptp_threshold,
    )
    result = preprocess_recording(rec, cfg)
    print(f"epochs={len(result.epoch_set)} "
          f"bad_channels={','.join(result.bad_channels) or '-'} "
          f"rejected={result.rejection_rate:.1%} "
          f"snr_db={result.snr_db if result.snr_db is None else round(result.snr_db, 2)}")
    write_epochs(args.epochs_out, result.epoch_set)
    print(f"wrote {args.epochs_out}", file=sys.stderr)
    return 0


def cmd_featurize(args) -> int:
    epoch_set = read_epochs(args.epochs)
    cfg = _load_feature_config(args.config)
    manifest = build_manifest(epoch_set.channel_names, cfg)
    _header(manifest_hash=manifest.content_hash)
    matrix = featurize_epoch_set(epoch_set, cfg, manifest)
    write_matrix(args.matrix_out, matrix)
    print(f"wrote {args.matrix_out} rows={len(matrix)}", file=sys.stderr)
    if args.manifest_out:
        Path(args.manifest_out).write_text(manifest.to_text(), encoding="utf-8")
        print(f"wrote {args.manifest_out}", file=sys.stderr)
    return 0


def cmd_train(args) -> int:
    matrix = read_matrix(args.matrix)
    if np.any(matrix.labels < 0):
        raise errors.PainmonError("feature matrix has unlabeled rows")
    _header(seed=args.seed, manifest_hash=matrix.manifest_hash)
    hp = {}
    for item in args.hyper or []:
        key, _, value = item.partition("=")
        try:
            hp[key] = json.loads(value)
        except json.JSONDecodeError:
            hp[key] = value
    state = fit_standardization(matrix.values, matrix.imputed)
    X = transform_matrix(state, matrix.values, matrix.imputed)
    model = train(args.algorithm, X, matrix.labels, hp=hp or None,
                  seed=args.seed, manifest_hash=matrix.manifest_hash,
                  standardization=state)
    save_model(args.model_out, model)
    print(f"wrote {args.model_out} "
          f"({model.train_meta['train_seconds']:.2f}s)", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    epoch_set = read_epochs(args.epochs)
    algorithms = tuple(args.algorithms.split(",")) if args.algorithms else ALGORITHMS
    for a in algorithms:
        if a not in ALGORITHMS:
            raise errors.PainmonError(f"unknown algorithm {a!r}")
    feature_cfg = _load_feature_config(args.config)
    manifest = build_manifest(epoch_set.channel_names, feature_cfg)
    _header(seed=args.seed, manifest_hash=manifest.content_hash)
    matrix = featurize_epoch_set(epoch_set, feature_cfg, manifest)
    plan = plan_lopo(epoch_set)
    report = run_eval_matrix(matrix, plan, EvalConfig(
        feature_cfg=feature_cfg, algorithms=algorithms, seed=args.seed))
    print(format_table(report))
    out_dir = Path(args.report_out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_delimited(out_dir / "report.tsv", report)
    write_json(out_dir / "report.json", report)
    figures = render_figures(out_dir, report)
    print(f"wrote {out_dir}/report.tsv, report.json and "
          f"{len(figures)} figure(s)", file=sys.stderr)
    return 0


def cmd_importance(args) -> int:
    matrix = read_matrix(args.matrix)
    model = load_model(args.model)
    if model.manifest_hash and model.manifest_hash != matrix.manifest_hash:
        raise errors.ManifestMismatch(
            f"model manifest {model.manifest_hash} != matrix {matrix.manifest_hash}")
    _header(seed=args.seed, manifest_hash=matrix.manifest_hash)
    if model.standardization is None:
        raise errors.NotFitted("model carries no standardization state")
    X = transform_matrix(model.standardization, matrix.values, matrix.imputed)
    report = permutation_importance(model, X, matrix.labels,
                                    n_repeats=args.repeats, seed=args.seed)
    out_dir = Path(args.report_out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_importance_delimited(out_dir / "importance.tsv", report)
    render_importance_figure(out_dir, report)
    for rank, e in enumerate(report.top(15), start=1):
        print(f"{rank:3d} slot={e.slot:4d} {e.feature_name:50s} "
              f"{e.mean_importance:+.5f}")
    print(f"wrote {out_dir}/importance.tsv and importance.png", file=sys.stderr)
    return 0


def cmd_synth(args) -> int:
    cfg = SynthConfig(n_subjects=args.subjects,
                      epochs_per_class=args.epochs_per_class, seed=args.seed)
    _header(seed=args.seed)
    epoch_set = synth_generate(cfg)
    write_epochs(args.epochs_out, epoch_set)
    print(f"wrote {args.epochs_out} with {len(epoch_set)} epochs "
          f"({cfg.n_subjects} subjects)", file=sys.stderr)
    return 0


def _build_pipeline(args, channel_names: list[str], rate: float):
    from .realtime import RealtimePipeline
    model = load_model(args.model)
    cfg = _load_feature_config(getattr(args, "config", None), realtime=True)
    return RealtimePipeline(model, channel_names, rate, feature_cfg=cfg,
                            threshold=args.threshold)


def cmd_replay(args) -> int:
    from .realtime import FileReplaySource, serve
    rec = load_recording(args.bundle)
    source = FileReplaySource(rec, speed=args.speed)
    pipeline = _build_pipeline(args, source.channel_names, source.rate)
    _header(manifest_hash=pipeline.manifest.content_hash)
    if args.publish:
        host, port = _parse_addr(args.publish)
        from .realtime import PublishServer, ServeSession, AlertState
        publisher = PublishServer(host, port)
        print(f"publishing on {publisher.host}:{publisher.port}", file=sys.stderr)
        session = ServeSession(pipeline=pipeline, publisher=publisher,
                               alert=AlertState(threshold=args.threshold,
                                                sustain_seconds=args.sustain))
        summary = session.run(source)
        publisher.close()
    else:
        from .realtime import run_loop, event_message
        summary = run_loop(source, pipeline,
                           on_event=lambda e: print(json.dumps(event_message(e))))
    print(f"events={summary.events} missed={summary.missed_deadlines} "
          f"mean_ms={summary.mean_latency_ms:.2f}", file=sys.stderr)
    return 0


def cmd_stream(args) -> int:
    from .realtime import SocketSource, serve
    host, port = _parse_addr(args.listen)
    source = SocketSource(host, port)
    print(f"listening for producer on {source.host}:{source.port}", file=sys.stderr)
    # Channel layout arrives with the hello; the pipeline reconfigures then.
    pipeline = _build_pipeline(args, DEFAULT_CHANNELS, 128.0)
    _header(manifest_hash=pipeline.manifest.content_hash)
    publish_host, publish_port = _parse_addr(args.publish) if args.publish \
        else ("127.0.0.1", 0)
    _, summary = serve(pipeline, source, host=publish_host, port=publish_port,
                       threshold=args.threshold, sustain_s=args.sustain,
                       duration_s=args.duration)
    print(f"events={summary.events} missed={summary.missed_deadlines}",
          file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    from .realtime import SyntheticSource, serve
    source = SyntheticSource(seed=args.seed, signature_at_s=args.signature_at)
    pipeline = _build_pipeline(args, source.channel_names, source.rate)
    _header(seed=args.seed, manifest_hash=pipeline.manifest.content_hash)
    host, port = _parse_addr(args.publish)
    _, summary = serve(pipeline, source, host=host, port=port,
                       threshold=args.threshold, sustain_s=args.sustain,
                       duration_s=args.duration)
    print(f"events={summary.events} missed={summary.missed_deadlines} "
          f"mean_ms={summary.mean_latency_ms:.2f} "
          f"p99_ms={summary.p99_latency_ms:.2f}", file=sys.stderr)
    return 0


def cmd_synth_stream(args) -> int:
    from .realtime import stream_synthetic_over_socket
    host, port = _parse_addr(args.connect)
    _header(seed=args.seed)
    sent = stream_synthetic_over_socket(host, port, args.duration,
                                        rate_hz=args.rate, seed=args.seed,
                                        signature_at_s=args.signature_at)
    print(f"sent {sent} chunks", file=sys.stderr)
    return 0


def _parse_addr(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    return host or "127.0.0.1", int(port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="painmon",
        description="EEG pain-state classification: offline pipeline and "
                    "realtime monitor")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a recording bundle and cut epochs")
    p.add_argument("--bundle", required=True, help="path to the .vhdr header")
    p.add_argument("--epochs-out", help="epoch cache to write")
    p.add_argument("--epoch-seconds", type=float, default=4.0)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("preprocess", help="full cleaning pipeline to epoch cache")
    p.add_argument("--bundle", required=True)
    p.add_argument("--epochs-out", required=True)
    p.add_argument("--highpass", type=float, default=1.0)
    p.add_argument("--notch", type=float, default=50.0)
    p.add_argument("--target-rate", type=float, default=500.0)
    p.add_argument("--ptp-threshold", type=float, default=150.0)
    p.add_argument("--z-threshold", type=float, default=3.0)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("featurize", help="epoch cache -> feature matrix")
    p.add_argument("--epochs", required=True)
    p.add_argument("--matrix-out", required=True)
    p.add_argument("--manifest-out")
    p.add_argument("--config", help="feature config JSON")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train one algorithm on a feature matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p.add_argument("--model-out", required=True)
    p.add_argument("--hyper", action="append", metavar="KEY=VALUE")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="LOPO evaluation with report files")
    p.add_argument("--epochs", required=True)
    p.add_argument("--algorithms", help="comma-separated subset")
    p.add_argument("--report-out", default="report")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("importance", help="permutation importance of a model")
    p.add_argument("--matrix", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--report-out", default="report")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("synth", help="generate a synthetic labeled epoch cache")
    p.add_argument("--epochs-out", required=True)
    p.add_argument("--subjects", type=int, default=12)
    p.add_argument("--epochs-per-class", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("replay", help="stream a recording through the monitor")
    p.add_argument("--bundle", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--speed", type=float, default=1.0)
    p.add_argument("--publish", metavar="HOST:PORT")
    p.add_argument("--threshold", type=float, default=0.80)
    p.add_argument("--sustain", type=float, default=10.0)
    p.add_argument("--config")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("stream", help="ingest the wire protocol and publish")
    p.add_argument("--listen", required=True, metavar="HOST:PORT")
    p.add_argument("--model", required=True)
    p.add_argument("--publish", metavar="HOST:PORT")
    p.add_argument("--threshold", type=float, default=0.80)
    p.add_argument("--sustain", type=float, default=10.0)
    p.add_argument("--duration", type=float)
    p.add_argument("--config")
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("serve", help="synthetic source + monitor + publisher")
    p.add_argument("--model", required=True)
    p.add_argument("--publish", required=True, metavar="HOST:PORT")
    p.add_argument("--threshold", type=float, default=0.80)
    p.add_argument("--sustain", type=float, default=10.0)
    p.add_argument("--duration", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--signature-at", type=float)
    p.add_argument("--config")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth-stream", help="send synthetic wire frames to a listener")
    p.add_argument("--connect", required=True, metavar="HOST:PORT")
    p.add_argument("--duration", type=float, default=60.0)
    p.add_argument("--rate", type=float, default=128.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--signature-at", type=float)
    p.set_defaults(func=cmd_synth_stream)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    logging.basicConfig(stream=sys.stderr,
                        level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    _resolve_data_paths(args)
    try:
        return args.func(args)
    except errors.PainmonError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
