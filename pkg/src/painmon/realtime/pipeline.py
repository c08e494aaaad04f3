"""The 125 ms streaming loop: snapshot -> resample -> zero-phase filter ->
running channel masking -> featurize -> standardize -> classify.

Every stage is timed; any stage failure downgrades the tick to a flagged
event carrying the last good probability instead of crashing the loop.
"""
from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..errors import ModelMissing, SourceClosed
from ..features.config import FeatureConfig, realtime_config
from ..features.manifest import FeatureManifest, build_manifest
from ..features.standardize import transform_matrix
from ..features.vector import extract_features
from ..models.base import TrainedModel, predict_proba
from ..preprocess.filters import (
    FilterSpec,
    bandpass_zero_phase,
    notch_zero_phase,
    resample_polyphase,
)
from ..preprocess.quality import channel_stats, robust_z
from .ring import RingBuffer

log = logging.getLogger(__name__)

TICK_SECONDS = 0.125
TARGET_RATE_HZ = 500.0


@dataclass
class PredictionEvent:
    tick_index: int
    wall_time: float
    mono_time: float
    window_end_sample: int
    probability: float
    label: int
    threshold: float
    latencies_us: dict
    masked: list[str]
    flags: list[str]

    def total_latency_ms(self) -> float:
        return self.latencies_us.get("total", 0.0) / 1e3


@dataclass
class LoopSummary:
    events: int = 0
    missed_deadlines: int = 0
    elapsed_seconds: float = 0.0
    mean_latency_ms: float = 0.0
    p99_latency_ms: float = 0.0
    flagged_events: int = 0


class RealtimePipeline:
    """Holds the model, manifest, buffer and masking state for one stream."""

    def __init__(self, model: TrainedModel, channel_names: list[str],
                 source_rate_hz: float, *,
                 feature_cfg: FeatureConfig | None = None,
                 manifest: FeatureManifest | None = None,
                 buffer_seconds: float = 1.0,
                 bandpass_hz: tuple[float, float] = (1.0, 90.0),
                 bandpass_taps: int = 101,
                 notch_hz: float = 50.0, notch_q: float = 30.0,
                 z_threshold: float = 3.0, mask_history: int = 10,
                 threshold: float = 0.80, debug: bool = False):
        if model is None:
            raise ModelMissing("pipeline needs a trained model")
        if model.standardization is None:
            raise ModelMissing("model carries no persisted standardization state")
        self.model = model
        self.cfg = feature_cfg or realtime_config()
        self.manifest = manifest or build_manifest(channel_names, self.cfg)
        if model.manifest_hash and model.manifest_hash != self.manifest.content_hash:
            raise ModelMissing(
                f"model was trained for manifest {model.manifest_hash}, "
                f"stream manifest is {self.manifest.content_hash}")
        self.channel_names = list(channel_names)
        self.source_rate = float(source_rate_hz)
        self.buffer_seconds = buffer_seconds
        self.buffer = RingBuffer(len(channel_names),
                                 int(round(buffer_seconds * source_rate_hz)))
        self.bandpass_hz = bandpass_hz
        self.bandpass_taps = bandpass_taps
        self.notch_hz = notch_hz
        self.notch_q = notch_q
        self._notch_spec = FilterSpec(notch_hz=notch_hz, notch_q=notch_q)
        self.z_threshold = z_threshold
        self._stat_history: deque = deque(maxlen=mask_history)
        self.threshold = threshold
        self.debug = debug
        self.debug_trace: list[dict] = []
        self._tick_index = 0
        self._last_good_probability = 0.5
        self._warmed = False

    def configure_source(self, rate_hz: float, channel_names: list[str]) -> None:
        """Adopt the stream's declared rate/layout (the hello frame is
        authoritative). Resets buffer and masking state."""
        self.source_rate = float(rate_hz)
        self.channel_names = list(channel_names)
        self.buffer = RingBuffer(len(channel_names),
                                 int(round(self.buffer_seconds * rate_hz)))
        self._stat_history.clear()

    def warm_up(self) -> None:
        """Run the numeric path once so JIT/plan caches are hot before the
        loop starts ticking."""
        if self._warmed:
            return
        rng = np.random.default_rng(0)
        fake = rng.standard_normal((len(self.channel_names),
                                    self.buffer.capacity))
        self.process_window(fake)
        self._stat_history.clear()
        self._warmed = True

    def push_chunk(self, chunk: np.ndarray) -> None:
        self.buffer.push(chunk)

    def _update_mask(self, window: np.ndarray) -> np.ndarray:
        var, corr = channel_stats(window)
        self._stat_history.append((var, corr))
        var_med = np.median([v for v, _ in self._stat_history], axis=0)
        corr_med = np.median([c for _, c in self._stat_history], axis=0)
        bad = (np.abs(robust_z(var_med)) > self.z_threshold) \
            | (np.abs(robust_z(corr_med)) > self.z_threshold)
        return ~bad

    def process_window(self, window: np.ndarray,
                       mask_override: np.ndarray | None = None) -> dict:
        """The deterministic per-window computation (no buffer, no clock);
        the replay-equivalence harness drives this directly."""
        stage_us: dict[str, float] = {}
        t0 = time.perf_counter()
        resampled = resample_polyphase(window, self.source_rate, TARGET_RATE_HZ)
        t1 = time.perf_counter()
        stage_us["resample"] = (t1 - t0) * 1e6

        filtered = bandpass_zero_phase(resampled, TARGET_RATE_HZ,
                                       self.bandpass_hz[0], self.bandpass_hz[1],
                                       self.bandpass_taps)
        filtered = notch_zero_phase(filtered, TARGET_RATE_HZ, self._notch_spec)
        if mask_override is None:
            good = self._update_mask(filtered)
        else:
            good = mask_override
        t2 = time.perf_counter()
        stage_us["filter"] = (t2 - t1) * 1e6

        vector = extract_features(filtered, self.channel_names, TARGET_RATE_HZ,
                                  self.cfg, self.manifest, channel_mask=good)
        t3 = time.perf_counter()
        stage_us["features"] = (t3 - t2) * 1e6

        z = transform_matrix(self.model.standardization, vector.values,
                             vector.imputed_mask)
        t4 = time.perf_counter()
        stage_us["standardize"] = (t4 - t3) * 1e6

        probability = float(predict_proba(self.model, z))
        t5 = time.perf_counter()
        stage_us["infer"] = (t5 - t4) * 1e6
        return {"stage_us": stage_us, "mask": good, "vector": vector,
                "standardized": z, "probability": probability,
                "resampled": resampled, "filtered": filtered}

    def tick(self) -> PredictionEvent:
        mono0 = time.perf_counter()
        flags: list[str] = []
        masked_names: list[str] = []
        stage_us: dict[str, float] = {}
        probability = self._last_good_probability

        try:
            window, partial = self.buffer.snapshot()
            if partial:
                flags.append("partial_window")
            if not np.isfinite(window).all():
                flags.append("nonfinite_input")
                window = np.nan_to_num(window, nan=0.0, posinf=0.0, neginf=0.0)
            result = self.process_window(window)
            stage_us = result["stage_us"]
            probability = result["probability"]
            self._last_good_probability = probability
            good = result["mask"]
            masked_names = [n for n, g in zip(self.channel_names, good) if not g]
            vector = result["vector"]
            if vector.pad_or_truncate:
                flags.append("pad_or_truncate")
            if vector.imputed_mask.any():
                flags.append("imputed_slots")
            if vector.flag_mask.any():
                flags.append("flagged_slots")
            if self.debug:
                self.debug_trace.append({
                    "tick": self._tick_index, "window": window.copy(),
                    "mask": good.copy(), "vector": vector,
                    "partial": partial,
                })
        except Exception as exc:                  # noqa: BLE001 - loop must survive
            log.warning("tick degraded: %s", exc)
            flags.append(f"degraded:{type(exc).__name__}")

        total_us = (time.perf_counter() - mono0) * 1e6
        stage_us["total"] = total_us
        event = PredictionEvent(
            tick_index=self._tick_index,
            wall_time=time.time(),
            mono_time=mono0,
            window_end_sample=self.buffer.total_written,
            probability=probability,
            label=int(probability >= self.threshold),
            threshold=self.threshold,
            latencies_us={k: round(v, 1) for k, v in stage_us.items()},
            masked=masked_names,
            flags=flags,
        )
        self._tick_index += 1
        return event


def run_loop(source, pipeline: RealtimePipeline, tick_ms: float = 125.0,
             duration_s: float | None = None, on_event=None,
             on_tick_boundary=None) -> LoopSummary:
    """Drive the pipeline at a fixed cadence from a monotonic clock.

    One event per tick; a tick whose own latency exceeds the period
    increments the missed-deadline counter. Stops after ``duration_s`` or
    when the source signals end of data.
    """
    tick_s = tick_ms / 1e3
    summary = LoopSummary()
    latencies: list[float] = []
    pipeline.warm_up()
    source.start(pipeline.push_chunk, on_hello=pipeline.configure_source)
    start = time.perf_counter()
    next_deadline = start + tick_s
    try:
        while True:
            if duration_s is not None and time.perf_counter() - start >= duration_s:
                break
            if getattr(source, "finished", False):
                break
            now = time.perf_counter()
            if now < next_deadline:
                time.sleep(next_deadline - now)
            if on_tick_boundary is not None:
                on_tick_boundary(pipeline)
            event = pipeline.tick()
            summary.events += 1
            lat_ms = event.total_latency_ms()
            latencies.append(lat_ms)
            if lat_ms > tick_ms:
                summary.missed_deadlines += 1
            if any(f.startswith("degraded") for f in event.flags):
                summary.flagged_events += 1
            if on_event is not None:
                on_event(event)
            next_deadline += tick_s
    except SourceClosed:
        pass
    finally:
        source.stop()
    summary.elapsed_seconds = time.perf_counter() - start
    if latencies:
        summary.mean_latency_ms = float(np.mean(latencies))
        summary.p99_latency_ms = float(np.percentile(latencies, 99))
    return summary
