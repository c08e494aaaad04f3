"""Offline cleaning pipeline over a raw recording.

Stages, in order: zero-phase high-pass on the continuous signal, mains
notch, resampling to the target rate, bad-channel masking, stimulus-locked
epoching, artifact-epoch rejection. Bad channels are masked rather than
interpolated; downstream featurization imputes them, which keeps the
offline path equivalent to the streaming one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..ingest.bundle import RawRecording, RecordingHeader
from ..ingest.epochs import EpochConfig, EpochSet, extract_epochs
from .filters import FilterSpec, highpass_zero_phase, notch_zero_phase, resample_polyphase
from .quality import DEFAULT_PTP_UV, detect_bad_channels, estimate_snr_db, reject_artifact_epochs


@dataclass
class PreprocessConfig:
    filter_spec: FilterSpec = field(default_factory=FilterSpec)
    target_rate_hz: float = 500.0
    z_threshold: float = 3.0
    ptp_threshold_uv: float = DEFAULT_PTP_UV
    epoch: EpochConfig = field(default_factory=EpochConfig)


@dataclass
class PreprocessResult:
    epoch_set: EpochSet
    bad_channels: list[str]
    rejection_rate: float
    snr_db: float | None


def preprocess_recording(rec: RawRecording, cfg: PreprocessConfig | None = None
                         ) -> PreprocessResult:
    cfg = cfg or PreprocessConfig()
    fs = rec.header.sampling_rate_hz

    cleaned = highpass_zero_phase(rec.samples, fs, cfg.filter_spec)
    cleaned = notch_zero_phase(cleaned, fs, cfg.filter_spec)
    if fs != cfg.target_rate_hz:
        cleaned = resample_polyphase(cleaned, fs, cfg.target_rate_hz)
        fs = cfg.target_rate_hz

    quality = detect_bad_channels(cleaned, cfg.z_threshold)
    good = ~quality.bad_mask

    header = RecordingHeader(
        channel_names=list(rec.header.channel_names),
        channel_count=rec.header.channel_count,
        sampling_rate_hz=fs,
        resolution_per_channel=list(rec.header.resolution_per_channel),
        binary_format=rec.header.binary_format,
        orientation=rec.header.orientation,
        reference_label=rec.header.reference_label,
        data_filename=rec.header.data_filename,
        marker_filename=rec.header.marker_filename,
    )
    # Marker positions migrate to the new rate along with the samples.
    scale = fs / rec.header.sampling_rate_hz
    markers = rec.markers
    if scale != 1.0:
        from ..ingest.bundle import MarkerEvent
        markers = [MarkerEvent(e.index, e.kind, e.description,
                               int(round(e.position_samples * scale)),
                               max(1, int(round(e.duration_samples * scale))),
                               e.channel_ref)
                   for e in rec.markers]
        markers = [e for e in markers if e.position_samples < cleaned.shape[1]]
    resampled = RawRecording(header=header, samples=cleaned, markers=markers,
                             subject_id=rec.subject_id)

    epoch_set = extract_epochs(resampled, cfg.epoch)
    for e in epoch_set.epochs:
        e.channel_mask = good.copy()

    epoch_set, rate = reject_artifact_epochs(epoch_set, cfg.ptp_threshold_uv)
    try:
        snr = estimate_snr_db(epoch_set)
    except Exception:
        snr = None

    bad_names = [n for n, b in zip(rec.header.channel_names, quality.bad_mask) if b]
    return PreprocessResult(epoch_set=epoch_set, bad_channels=bad_names,
                            rejection_rate=rate, snr_db=snr)
