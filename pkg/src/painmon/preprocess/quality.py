"""Bad-channel detection, artifact-epoch rejection and an SNR estimate."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import AllEpochsRejected, InsufficientEpochs, TooFewChannels
from ..ingest.epochs import EpochSet

SNR_CAP_DB = 120.0        # reported when the residual is numerically zero
DEFAULT_PTP_UV = 150.0


@dataclass
class ChannelQuality:
    variance: np.ndarray
    mean_abs_correlation: np.ndarray
    bad_mask: np.ndarray
    z_threshold: float = 3.0


def robust_z(values: np.ndarray) -> np.ndarray:
    """(x - median) / (1.4826 * MAD), zero when the MAD vanishes.

    Median/MAD rather than mean/SD: the statistic must not be dragged by
    the very outliers it is meant to detect.
    """
    values = np.asarray(values, dtype=np.float64)
    med = np.median(values)
    mad = np.median(np.abs(values - med))
    scale = 1.4826 * mad
    if scale <= 0:
        return np.zeros_like(values)
    return (values - med) / scale


def channel_stats(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel variance and mean absolute correlation to all others.

    Zero-variance channels get correlation 0 (they carry no signal to
    correlate).
    """
    samples = np.asarray(samples, dtype=np.float64)
    n_ch = samples.shape[0]
    var = samples.var(axis=1)
    centered = samples - samples.mean(axis=1, keepdims=True)
    sd = np.sqrt(var)
    safe = np.where(sd > 0, sd, 1.0)
    normed = centered / safe[:, None]
    corr = normed @ normed.T / samples.shape[1]
    corr[sd == 0, :] = 0.0
    corr[:, sd == 0] = 0.0
    np.fill_diagonal(corr, 0.0)
    mean_abs = np.abs(corr).sum(axis=1) / max(n_ch - 1, 1)
    return var, mean_abs


def detect_bad_channels(samples: np.ndarray, z_threshold: float = 3.0) -> ChannelQuality:
    """Flag channels whose variance or inter-channel correlation sits more
    than ``z_threshold`` robust standard deviations from the median."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape[0] < 4:
        raise TooFewChannels(f"need >= 4 channels, got {samples.shape[0]}")
    var, mean_abs = channel_stats(samples)
    bad = (np.abs(robust_z(var)) > z_threshold) | (np.abs(robust_z(mean_abs)) > z_threshold)
    return ChannelQuality(variance=var, mean_abs_correlation=mean_abs,
                          bad_mask=bad, z_threshold=z_threshold)


def reject_artifact_epochs(epoch_set: EpochSet,
                           ptp_threshold_uv: float = DEFAULT_PTP_UV
                           ) -> tuple[EpochSet, float]:
    """Drop epochs whose peak-to-peak over unmasked channels exceeds the
    threshold; returns (clean set, rejection rate)."""
    if ptp_threshold_uv <= 0:
        raise ValueError("ptp threshold must be positive")
    keep: list[int] = []
    for i, e in enumerate(epoch_set.epochs):
        usable = e.samples[e.channel_mask] if e.channel_mask.any() else e.samples
        ptp = float((usable.max(axis=1) - usable.min(axis=1)).max()) if usable.size else 0.0
        if ptp <= ptp_threshold_uv:
            keep.append(i)
    total = len(epoch_set.epochs)
    if total and not keep:
        raise AllEpochsRejected(
            f"all {total} epochs exceed {ptp_threshold_uv} uV peak-to-peak; "
            "threshold is likely misconfigured")
    rate = 1.0 - len(keep) / total if total else 0.0
    return epoch_set.subset(keep), rate


def estimate_snr_db(epoch_set: EpochSet) -> float:
    """Evoked-power over residual-power SNR in dB.

    For each label group with >= 2 epochs: the trial average is the evoked
    waveform; SNR per channel is 10*log10(P_evoked / P_residual) where the
    residual is each trial minus the average. The result is the mean over
    unmasked channels and label groups, capped at +-120 dB.
    """
    groups: dict[int, list] = {}
    for e in epoch_set.epochs:
        groups.setdefault(int(e.label), []).append(e)

    ratios: list[float] = []
    for label_epochs in groups.values():
        if len(label_epochs) < 2:
            continue
        stack = np.stack([e.samples for e in label_epochs])      # (n, ch, t)
        mask = np.logical_and.reduce([e.channel_mask for e in label_epochs])
        if not mask.any():
            continue
        evoked = stack.mean(axis=0)
        residual = stack - evoked[None]
        p_evoked = np.mean(evoked[mask] ** 2, axis=1)
        p_resid = np.mean(residual[:, mask, :] ** 2, axis=(0, 2))
        with np.errstate(divide="ignore"):
            db = 10.0 * np.log10(np.where(p_resid > 0, p_evoked / np.maximum(p_resid, 1e-300),
                                          np.inf))
        db = np.clip(db, -SNR_CAP_DB, SNR_CAP_DB)
        ratios.extend(db.tolist())

    if not ratios:
        raise InsufficientEpochs("need >= 2 epochs of one label for an SNR estimate")
    return float(np.mean(ratios))
