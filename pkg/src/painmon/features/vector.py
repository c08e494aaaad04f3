"""Assembly of the canonical feature vector from one signal window.

The same routine serves 4-s offline epochs and 1-s streamed windows; only
the configuration differs. Slots whose source channel is missing or masked
are left as NaN with the imputed bit set; the standardization stage
replaces them with training means. Slots whose computation degraded (zero
variance, floored ratio denominators, clipped bands, degenerate fits) keep
their value but carry a quality flag.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ManifestMismatch, TooFewSegments
from ..ingest.epochs import Epoch, Label
from .config import FeatureConfig
from .entropy import sample_entropy
from .fractal import higuchi_fd
from .manifest import CANONICAL_SLOTS, FeatureManifest
from .spectral import (
    band_ratios,
    band_weight_matrix,
    clip_band,
    coherence,
    peak_frequency,
    spectral_entropy,
    subwindow_power_matrix,
    welch_psd,
)
from .timedomain import hjorth_matrix, time_stats_matrix
from .wavelet import dwt_energies

PER_CHANNEL_SLOTS = 37


@dataclass
class FeatureVector:
    values: np.ndarray            # (537,)
    imputed_mask: np.ndarray      # bool, True = pending/filled by imputation
    flag_mask: np.ndarray         # bool, True = degraded-quality slot
    manifest_hash: str
    subject_id: str = ""
    label: Label | None = None
    pad_or_truncate: bool = False


def _channel_block(x: np.ndarray, cfg: FeatureConfig, psd: np.ndarray,
                   powers: np.ndarray, power_flags: np.ndarray,
                   sub: np.ndarray, stats: np.ndarray, stat_flag: bool,
                   hj: np.ndarray, hj_flag: bool) -> tuple[np.ndarray, np.ndarray]:
    """The 37 per-channel slots, given the channel's precomputed spectra
    and time-domain statistics."""
    values = np.empty(PER_CHANNEL_SLOTS)
    flags = np.zeros(PER_CHANNEL_SLOTS, dtype=bool)
    k = 0

    values[k:k + powers.size] = powers
    flags[k:k + powers.size] = power_flags
    k += powers.size

    values[k:k + sub.size] = sub
    k += sub.size

    ratios, floored = band_ratios(powers)
    values[k:k + 5] = ratios
    flags[k:k + 5] = floored
    k += 5

    values[k:k + 6] = stats
    flags[k:k + 6] = stat_flag
    k += 6

    values[k:k + 3] = hj
    flags[k:k + 3] = hj_flag
    k += 3

    se, se_flag = spectral_entropy(psd)
    values[k] = se
    flags[k] = se_flag
    k += 1

    samp, samp_flag = sample_entropy(x, cfg.sampen_m, cfg.sampen_r_factor)
    values[k] = samp
    flags[k] = samp_flag
    k += 1

    fd, fd_flag = higuchi_fd(x, cfg.higuchi_kmax)
    values[k] = fd
    flags[k] = fd_flag
    return values, flags


def extract_features(samples: np.ndarray, channel_names: list[str], fs: float,
                     cfg: FeatureConfig, manifest: FeatureManifest,
                     channel_mask: np.ndarray | None = None,
                     subject_id: str = "", label: Label | None = None
                     ) -> FeatureVector:
    """Fill every manifest slot from a (channels, samples) window.

    Channels are matched to the manifest by name; manifest channels that
    are absent or masked produce imputed-pending slots. When the
    configuration requests average referencing, per-channel features are
    computed against the mean of the usable manifest channels; global
    slots always use that mean channel as captured, before re-referencing.
    The native layout is then canonicalized to exactly 537 slots by
    zero-padding or truncation.
    """
    if manifest.config_hash != cfg.fingerprint():
        raise ManifestMismatch(
            f"manifest was built under config {manifest.config_hash}, "
            f"got {cfg.fingerprint()}")
    samples = np.asarray(samples, dtype=np.float64)
    if channel_mask is None:
        channel_mask = np.ones(samples.shape[0], dtype=bool)

    row_of = {name: i for i, name in enumerate(channel_names)}
    usable_rows: list[int] = []
    chan_row: dict[str, int | None] = {}
    for ch in manifest.channels:
        row = row_of.get(ch)
        if row is not None and channel_mask[row]:
            chan_row[ch] = row
            usable_rows.append(row)
        else:
            chan_row[ch] = None

    n_native = manifest.n_native
    values = np.full(n_native, np.nan)
    imputed = np.zeros(n_native, dtype=bool)
    flags = np.zeros(n_native, dtype=bool)

    have_any = bool(usable_rows)
    if have_any:
        mean_chan = samples[usable_rows].mean(axis=0)
        data = samples - mean_chan[None, :] if cfg.average_reference else samples
        # One batched Welch pass covers every usable channel plus the mean
        # channel; band integration is a single weight-matrix product.
        stack = np.vstack([data[usable_rows], mean_chan[None, :]])
        freqs, psds = welch_psd(stack, fs, cfg.welch)
        gpsd = psds[-1]
        weights, power_flags = band_weight_matrix(freqs, cfg.bands, fs)
        full_powers = psds[:-1] @ weights
        used = data[usable_rows]
        sub_powers = subwindow_power_matrix(used, fs, cfg.subwindows_ms, cfg.bands)
        all_stats, stat_flags = time_stats_matrix(used, fs)
        all_hjorth, hjorth_flags = hjorth_matrix(used)
        pos_of = {row: i for i, row in enumerate(usable_rows)}
    else:
        mean_chan = None
        data = samples

    k = 0
    for ch in manifest.channels:
        row = chan_row[ch]
        if row is None:
            imputed[k:k + PER_CHANNEL_SLOTS] = True
        else:
            i = pos_of[row]
            vals, fl = _channel_block(data[row], cfg, psds[i],
                                      full_powers[i], power_flags, sub_powers[i],
                                      all_stats[i], bool(stat_flags[i]),
                                      all_hjorth[i], bool(hjorth_flags[i]))
            values[k:k + PER_CHANNEL_SLOTS] = vals
            flags[k:k + PER_CHANNEL_SLOTS] = fl
        k += PER_CHANNEL_SLOTS

    for a, b in cfg.coherence_pairs:
        ra, rb = chan_row.get(a), chan_row.get(b)
        if ra is None or rb is None:
            imputed[k] = True
        else:
            try:
                values[k] = coherence(data[ra], data[rb], fs,
                                      cfg.coherence_band_hz, cfg.welch)
            except TooFewSegments:
                imputed[k] = True
                flags[k] = True
        k += 1

    if have_any:
        gfreqs = freqs
        for band in cfg.bands:
            lo, hi, clipped = clip_band(band, fs)
            if np.count_nonzero((gfreqs >= lo) & (gfreqs < hi)) >= 3:
                pk, bw, flat = peak_frequency(gfreqs, gpsd, type(band)(band.name, lo, hi))
            else:
                # Resolution too coarse for this band (short windows);
                # same degenerate convention as a flat spectrum.
                pk, bw, flat = (lo + hi) / 2.0, hi - lo, True
            values[k], flags[k] = pk, flat or clipped
            values[k + 1], flags[k + 1] = bw, flat or clipped
            k += 2
        wl = dwt_energies(mean_chan, cfg.wavelet_levels)
        values[k:k + wl.size] = wl
        k += wl.size
    else:
        n_global = 2 * len(cfg.bands) + cfg.wavelet_levels + 1
        imputed[k:k + n_global] = True
        k += n_global

    # Canonicalize: pad with constant zeros or truncate to 537 slots.
    pad_fired = n_native != CANONICAL_SLOTS
    if n_native > CANONICAL_SLOTS:
        values = values[:CANONICAL_SLOTS]
        imputed = imputed[:CANONICAL_SLOTS]
        flags = flags[:CANONICAL_SLOTS]
    elif n_native < CANONICAL_SLOTS:
        pad = CANONICAL_SLOTS - n_native
        values = np.concatenate([values, np.zeros(pad)])
        imputed = np.concatenate([imputed, np.zeros(pad, dtype=bool)])
        flags = np.concatenate([flags, np.zeros(pad, dtype=bool)])

    return FeatureVector(values=values, imputed_mask=imputed, flag_mask=flags,
                         manifest_hash=manifest.content_hash,
                         subject_id=subject_id, label=label,
                         pad_or_truncate=pad_fired)


def extract_epoch_features(epoch: Epoch, channel_names: list[str],
                           cfg: FeatureConfig, manifest: FeatureManifest
                           ) -> FeatureVector:
    return extract_features(epoch.samples, channel_names, epoch.fs_hz, cfg,
                            manifest, epoch.channel_mask,
                            subject_id=epoch.subject_id, label=epoch.label)
