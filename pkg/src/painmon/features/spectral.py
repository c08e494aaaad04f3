"""Spectral descriptors: Welch PSD, band powers, ratios, entropy, peak
frequency and magnitude-squared coherence.

PSD estimation follows Welch's method: Hann-tapered overlapping segments,
averaged periodograms, one-sided density scaling, so that the integral of
the PSD over frequency matches the signal variance. Sub-second windows are
too short for segment averaging and use a single Hann-tapered, zero-padded
periodogram instead.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from ..errors import BandAboveNyquist, SignalTooShort, TooFewSegments
from .bands import CANONICAL_BANDS, FrequencyBand

RATIO_NAMES = ("gamma/alpha", "delta/theta", "theta/alpha", "beta/alpha",
               "(theta+alpha)/(beta+gamma)")
RATIO_FLOOR = 1e-12
SUBWINDOW_NFFT = 1024

_window_cache: dict[tuple[str, int], np.ndarray] = {}
_weight_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _taper(name: str, n: int) -> np.ndarray:
    key = (name, n)
    win = _window_cache.get(key)
    if win is None:
        win = sps.get_window(name, n)
        _window_cache[key] = win
    return win


@dataclass(frozen=True)
class WelchParams:
    segment_seconds: float = 1.0
    overlap: float = 0.5
    window: str = "hann"

    def nperseg(self, fs: float, n: int) -> int:
        return min(int(round(self.segment_seconds * fs)), n)


def welch_psd(x: np.ndarray, fs: float, params: WelchParams | None = None
              ) -> tuple[np.ndarray, np.ndarray]:
    """One-sided Welch power spectral density.

    Accepts a series or a channel-major matrix (time on the last axis).
    Returns (freqs, psd) with psd in input-units^2/Hz. Requires at least
    one full segment.
    """
    params = params or WelchParams()
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    want = int(round(params.segment_seconds * fs))
    if n < want:
        raise SignalTooShort(f"need >= {want} samples for one Welch segment, got {n}")
    nperseg = params.nperseg(fs, n)
    noverlap = int(nperseg * params.overlap)
    freqs, psd = sps.welch(x, fs=fs, window=_taper(params.window, nperseg),
                           noverlap=noverlap, detrend="constant")
    return freqs, psd


def clip_band(band: FrequencyBand, fs: float) -> tuple[float, float, bool]:
    """Clip a band to the Nyquist limit; returns (lo, hi, clipped_flag).

    Raises when the whole band sits above Nyquist.
    """
    nyq = fs / 2.0
    if band.lo_hz >= nyq:
        raise BandAboveNyquist(f"{band.name} band starts at {band.lo_hz} Hz, "
                               f"Nyquist is {nyq} Hz")
    if band.hi_hz > nyq:
        return band.lo_hz, nyq, True
    return band.lo_hz, band.hi_hz, False


def band_power(freqs: np.ndarray, psd: np.ndarray, band: FrequencyBand) -> float:
    """Trapezoidal integral of the PSD over [lo, hi)."""
    mask = (freqs >= band.lo_hz) & (freqs < band.hi_hz)
    if not mask.any():
        return 0.0
    if mask.sum() == 1:
        df = freqs[1] - freqs[0] if len(freqs) > 1 else 1.0
        return float(psd[mask][0] * df)
    return float(np.trapezoid(psd[mask], freqs[mask]))


def band_weight_matrix(freqs: np.ndarray, bands: tuple[FrequencyBand, ...],
                       fs: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-band trapezoid weights so that psd @ W integrates every band at
    once. Returns (weights (n_freqs, n_bands), clipped flags)."""
    key = (len(freqs), float(freqs[0]), float(freqs[-1]), fs,
           tuple((b.name, b.lo_hz, b.hi_hz) for b in bands))
    cached = _weight_cache.get(key)
    if cached is not None:
        return cached
    weights = np.zeros((len(freqs), len(bands)))
    clipped = np.zeros(len(bands), dtype=bool)
    for j, band in enumerate(bands):
        lo, hi, clip = clip_band(band, fs)
        clipped[j] = clip
        idx = np.nonzero((freqs >= lo) & (freqs < hi))[0]
        if idx.size == 0:
            continue
        if idx.size == 1:
            df = freqs[1] - freqs[0] if len(freqs) > 1 else 1.0
            weights[idx[0], j] = df
            continue
        d = np.diff(freqs[idx])
        weights[idx[0], j] += d[0] / 2
        weights[idx[-1], j] += d[-1] / 2
        weights[idx[1:-1], j] += (d[1:] + d[:-1]) / 2
    _weight_cache[key] = (weights, clipped)
    return weights, clipped


def subwindow_power_matrix(x: np.ndarray, fs: float,
                           subwindows_ms: tuple[tuple[float, float], ...],
                           bands: tuple[FrequencyBand, ...] = CANONICAL_BANDS
                           ) -> np.ndarray:
    """Sub-window band powers for a (channels, samples) matrix.

    Each clipped segment gets a Hann-tapered periodogram zero-padded to
    1024 points; output is (channels, n_bands * n_windows), band-major,
    window-minor.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    n_win = len(subwindows_ms)
    out = np.zeros((x.shape[0], len(bands) * n_win))
    for w, (lo_ms, hi_ms) in enumerate(subwindows_ms):
        a = int(round(lo_ms * 1e-3 * fs))
        b = int(round(hi_ms * 1e-3 * fs))
        seg = x[:, a:min(b, x.shape[-1])]
        if seg.shape[-1] < 8:
            continue
        nfft = max(SUBWINDOW_NFFT, seg.shape[-1])
        freqs, psd = sps.periodogram(seg, fs=fs, window=_taper("hann", seg.shape[-1]),
                                     nfft=nfft, detrend="constant", axis=-1)
        weights, _ = band_weight_matrix(freqs, bands, fs)
        powers = psd @ weights
        for j in range(len(bands)):
            out[:, j * n_win + w] = powers[:, j]
    return out


def subwindow_band_powers(x: np.ndarray, fs: float,
                          subwindows_ms: tuple[tuple[float, float], ...],
                          bands: tuple[FrequencyBand, ...] = CANONICAL_BANDS
                          ) -> np.ndarray:
    """Band powers inside early/middle/late sub-windows of the first second
    of one series; band-major, window-minor."""
    return subwindow_power_matrix(np.asarray(x)[None, :], fs, subwindows_ms, bands)[0]


def band_ratios(powers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagnostic ratio indices over the five canonical band powers.

    Input order is (delta, theta, alpha, beta, gamma). Denominators are
    floored at 1e-12; floored entries are flagged in the second return.
    """
    d, t, a, b, g = (float(v) for v in powers)
    pairs = ((g, a), (d, t), (t, a), (b, a), (t + a, b + g))
    ratios = np.empty(5)
    floored = np.zeros(5, dtype=bool)
    for i, (num, den) in enumerate(pairs):
        if den < RATIO_FLOOR:
            den = RATIO_FLOOR
            floored[i] = True
        ratios[i] = num / den
    return ratios, floored


def spectral_entropy(psd: np.ndarray) -> tuple[float, bool]:
    """Shannon entropy of the normalized PSD, scaled to [0, 1].

    All-zero spectra return (0.0, flagged).
    """
    psd = np.asarray(psd, dtype=np.float64)
    if psd.size < 2:
        raise ValueError("need >= 2 PSD bins")
    total = psd.sum()
    if total <= 0:
        return 0.0, True
    p = psd / total
    nz = p[p > 0]
    h = -float(np.sum(nz * np.log(nz)))
    return h / np.log(psd.size), False


def peak_frequency(freqs: np.ndarray, psd: np.ndarray, band: FrequencyBand
                   ) -> tuple[float, float, bool]:
    """Peak bin and -3 dB bandwidth within a band.

    The bandwidth is the frequency extent of the contiguous region around
    the peak where the PSD stays at or above half the peak, clipped to the
    band edges. A flat in-band spectrum falls back to the band midpoint
    and full width, flagged.
    """
    mask = (freqs >= band.lo_hz) & (freqs < band.hi_hz)
    if mask.sum() < 3:
        raise ValueError(f"band {band.name} covers < 3 bins")
    f = freqs[mask]
    p = psd[mask]
    if p.max() <= 0 or p.max() - p.min() <= 1e-15 * max(p.max(), 1.0):
        return (band.lo_hz + band.hi_hz) / 2.0, band.hi_hz - band.lo_hz, True
    k = int(np.argmax(p))
    half = p[k] / 2.0
    lo = k
    while lo > 0 and p[lo - 1] >= half:
        lo -= 1
    hi = k
    while hi < len(p) - 1 and p[hi + 1] >= half:
        hi += 1
    return float(f[k]), float(f[hi] - f[lo]), False


def _coherence_segmentation(n: int, fs: float, params: WelchParams) -> tuple[int, int]:
    """Segment length and step guaranteeing >= 4 averaged segments.

    Welch coherence over a single segment is identically 1; four segments
    is the floor for a usable estimate. When the configured overlap yields
    fewer, the step shrinks (overlap grows) until four fit.
    """
    nperseg = min(params.nperseg(fs, n), n // 2)
    if nperseg < 8:
        raise TooFewSegments(f"signal of {n} samples is too short for coherence")
    step = max(1, int(nperseg * (1.0 - params.overlap)))
    n_segs = 1 + (n - nperseg) // step
    if n_segs < 4:
        step = max(1, (n - nperseg) // 3)
        n_segs = 1 + (n - nperseg) // step
    if n_segs < 4:
        raise TooFewSegments(f"cannot fit 4 segments of {nperseg} in {n} samples")
    return nperseg, step


def _segment_fft(x: np.ndarray, nperseg: int, step: int, win: np.ndarray) -> np.ndarray:
    segs = np.lib.stride_tricks.sliding_window_view(x, nperseg)[::step]
    segs = segs - segs.mean(axis=-1, keepdims=True)
    return np.fft.rfft(segs * win, axis=-1)


def coherence(x: np.ndarray, y: np.ndarray, fs: float,
              band: tuple[float, float] = (1.0, 40.0),
              params: WelchParams | None = None) -> float:
    """Mean magnitude-squared coherence |Sxy|^2 / (Sxx * Syy) over a band.

    Cross and auto spectra are averaged over Hann-tapered, mean-removed
    segments (segmentation rule above); the density scaling cancels in the
    ratio, so spectra are left unnormalized.
    """
    params = params or WelchParams()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("coherence inputs must have equal length")
    nperseg, step = _coherence_segmentation(x.shape[-1], fs, params)
    win = _taper(params.window, nperseg)
    fx = _segment_fft(x, nperseg, step, win)
    fy = _segment_fft(y, nperseg, step, win)
    sxx = (fx.real ** 2 + fx.imag ** 2).mean(axis=0)
    syy = (fy.real ** 2 + fy.imag ** 2).mean(axis=0)
    sxy = (np.conj(fx) * fy).mean(axis=0)
    denom = sxx * syy
    with np.errstate(divide="ignore", invalid="ignore"):
        msc = np.where(denom > 0,
                       (sxy.real ** 2 + sxy.imag ** 2) / np.maximum(denom, 1e-300),
                       0.0)
    freqs = np.fft.rfftfreq(nperseg, 1.0 / fs)
    mask = (freqs >= band[0]) & (freqs <= band[1])
    if not mask.any():
        return 0.0
    return float(np.clip(msc[mask].mean(), 0.0, 1.0))
