"""Zero-phase filtering and rate conversion.

All filters run forward-backward so the net group delay is zero. The
high-pass is a windowed-sinc (Hamming) linear-phase FIR; the mains notch
is a second-order IIR. Rate conversion is polyphase FIR with built-in
anti-aliasing.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import signal as sps

from ..errors import SignalTooShort


@dataclass
class FilterSpec:
    highpass_cutoff_hz: float = 1.0
    notch_hz: float = 50.0
    notch_q: float = 30.0
    fir_taps: int = 1001              # at 500 Hz; must be odd
    bandpass_hz: tuple[float, float] | None = None
    bandpass_taps: int = 101          # short kernel for 1-s realtime windows

    def __post_init__(self):
        if self.fir_taps % 2 == 0 or self.fir_taps <= 0:
            raise ValueError("fir_taps must be odd and positive")
        if self.bandpass_taps % 2 == 0 or self.bandpass_taps <= 0:
            raise ValueError("bandpass_taps must be odd and positive")
        if self.highpass_cutoff_hz >= self.notch_hz:
            raise ValueError("high-pass cutoff must sit below the notch")


_design_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _cached_design(key: tuple, builder) -> tuple[np.ndarray, np.ndarray]:
    got = _design_cache.get(key)
    if got is None:
        got = builder()
        _design_cache[key] = got
    return got


def _poly_window(up: int, down: int) -> np.ndarray:
    # Mirror of resample_poly's internal default design (Kaiser, beta=5).
    max_rate = max(up, down)
    f_c = 1.0 / max_rate
    half_len = 10 * max_rate
    return sps.firwin(2 * half_len + 1, f_c, window=("kaiser", 5.0))


def _filtfilt(b, a, x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    padlen = min(3 * max(len(np.atleast_1d(b)), len(np.atleast_1d(a))), n - 1)
    return sps.filtfilt(b, a, x, axis=-1, padtype="even", padlen=padlen)


def highpass_zero_phase(x: np.ndarray, fs: float, spec: FilterSpec | None = None) -> np.ndarray:
    """Remove drift below the cutoff; DC is rejected entirely.

    Accepts a single series or a (channels, samples) matrix; filtering is
    along the last axis. Requires length > 3 x fir_taps so the
    forward-backward transient fits.
    """
    spec = spec or FilterSpec()
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] <= 3 * spec.fir_taps:
        raise SignalTooShort(
            f"need > {3 * spec.fir_taps} samples for a {spec.fir_taps}-tap kernel, "
            f"got {x.shape[-1]}")
    taps, _ = _cached_design(
        ("hp", spec.fir_taps, spec.highpass_cutoff_hz, fs),
        lambda: (sps.firwin(spec.fir_taps, spec.highpass_cutoff_hz,
                            window="hamming", pass_zero=False, fs=fs), None))
    return _filtfilt(taps, 1.0, x)


def notch_zero_phase(x: np.ndarray, fs: float, spec: FilterSpec | None = None) -> np.ndarray:
    """Suppress the mains line with a narrow biquad notch, zero net phase."""
    spec = spec or FilterSpec()
    if spec.notch_hz >= fs / 2:
        raise ValueError("notch frequency must be below Nyquist")
    b, a = _cached_design(("notch", spec.notch_hz, spec.notch_q, fs),
                          lambda: sps.iirnotch(spec.notch_hz, spec.notch_q, fs=fs))
    return _filtfilt(b, a, np.asarray(x, dtype=np.float64))


def bandpass_zero_phase(x: np.ndarray, fs: float, lo: float, hi: float,
                        taps: int = 101) -> np.ndarray:
    """Short-kernel zero-phase band-pass used on streamed windows.

    Edge transients are confined to roughly taps/2 samples at each end;
    reflection padding keeps them bounded on 1-s windows.
    """
    hi = min(hi, 0.499 * fs)
    kernel, _ = _cached_design(
        ("bp", taps, lo, hi, fs),
        lambda: (sps.firwin(taps, [lo, hi], window="hamming",
                            pass_zero=False, fs=fs), None))
    return _filtfilt(kernel, 1.0, np.asarray(x, dtype=np.float64))


def resample_polyphase(x: np.ndarray, from_fs: float, to_fs: float) -> np.ndarray:
    """Rational-ratio polyphase resampling along the last axis.

    Output length is round(n * to_fs / from_fs); identical rates return
    the input unchanged.
    """
    if from_fs <= 0 or to_fs <= 0:
        raise ValueError("rates must be positive")
    x = np.asarray(x, dtype=np.float64)
    if from_fs == to_fs:
        return x
    ratio = Fraction(to_fs / from_fs).limit_denominator(10_000)
    up, down = ratio.numerator, ratio.denominator
    # resample_poly designs its anti-alias kernel per call; reuse it.
    window, _ = _cached_design(("poly", up, down), lambda: (_poly_window(up, down), None))
    y = sps.resample_poly(x, up, down, axis=-1, window=window)
    want = int(round(x.shape[-1] * to_fs / from_fs))
    have = y.shape[-1]
    if have > want:
        y = y[..., :want]
    elif have < want:
        pad = np.repeat(y[..., -1:], want - have, axis=-1)
        y = np.concatenate([y, pad], axis=-1)
    return y
