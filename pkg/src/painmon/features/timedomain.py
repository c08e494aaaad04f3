"""Time-domain statistics and Hjorth parameters."""
from __future__ import annotations

import numpy as np

TIME_STAT_NAMES = ("mean", "sd", "skewness", "kurtosis", "zcr", "ptp")
HJORTH_NAMES = ("activity", "mobility", "complexity")


def time_stats_matrix(x: np.ndarray, fs: float) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise mean, SD, skewness, kurtosis, zero-crossing rate and
    peak-to-peak for a (channels, samples) matrix.

    Skewness and kurtosis are standardized central moments; kurtosis is
    non-excess (Gaussian -> 3). The zero-crossing rate counts sign changes
    of the mean-removed signal per second. Zero-variance rows get
    skew/kurt of 0 and are flagged.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    n = x.shape[-1]
    if n < 4:
        raise ValueError("need >= 4 samples")
    mean = x.mean(axis=-1)
    centered = x - mean[:, None]
    c2 = centered * centered
    var = c2.mean(axis=-1)
    sd = np.sqrt(var)
    flagged = sd <= 0
    safe = np.where(flagged, 1.0, sd)
    skew = np.where(flagged, 0.0, (c2 * centered).mean(axis=-1) / safe ** 3)
    kurt = np.where(flagged, 0.0, (c2 * c2).mean(axis=-1) / safe ** 4)

    zcr = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        signs = np.sign(centered[i])
        nz = signs[signs != 0]
        crossings = int(np.count_nonzero(nz[1:] != nz[:-1])) if nz.size > 1 else 0
        zcr[i] = crossings * fs / n
    ptp = x.max(axis=-1) - x.min(axis=-1)
    return np.column_stack([mean, sd, skew, kurt, zcr, ptp]), flagged


def time_stats(x: np.ndarray, fs: float) -> tuple[np.ndarray, bool]:
    """Single-series variant of :func:`time_stats_matrix`."""
    values, flags = time_stats_matrix(np.asarray(x)[None, :], fs)
    return values[0], bool(flags[0])


def hjorth_matrix(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise Hjorth activity, mobility and complexity.

    activity = var(x); mobility = sqrt(var(dx)/var(x));
    complexity = mobility(dx)/mobility(x), with d the first difference.
    Zero-variance rows yield mobility/complexity 0, flagged.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[-1] < 3:
        raise ValueError("need >= 3 samples")
    dx = np.diff(x, axis=-1)
    ddx = np.diff(dx, axis=-1)
    v0 = x.var(axis=-1)
    v1 = dx.var(axis=-1)
    v2 = ddx.var(axis=-1)

    flag0 = v0 <= 0
    flag1 = v1 <= 0
    mobility = np.where(flag0, 0.0, np.sqrt(np.where(flag0, 1.0, v1 / np.where(flag0, 1.0, v0))))
    inner = np.where(flag1, 0.0, np.sqrt(np.where(flag1, 1.0, v2 / np.where(flag1, 1.0, v1))))
    complexity = np.where(flag0 | flag1, 0.0, inner / np.where(mobility > 0, mobility, 1.0))
    return np.column_stack([v0, mobility, complexity]), flag0 | flag1


def hjorth(x: np.ndarray) -> tuple[np.ndarray, bool]:
    """Single-series variant of :func:`hjorth_matrix`."""
    values, flags = hjorth_matrix(np.asarray(x)[None, :])
    return values[0], bool(flags[0])
