"""Four-level discrete wavelet transform on the 8-tap Daubechies filter
bank, periodized.

Analysis is circular cross-correlation downsampled by two:

    cA[k] = sum_m dec_lo[m] * x[(2k + m) mod N]
    cD[k] = sum_m dec_hi[m] * x[(2k + m) mod N]

with dec_lo the reversed scaling sequence and dec_hi its alternating-sign
quadrature mirror. For even N this keeps the analysis orthonormal, so the
summed squared coefficients of a full decomposition equal the signal
energy. Odd-length inputs are padded by repeating the last sample.
"""
from __future__ import annotations

import numpy as np

from ..errors import SignalTooShort

# 8-tap Daubechies scaling sequence (synthesis low-pass), unit norm.
REC_LO = np.array([
    0.23037781330885523, 0.7148465705525415, 0.6308807679295904,
    -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
    0.032883011666982945, -0.010597401784997278,
])
DEC_LO = REC_LO[::-1].copy()
DEC_HI = np.array([(-1.0) ** k * REC_LO[k] for k in range(len(REC_LO))])
FILTER_LEN = len(REC_LO)

WAVELET_NAMES = ("dwt_d1", "dwt_d2", "dwt_d3", "dwt_d4", "dwt_a4")


def _analysis_step(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = x.size
    if n % 2:
        x = np.concatenate([x, x[-1:]])
        n += 1
    xp = np.concatenate([x, x[:FILTER_LEN - 1]])
    approx = np.correlate(xp, DEC_LO, mode="valid")[:n:2]
    detail = np.correlate(xp, DEC_HI, mode="valid")[:n:2]
    return approx, detail


def dwt_decompose(x: np.ndarray, levels: int = 4
                  ) -> tuple[list[np.ndarray], np.ndarray]:
    """Detail coefficients for levels 1..levels plus the final approximation.

    Requires every analysis step to see at least one full filter span,
    i.e. length >= 2^(levels-1) * filter length.
    """
    x = np.asarray(x, dtype=np.float64)
    need = (2 ** (levels - 1)) * FILTER_LEN
    if x.size < need:
        raise SignalTooShort(
            f"need >= {need} samples for {levels} levels, got {x.size}")
    details: list[np.ndarray] = []
    approx = x
    for _ in range(levels):
        approx, detail = _analysis_step(approx)
        details.append(detail)
    return details, approx


def dwt_energies(x: np.ndarray, levels: int = 4) -> np.ndarray:
    """Mean absolute detail coefficient per level plus the approximation."""
    details, approx = dwt_decompose(x, levels)
    out = np.empty(levels + 1)
    for i, d in enumerate(details):
        out[i] = np.abs(d).mean()
    out[levels] = np.abs(approx).mean()
    return out
