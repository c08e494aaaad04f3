"""Canonical frequency bands."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class FrequencyBand:
    name: str
    lo_hz: float
    hi_hz: float

    def __post_init__(self):
        if not 0 <= self.lo_hz < self.hi_hz:
            raise ValueError(f"bad band edges {self.lo_hz}..{self.hi_hz}")


DELTA = FrequencyBand("delta", 1.0, 4.0)
THETA = FrequencyBand("theta", 4.0, 8.0)
ALPHA = FrequencyBand("alpha", 8.0, 13.0)
BETA = FrequencyBand("beta", 13.0, 30.0)
GAMMA = FrequencyBand("gamma", 30.0, 90.0)

CANONICAL_BANDS = (DELTA, THETA, ALPHA, BETA, GAMMA)
