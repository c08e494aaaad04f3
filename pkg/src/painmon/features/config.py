"""Feature-extraction configuration.

The configuration, together with a channel list, pins the vector layout;
its fingerprint is folded into the manifest hash so a model can refuse
vectors built under different settings.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .bands import CANONICAL_BANDS, FrequencyBand
from .spectral import WelchParams

# 14-site layout covering the homologous coherence pairs plus the
# sensorimotor/midline/frontal sites the synthetic generator targets.
DEFAULT_CHANNELS = ["F3", "F4", "F7", "F8", "FC5", "FC6", "FCz",
                    "C3", "C4", "Cz", "P3", "P4", "O1", "O2"]

DEFAULT_SUBWINDOWS_MS = ((0.0, 160.0), (160.0, 300.0), (300.0, 1000.0))
DEFAULT_COHERENCE_PAIRS = (("C3", "C4"), ("F3", "F4"))


@dataclass(frozen=True)
class FeatureConfig:
    bands: tuple[FrequencyBand, ...] = CANONICAL_BANDS
    subwindows_ms: tuple[tuple[float, float], ...] = DEFAULT_SUBWINDOWS_MS
    sampen_m: int = 2
    sampen_r_factor: float = 0.2
    higuchi_kmax: int = 10
    wavelet_levels: int = 4
    coherence_pairs: tuple[tuple[str, str], ...] = DEFAULT_COHERENCE_PAIRS
    coherence_band_hz: tuple[float, float] = (1.0, 40.0)
    welch: WelchParams = field(default_factory=WelchParams)
    average_reference: bool = False
    version: str = "1"

    def __post_init__(self):
        if self.sampen_r_factor <= 0:
            raise ValueError("sampen_r_factor must be positive")
        if self.higuchi_kmax < 2:
            raise ValueError("higuchi_kmax must be >= 2")
        last_hi = -1.0
        for lo, hi in self.subwindows_ms:
            if lo < last_hi or hi <= lo:
                raise ValueError("sub-windows must be ordered and non-overlapping")
            last_hi = hi

    def fingerprint(self) -> str:
        payload = {
            "bands": [(b.name, b.lo_hz, b.hi_hz) for b in self.bands],
            "subwindows_ms": self.subwindows_ms,
            "sampen": [self.sampen_m, self.sampen_r_factor],
            "higuchi_kmax": self.higuchi_kmax,
            "wavelet_levels": self.wavelet_levels,
            "coherence_pairs": self.coherence_pairs,
            "coherence_band_hz": self.coherence_band_hz,
            "welch": [self.welch.segment_seconds, self.welch.overlap, self.welch.window],
            "average_reference": self.average_reference,
            "version": self.version,
        }
        blob = json.dumps(payload, sort_keys=True, default=list)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def realtime_config() -> FeatureConfig:
    """Configuration for 1-s streamed windows: shorter Welch segments and
    average re-referencing (the streamed montage differs from the wired
    one)."""
    return FeatureConfig(welch=WelchParams(segment_seconds=0.5, overlap=0.5),
                         average_reference=True)
