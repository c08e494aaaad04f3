"""Pinned, versioned layout of the canonical 537-slot feature vector.

Per channel (37 slots): five full-window band powers, fifteen sub-window
band powers (band-major, window-minor), five band-ratio indices, six
time-domain statistics, three Hjorth parameters, spectral entropy, sample
entropy, Higuchi fractal dimension. Global slots (17): two homologous-pair
coherences, peak frequency and -3 dB bandwidth for each band on the mean
channel, and five wavelet energies on the mean channel.

Whatever the channel list, the vector canonicalizes to exactly 537 slots:
shorter layouts are zero-padded, longer ones truncated, and the manifest
records which happened.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .config import FeatureConfig
from .spectral import RATIO_NAMES
from .timedomain import HJORTH_NAMES, TIME_STAT_NAMES
from .wavelet import WAVELET_NAMES

CANONICAL_SLOTS = 537
GLOBAL_CHANNEL = "global_mean"
PAD_NAME = "pad"


@dataclass(frozen=True)
class ManifestEntry:
    slot: int
    feature: str
    channel: str          # channel name, pair "A-B", GLOBAL_CHANNEL or "-"
    detail: str           # band, window tag, ratio name or "-"


@dataclass
class FeatureManifest:
    entries: list[ManifestEntry]       # exactly CANONICAL_SLOTS entries
    channels: list[str]
    n_native: int
    version: str
    config_hash: str
    content_hash: str

    @property
    def n_padded(self) -> int:
        return max(0, CANONICAL_SLOTS - self.n_native)

    @property
    def truncated(self) -> bool:
        return self.n_native > CANONICAL_SLOTS

    def to_text(self) -> str:
        lines = [
            f"# feature manifest v{self.version}",
            f"# config={self.config_hash} content={self.content_hash}",
            f"# channels={','.join(self.channels)}",
            f"# native_slots={self.n_native} canonical={CANONICAL_SLOTS}"
            + (" (truncated)" if self.truncated else f" (padded {self.n_padded})"),
            "# slot\tfeature\tchannel\tdetail",
        ]
        for e in self.entries:
            lines.append(f"{e.slot}\t{e.feature}\t{e.channel}\t{e.detail}")
        return "\n".join(lines) + "\n"


def _native_entries(channel_names: list[str], cfg: FeatureConfig) -> list[tuple[str, str, str]]:
    rows: list[tuple[str, str, str]] = []
    band_names = [b.name for b in cfg.bands]
    for ch in channel_names:
        for b in band_names:
            rows.append(("band_power", ch, b))
        for b in band_names:
            for w in range(len(cfg.subwindows_ms)):
                lo, hi = cfg.subwindows_ms[w]
                rows.append(("subwindow_power", ch, f"{b}:{int(lo)}-{int(hi)}ms"))
        for r in RATIO_NAMES:
            rows.append(("band_ratio", ch, r))
        for s in TIME_STAT_NAMES:
            rows.append((s, ch, "-"))
        for h in HJORTH_NAMES:
            rows.append((f"hjorth_{h}", ch, "-"))
        rows.append(("spectral_entropy", ch, "-"))
        rows.append(("sample_entropy", ch, f"m={cfg.sampen_m},r={cfg.sampen_r_factor}"))
        rows.append(("higuchi_fd", ch, f"kmax={cfg.higuchi_kmax}"))
    for a, b in cfg.coherence_pairs:
        lo, hi = cfg.coherence_band_hz
        rows.append(("coherence", f"{a}-{b}", f"{lo:g}-{hi:g}Hz"))
    for b in band_names:
        rows.append(("peak_hz", GLOBAL_CHANNEL, b))
        rows.append(("bandwidth_hz", GLOBAL_CHANNEL, b))
    for w in WAVELET_NAMES[:cfg.wavelet_levels + 1]:
        rows.append((w, GLOBAL_CHANNEL, "-"))
    return rows


def build_manifest(channel_names: list[str], cfg: FeatureConfig | None = None
                   ) -> FeatureManifest:
    """Build the canonical manifest for a channel list and configuration.

    Deterministic: the same inputs always produce the same content hash.
    """
    cfg = cfg or FeatureConfig()
    native = _native_entries(list(channel_names), cfg)
    n_native = len(native)

    rows = native[:CANONICAL_SLOTS]
    while len(rows) < CANONICAL_SLOTS:
        rows.append((PAD_NAME, "-", "-"))
    entries = [ManifestEntry(i, f, c, d) for i, (f, c, d) in enumerate(rows)]

    cfg_hash = cfg.fingerprint()
    digest = hashlib.sha256()
    digest.update(f"v{cfg.version}|{cfg_hash}|{n_native}".encode())
    for e in entries:
        digest.update(f"{e.slot}|{e.feature}|{e.channel}|{e.detail}\n".encode())
    return FeatureManifest(
        entries=entries,
        channels=list(channel_names),
        n_native=n_native,
        version=cfg.version,
        config_hash=cfg_hash,
        content_hash=digest.hexdigest()[:16],
    )
