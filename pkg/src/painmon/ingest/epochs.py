"""Stimulus-locked epoching and labeled epoch containers."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from ..errors import NoStimulusMarkers
from .bundle import RawRecording


class Label(IntEnum):
    LOW_PAIN = 0
    HIGH_PAIN = 1


def _norm(desc: str) -> str:
    # Stimulus descriptions appear with varying case and internal spacing
    # ("S30", "s30", "S 30"); matching collapses both.
    return "".join(desc.split()).lower()


DEFAULT_LABEL_MAP = {"s30": Label.LOW_PAIN, "s70": Label.HIGH_PAIN}
DEFAULT_SKIP = frozenset({"s50"})


@dataclass
class EpochConfig:
    epoch_seconds: float = 4.0
    label_map: dict[str, Label] = field(default_factory=lambda: dict(DEFAULT_LABEL_MAP))
    skip_descriptions: frozenset[str] = DEFAULT_SKIP

    def normalized_map(self) -> dict[str, Label]:
        return {_norm(k): v for k, v in self.label_map.items()}

    def normalized_skip(self) -> frozenset[str]:
        return frozenset(_norm(s) for s in self.skip_descriptions)


@dataclass
class Epoch:
    subject_id: str
    label: Label
    onset_sample: int
    samples: np.ndarray           # (n_channels, n_samples)
    fs_hz: float
    channel_mask: np.ndarray      # bool per channel, True = usable

    @property
    def n_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]


@dataclass
class EpochSet:
    channel_names: list[str]
    fs_hz: float
    epochs: list[Epoch]
    skipped_markers: int = 0

    @property
    def subjects(self) -> list[str]:
        seen: dict[str, None] = {}
        for e in self.epochs:
            seen.setdefault(e.subject_id, None)
        return list(seen)

    def label_counts(self) -> dict[Label, int]:
        counts = {Label.LOW_PAIN: 0, Label.HIGH_PAIN: 0}
        for e in self.epochs:
            counts[e.label] += 1
        return counts

    def counts_by_subject(self) -> dict[str, dict[Label, int]]:
        out: dict[str, dict[Label, int]] = {}
        for e in self.epochs:
            per = out.setdefault(e.subject_id, {Label.LOW_PAIN: 0, Label.HIGH_PAIN: 0})
            per[e.label] += 1
        return out

    def subset(self, keep: list[int]) -> "EpochSet":
        return EpochSet(self.channel_names, self.fs_hz,
                        [self.epochs[i] for i in keep], self.skipped_markers)

    def __len__(self) -> int:
        return len(self.epochs)


def extract_epochs(rec: RawRecording, cfg: EpochConfig | None = None) -> EpochSet:
    """Cut one labeled epoch per mapped stimulus marker.

    The window is [onset, onset + epoch_seconds) at the recording rate.
    Markers in the skip set are counted but produce no epoch; windows that
    overrun the recording are dropped. Labels derive only from the marker
    description.
    """
    cfg = cfg or EpochConfig()
    label_map = cfg.normalized_map()
    skip = cfg.normalized_skip()
    fs = rec.header.sampling_rate_hz
    win = int(round(cfg.epoch_seconds * fs))
    n = rec.n_samples

    epochs: list[Epoch] = []
    skipped = 0
    mapped_any = False
    for ev in rec.markers:
        key = _norm(ev.description)
        if key in skip:
            skipped += 1
            continue
        if key not in label_map:
            continue
        mapped_any = True
        start = ev.position_samples
        if start + win > n:
            continue
        epochs.append(Epoch(
            subject_id=rec.subject_id,
            label=label_map[key],
            onset_sample=start,
            samples=rec.samples[:, start:start + win].copy(),
            fs_hz=fs,
            channel_mask=np.ones(rec.header.channel_count, dtype=bool),
        ))

    if not mapped_any and skipped == 0:
        raise NoStimulusMarkers("recording contains no mapped stimulus markers")
    return EpochSet(list(rec.header.channel_names), fs, epochs, skipped_markers=skipped)


def merge_epoch_sets(sets: list[EpochSet]) -> EpochSet:
    """Concatenate epoch sets that share channel layout and rate."""
    if not sets:
        raise ValueError("no epoch sets to merge")
    first = sets[0]
    for s in sets[1:]:
        if s.channel_names != first.channel_names or s.fs_hz != first.fs_hz:
            raise ValueError("epoch sets differ in channel layout or rate")
    merged: list[Epoch] = []
    skipped = 0
    for s in sets:
        merged.extend(s.epochs)
        skipped += s.skipped_markers
    return EpochSet(first.channel_names, first.fs_hz, merged, skipped)
