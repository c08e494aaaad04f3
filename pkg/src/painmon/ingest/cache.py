"""Binary epoch cache so featurization can skip re-parsing bundles.

Layout (all integers little-endian):

    bytes 0..3   magic ``EPCH``
    byte  4      format version (currently 1)
    bytes 5..8   u32 length of the JSON descriptor
    ...          JSON descriptor (utf-8)
    ...          sample block: float32 LE, one epoch after another,
                 each epoch channel-major (n_channels x n_samples)
    ...          mask block: u8, one byte per channel per epoch

The JSON descriptor carries ``fs_hz``, ``channel_names``, ``n_samples``
per epoch, ``skipped_markers`` and one record per epoch (subject, label,
onset).
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import CacheFormatError
from .epochs import Epoch, EpochSet, Label

MAGIC = b"EPCH"
VERSION = 1


def write_epochs(path: str | Path, epoch_set: EpochSet) -> None:
    path = Path(path)
    epochs = epoch_set.epochs
    n_samples = epochs[0].n_samples if epochs else 0
    n_channels = len(epoch_set.channel_names)
    for e in epochs:
        if e.n_samples != n_samples or e.n_channels != n_channels:
            raise ValueError("epochs are not homogeneous; cannot cache")

    descriptor = {
        "fs_hz": epoch_set.fs_hz,
        "channel_names": epoch_set.channel_names,
        "n_samples": n_samples,
        "skipped_markers": epoch_set.skipped_markers,
        "epochs": [
            {"subject": e.subject_id, "label": int(e.label), "onset": e.onset_sample}
            for e in epochs
        ],
    }
    blob = json.dumps(descriptor).encode("utf-8")

    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(bytes([VERSION]))
        f.write(np.uint32(len(blob)).tobytes())
        f.write(blob)
        for e in epochs:
            f.write(np.ascontiguousarray(e.samples, dtype="<f4").tobytes())
        for e in epochs:
            f.write(e.channel_mask.astype(np.uint8).tobytes())


def read_epochs(path: str | Path) -> EpochSet:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise CacheFormatError("not an epoch cache (bad magic)")
    if raw[4] != VERSION:
        raise CacheFormatError(f"unsupported epoch cache version {raw[4]}")
    blob_len = int(np.frombuffer(raw[5:9], dtype="<u4")[0])
    try:
        descriptor = json.loads(raw[9:9 + blob_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CacheFormatError(f"bad descriptor: {exc}") from exc

    channel_names = descriptor["channel_names"]
    n_channels = len(channel_names)
    n_samples = descriptor["n_samples"]
    records = descriptor["epochs"]
    offset = 9 + blob_len
    sample_bytes = n_channels * n_samples * 4
    expected = offset + len(records) * (sample_bytes + n_channels)
    if len(raw) != expected:
        raise CacheFormatError(f"size mismatch: have {len(raw)}, expected {expected}")

    epochs: list[Epoch] = []
    mask_offset = offset + len(records) * sample_bytes
    for i, rec in enumerate(records):
        start = offset + i * sample_bytes
        samples = np.frombuffer(raw[start:start + sample_bytes], dtype="<f4")
        samples = samples.reshape(n_channels, n_samples).astype(np.float64)
        mstart = mask_offset + i * n_channels
        mask = np.frombuffer(raw[mstart:mstart + n_channels], dtype=np.uint8).astype(bool)
        epochs.append(Epoch(
            subject_id=rec["subject"],
            label=Label(rec["label"]),
            onset_sample=rec["onset"],
            samples=samples,
            fs_hz=descriptor["fs_hz"],
            channel_mask=mask,
        ))
    return EpochSet(channel_names, descriptor["fs_hz"], epochs,
                    skipped_markers=descriptor.get("skipped_markers", 0))
