"""Feature-matrix container and its on-disk form.

File layout (integers little-endian):

    bytes 0..3   magic ``FMTX``
    byte  4      format version (currently 1)
    bytes 5..8   u32 JSON descriptor length
    ...          JSON descriptor (manifest hash/version, row subjects,
                 labels, shape)
    ...          values: float64 LE, n_rows x n_slots
    ...          imputed mask: u8, n_rows x n_slots
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import CacheFormatError
from ..ingest.epochs import EpochSet, Label
from .config import FeatureConfig
from .manifest import FeatureManifest
from .vector import FeatureVector, extract_epoch_features

MAGIC = b"FMTX"
VERSION = 1


@dataclass
class FeatureMatrix:
    values: np.ndarray            # (n, slots) float64
    imputed: np.ndarray           # (n, slots) bool
    labels: np.ndarray            # (n,) int, -1 when unknown
    subjects: list[str]
    manifest_hash: str
    manifest_version: str

    def __len__(self) -> int:
        return self.values.shape[0]

    def rows_for_subjects(self, subjects: set[str]) -> np.ndarray:
        return np.array([i for i, s in enumerate(self.subjects) if s in subjects],
                        dtype=int)


def featurize_epoch_set(epoch_set: EpochSet, cfg: FeatureConfig,
                        manifest: FeatureManifest) -> FeatureMatrix:
    vectors: list[FeatureVector] = []
    for epoch in epoch_set.epochs:
        vectors.append(extract_epoch_features(epoch, epoch_set.channel_names,
                                              cfg, manifest))
    if not vectors:
        raise ValueError("epoch set is empty")
    return FeatureMatrix(
        values=np.stack([v.values for v in vectors]),
        imputed=np.stack([v.imputed_mask for v in vectors]),
        labels=np.array([int(v.label) if v.label is not None else -1
                         for v in vectors]),
        subjects=[v.subject_id for v in vectors],
        manifest_hash=manifest.content_hash,
        manifest_version=manifest.version,
    )


def write_matrix(path: str | Path, matrix: FeatureMatrix) -> None:
    n, slots = matrix.values.shape
    descriptor = {
        "manifest_hash": matrix.manifest_hash,
        "manifest_version": matrix.manifest_version,
        "n_rows": n,
        "n_slots": slots,
        "subjects": matrix.subjects,
        "labels": matrix.labels.tolist(),
    }
    blob = json.dumps(descriptor).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(bytes([VERSION]))
        f.write(np.uint32(len(blob)).tobytes())
        f.write(blob)
        f.write(np.ascontiguousarray(matrix.values, dtype="<f8").tobytes())
        f.write(matrix.imputed.astype(np.uint8).tobytes())


def read_matrix(path: str | Path) -> FeatureMatrix:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise CacheFormatError("not a feature matrix file (bad magic)")
    if raw[4] != VERSION:
        raise CacheFormatError(f"unsupported feature matrix version {raw[4]}")
    blob_len = int(np.frombuffer(raw[5:9], dtype="<u4")[0])
    try:
        descriptor = json.loads(raw[9:9 + blob_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CacheFormatError(f"bad descriptor: {exc}") from exc

    n = descriptor["n_rows"]
    slots = descriptor["n_slots"]
    offset = 9 + blob_len
    val_bytes = n * slots * 8
    expected = offset + val_bytes + n * slots
    if len(raw) != expected:
        raise CacheFormatError(f"size mismatch: have {len(raw)}, expected {expected}")
    values = np.frombuffer(raw[offset:offset + val_bytes], dtype="<f8")
    values = values.reshape(n, slots).copy()
    imputed = np.frombuffer(raw[offset + val_bytes:], dtype=np.uint8)
    imputed = imputed.reshape(n, slots).astype(bool)
    return FeatureMatrix(
        values=values,
        imputed=imputed,
        labels=np.asarray(descriptor["labels"], dtype=int),
        subjects=list(descriptor["subjects"]),
        manifest_hash=descriptor["manifest_hash"],
        manifest_version=descriptor["manifest_version"],
    )
