"""Versioned, digest-protected model files.

Layout: magic ``PMDL`` | u8 version | u32 payload length | 32-byte SHA-256
of the payload | payload. The payload is a deterministic key-value block
(keys sorted, arrays raw little-endian C-order), so identical models
serialize to identical bytes:

    payload := u32 n_entries, then per entry
        u16 key length | key utf8
        u8 kind: 0 = array, 1 = json
        array: u8 dtype-string length | dtype (e.g. "<f8") |
               u8 ndim | ndim x u64 shape | raw bytes
        json:  u32 length | utf8
"""
from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from ..errors import CorruptPayload, VersionMismatch
from ..features.standardize import StandardizationState
from .base import TrainedModel

MAGIC = b"PMDL"
VERSION = 1

_ALLOWED_DTYPES = {"<f8", "<f4", "<i8", "<i4", "<i2", "<u8", "<u4", "<u1", "|u1", "|b1"}


def _encode_entries(entries: dict) -> bytes:
    out = [struct.pack("<I", len(entries))]
    for key in sorted(entries):
        value = entries[key]
        kb = key.encode("utf-8")
        out.append(struct.pack("<H", len(kb)))
        out.append(kb)
        if isinstance(value, np.ndarray):
            arr = np.ascontiguousarray(value)
            if arr.dtype == np.bool_:
                arr = arr.astype(np.uint8)
            if arr.dtype.byteorder == ">":
                arr = arr.astype(arr.dtype.newbyteorder("<"))
            ds = arr.dtype.str.encode("ascii")
            out.append(b"\x00")
            out.append(struct.pack("<B", len(ds)))
            out.append(ds)
            out.append(struct.pack("<B", arr.ndim))
            out.append(struct.pack(f"<{arr.ndim}Q", *arr.shape) if arr.ndim else b"")
            out.append(arr.tobytes())
        else:
            blob = json.dumps(value, sort_keys=True).encode("utf-8")
            out.append(b"\x01")
            out.append(struct.pack("<I", len(blob)))
            out.append(blob)
    return b"".join(out)


def _decode_entries(payload: bytes) -> dict:
    view = memoryview(payload)
    pos = 0

    def take(n: int) -> memoryview:
        nonlocal pos
        if pos + n > len(view):
            raise CorruptPayload("payload ends unexpectedly")
        chunk = view[pos:pos + n]
        pos += n
        return chunk

    (n_entries,) = struct.unpack("<I", take(4))
    entries: dict = {}
    for _ in range(n_entries):
        (klen,) = struct.unpack("<H", take(2))
        key = bytes(take(klen)).decode("utf-8")
        kind = bytes(take(1))[0]
        if kind == 0:
            (dlen,) = struct.unpack("<B", take(1))
            dtype = bytes(take(dlen)).decode("ascii")
            if dtype not in _ALLOWED_DTYPES:
                raise CorruptPayload(f"disallowed dtype {dtype!r}")
            (ndim,) = struct.unpack("<B", take(1))
            shape = struct.unpack(f"<{ndim}Q", take(8 * ndim)) if ndim else ()
            count = int(np.prod(shape)) if shape else 1
            nbytes = count * np.dtype(dtype).itemsize
            arr = np.frombuffer(take(nbytes), dtype=dtype).reshape(shape).copy()
            entries[key] = arr
        elif kind == 1:
            (blen,) = struct.unpack("<I", take(4))
            entries[key] = json.loads(bytes(take(blen)).decode("utf-8"))
        else:
            raise CorruptPayload(f"unknown entry kind {kind}")
    if pos != len(view):
        raise CorruptPayload(f"{len(view) - pos} trailing payload bytes")
    return entries


def serialize(model: TrainedModel) -> bytes:
    entries: dict = {}
    for key, value in model.params.items():
        entries[f"p__{key}"] = np.asarray(value)
    if model.standardization is not None:
        for key, value in model.standardization.to_arrays().items():
            entries[f"s__{key}"] = np.asarray(value)
    # Wall-clock timing is diagnostics, not a parameter; keeping it out of
    # the payload makes identical trainings byte-identical.
    meta_train = {k: v for k, v in model.train_meta.items() if k != "train_seconds"}
    entries["__meta__"] = {
        "algorithm": model.algorithm,
        "hyperparams": model.hyperparams,
        "manifest_hash": model.manifest_hash,
        "train_meta": meta_train,
        "has_standardization": model.standardization is not None,
    }
    payload = _encode_entries(entries)
    digest = hashlib.sha256(payload).digest()
    return MAGIC + bytes([VERSION]) + struct.pack("<I", len(payload)) + digest + payload


def deserialize(blob: bytes) -> TrainedModel:
    if blob[:4] != MAGIC:
        raise CorruptPayload("bad magic")
    if blob[4] != VERSION:
        raise VersionMismatch(f"model format version {blob[4]}, expected {VERSION}")
    (length,) = struct.unpack("<I", blob[5:9])
    digest = blob[9:41]
    payload = blob[41:41 + length]
    if len(payload) != length:
        raise CorruptPayload(f"payload truncated: {len(payload)} of {length} bytes")
    if hashlib.sha256(payload).digest() != digest:
        raise CorruptPayload("payload digest mismatch")
    entries = _decode_entries(payload)
    try:
        meta = entries["__meta__"]
        params = {k[3:]: v for k, v in entries.items() if k.startswith("p__")}
        std = None
        if meta["has_standardization"]:
            std_arrays = {k[3:]: v for k, v in entries.items() if k.startswith("s__")}
            std = StandardizationState.from_arrays(std_arrays)
        return TrainedModel(algorithm=meta["algorithm"], params=params,
                            hyperparams=meta["hyperparams"],
                            manifest_hash=meta["manifest_hash"],
                            standardization=std, train_meta=meta["train_meta"])
    except (KeyError, TypeError) as exc:
        raise CorruptPayload(f"payload structure invalid: {exc}") from exc


def save_model(path: str | Path, model: TrainedModel) -> None:
    Path(path).write_bytes(serialize(model))


def load_model(path: str | Path) -> TrainedModel:
    return deserialize(Path(path).read_bytes())
