"""Ingest wire protocol: length-prefixed binary frames.

Every frame is ``u32 length`` (bytes after the length field) followed by:

    "EEGS" | u8 version | u8 type | body

Types: 1 = hello, 2 = chunk, 3 = bye.
hello body:  u16 channel count | f32 rate_hz | per channel (u8 name length,
             utf-8 name)
chunk body:  u64 first-sample index | channel-major little-endian f32
             samples (length implies the per-channel sample count)
bye body:    empty

All integers little-endian. The hello's rate field is authoritative for
the stream that follows.
"""
from __future__ import annotations

import socket
import struct
from dataclasses import dataclass

import numpy as np

from ..errors import CorruptPayload

MAGIC = b"EEGS"
VERSION = 1
HELLO, CHUNK, BYE = 1, 2, 3


@dataclass
class Hello:
    channel_names: list[str]
    rate_hz: float


@dataclass
class Chunk:
    first_sample: int
    samples: np.ndarray        # (channels, k)


@dataclass
class Bye:
    pass


def encode_hello(channel_names: list[str], rate_hz: float) -> bytes:
    body = struct.pack("<Hf", len(channel_names), rate_hz)
    for name in channel_names:
        nb = name.encode("utf-8")
        body += struct.pack("<B", len(nb)) + nb
    return _frame(HELLO, body)


def encode_chunk(first_sample: int, samples: np.ndarray) -> bytes:
    data = np.ascontiguousarray(samples, dtype="<f4")
    return _frame(CHUNK, struct.pack("<Q", first_sample) + data.tobytes())


def encode_bye() -> bytes:
    return _frame(BYE, b"")


def _frame(ftype: int, body: bytes) -> bytes:
    payload = MAGIC + bytes([VERSION, ftype]) + body
    return struct.pack("<I", len(payload)) + payload


def decode_frame(payload: bytes, n_channels: int | None = None):
    """Decode one frame payload (without the length prefix)."""
    if payload[:4] != MAGIC:
        raise CorruptPayload("bad frame magic")
    if payload[4] != VERSION:
        raise CorruptPayload(f"unsupported wire version {payload[4]}")
    ftype = payload[5]
    body = payload[6:]
    if ftype == HELLO:
        n, rate = struct.unpack("<Hf", body[:6])
        names = []
        pos = 6
        for _ in range(n):
            ln = body[pos]
            names.append(body[pos + 1:pos + 1 + ln].decode("utf-8"))
            pos += 1 + ln
        return Hello(channel_names=names, rate_hz=float(rate))
    if ftype == CHUNK:
        if n_channels is None:
            raise CorruptPayload("chunk before hello")
        (first,) = struct.unpack("<Q", body[:8])
        flat = np.frombuffer(body[8:], dtype="<f4")
        if flat.size % n_channels:
            raise CorruptPayload("chunk size not divisible by channel count")
        return Chunk(first_sample=first,
                     samples=flat.reshape(n_channels, -1).astype(np.float64))
    if ftype == BYE:
        return Bye()
    raise CorruptPayload(f"unknown frame type {ftype}")


def read_frame(sock: socket.socket) -> bytes | None:
    """Read one length-prefixed frame payload; None on clean EOF."""
    header = _read_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack("<I", header)
    if length > 64 * 1024 * 1024:
        raise CorruptPayload(f"frame of {length} bytes exceeds limit")
    payload = _read_exact(sock, length)
    if payload is None:
        raise CorruptPayload("connection closed mid-frame")
    return payload


def _read_exact(sock: socket.socket, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        part = sock.recv(n - len(buf))
        if not part:
            return None if not buf else None
        buf += part
    return buf
