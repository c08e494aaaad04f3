"""Stream sources: synthetic generator, bundle replay and socket ingest.

Every source runs its own feeder thread and keeps the contract: ``start``
receives the buffer-push callable (and an optional hello callback),
``stop`` joins the thread, ``finished`` flips when data ends.
"""
from __future__ import annotations

import logging
import socket
import threading
import time

import numpy as np

from ..errors import CorruptPayload
from ..evaluation.synth import SynthConfig, SyntheticStream
from ..ingest.bundle import RawRecording
from . import wire

log = logging.getLogger(__name__)


class SyntheticSource:
    """Paced synthetic stream; the planted signature can be toggled live or
    scheduled via ``signature_at_s``."""

    kind = "synthetic"

    def __init__(self, cfg: SynthConfig | None = None, rate_hz: float = 128.0,
                 chunk_samples: int = 16, seed: int = 0,
                 signature_at_s: float | None = None, realtime: bool = True):
        self.stream = SyntheticStream(cfg, rate_hz, seed=seed)
        self.rate = rate_hz
        self.channel_names = list(self.stream.channels)
        self.chunk_samples = chunk_samples
        self.signature_at_s = signature_at_s
        self.realtime = realtime
        self.finished = False
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def set_signature(self, on: bool) -> None:
        self.stream.set_signature(on)

    def start(self, push, on_hello=None) -> None:
        if on_hello is not None:
            on_hello(self.rate, self.channel_names)

        def feed():
            emitted = 0
            period = self.chunk_samples / self.rate
            next_t = time.perf_counter() + period
            while not self._stop.is_set():
                if (self.signature_at_s is not None
                        and emitted / self.rate >= self.signature_at_s):
                    self.stream.set_signature(True)
                push(self.stream.next_chunk(self.chunk_samples))
                emitted += self.chunk_samples
                if self.realtime:
                    delay = next_t - time.perf_counter()
                    if delay > 0:
                        time.sleep(delay)
                    next_t += period

        self._thread = threading.Thread(target=feed, daemon=True,
                                        name="synthetic-source")
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)


class FileReplaySource:
    """Replays a loaded recording at its native rate.

    ``speed`` scales the pacing; ``fast`` pushes without pacing and flags
    the run (timing fidelity is gone, data fidelity is not).
    """

    kind = "file_replay"

    def __init__(self, recording: RawRecording, chunk_seconds: float = 0.125,
                 speed: float = 1.0, fast: bool = False):
        self.recording = recording
        self.rate = recording.header.sampling_rate_hz
        self.channel_names = list(recording.header.channel_names)
        self.chunk = max(1, int(round(chunk_seconds * self.rate)))
        self.speed = speed
        self.fast = fast
        self.finished = False
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self, push, on_hello=None) -> None:
        if on_hello is not None:
            on_hello(self.rate, self.channel_names)

        def feed():
            samples = self.recording.samples
            n = samples.shape[1]
            period = self.chunk / self.rate / self.speed
            next_t = time.perf_counter() + period
            for start in range(0, n, self.chunk):
                if self._stop.is_set():
                    break
                push(samples[:, start:start + self.chunk])
                if not self.fast:
                    delay = next_t - time.perf_counter()
                    if delay > 0:
                        time.sleep(delay)
                    next_t += period
            self.finished = True

        self._thread = threading.Thread(target=feed, daemon=True,
                                        name="replay-source")
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)


class SocketSource:
    """Listens for one wire-protocol producer and feeds its chunks."""

    kind = "socket"

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self.host = host
        self.port = port
        self.channel_names: list[str] = []
        self.rate = 0.0
        self.finished = False
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._server.bind((host, port))
        self._server.listen(1)
        self.port = self._server.getsockname()[1]

    def start(self, push, on_hello=None) -> None:
        def serve():
            self._server.settimeout(0.5)
            conn = None
            while not self._stop.is_set() and conn is None:
                try:
                    conn, addr = self._server.accept()
                    log.info("producer connected from %s", addr)
                except socket.timeout:
                    continue
            if conn is None:
                self.finished = True
                return
            n_channels = None
            try:
                while not self._stop.is_set():
                    payload = wire.read_frame(conn)
                    if payload is None:
                        break
                    frame = wire.decode_frame(payload, n_channels)
                    if isinstance(frame, wire.Hello):
                        self.channel_names = frame.channel_names
                        self.rate = frame.rate_hz
                        n_channels = len(frame.channel_names)
                        if on_hello is not None:
                            on_hello(self.rate, self.channel_names)
                    elif isinstance(frame, wire.Chunk):
                        push(frame.samples)
                    elif isinstance(frame, wire.Bye):
                        break
            except CorruptPayload as exc:
                log.warning("producer stream corrupt: %s", exc)
            finally:
                conn.close()
                self.finished = True

        self._thread = threading.Thread(target=serve, daemon=True,
                                        name="socket-source")
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
        self._server.close()


def stream_bundle_over_socket(recording: RawRecording, host: str, port: int,
                              chunk_seconds: float = 0.125, speed: float = 1.0,
                              fast: bool = False) -> int:
    """Producer side: connect and send one recording as wire frames.
    Returns the number of chunk frames sent."""
    sock = socket.create_connection((host, port))
    try:
        sock.sendall(wire.encode_hello(list(recording.header.channel_names),
                                       recording.header.sampling_rate_hz))
        rate = recording.header.sampling_rate_hz
        chunk = max(1, int(round(chunk_seconds * rate)))
        period = chunk / rate / speed
        samples = recording.samples
        sent = 0
        next_t = time.perf_counter() + period
        for start in range(0, samples.shape[1], chunk):
            sock.sendall(wire.encode_chunk(start, samples[:, start:start + chunk]))
            sent += 1
            if not fast:
                delay = next_t - time.perf_counter()
                if delay > 0:
                    time.sleep(delay)
                next_t += period
        sock.sendall(wire.encode_bye())
        return sent
    finally:
        sock.close()


def stream_synthetic_over_socket(host: str, port: int, duration_s: float,
                                 cfg: SynthConfig | None = None,
                                 rate_hz: float = 128.0, seed: int = 0,
                                 chunk_samples: int = 16,
                                 signature_at_s: float | None = None,
                                 realtime: bool = True) -> int:
    """Producer side: synthetic stream as wire frames."""
    stream = SyntheticStream(cfg, rate_hz, seed=seed)
    sock = socket.create_connection((host, port))
    try:
        sock.sendall(wire.encode_hello(stream.channels, rate_hz))
        total = int(duration_s * rate_hz)
        period = chunk_samples / rate_hz
        sent = 0
        emitted = 0
        next_t = time.perf_counter() + period
        while emitted < total:
            if signature_at_s is not None and emitted / rate_hz >= signature_at_s:
                stream.set_signature(True)
            k = min(chunk_samples, total - emitted)
            sock.sendall(wire.encode_chunk(emitted, stream.next_chunk(k)))
            emitted += k
            sent += 1
            if realtime:
                delay = next_t - time.perf_counter()
                if delay > 0:
                    time.sleep(delay)
                next_t += period
        sock.sendall(wire.encode_bye())
        return sent
    finally:
        sock.close()
